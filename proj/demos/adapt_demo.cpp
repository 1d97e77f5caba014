// Runs one single-bit-feedback adaptation session on the 127-element array
// and prints the accepted-power trajectory.

#include <cstdio>
#include <random>

#include "hexris/hexris.hpp"

int main() {
    using namespace hexris;

    const RisLayout layout = build_hex_layout(6, 8.7e-3, 6.6e-3, 6.6e-3);
    const GroupSchedule schedule = paper_group_schedule();
    const ReflectionAlphabet alphabet = active_alphabet();
    const PatternModel pattern = isotropic_pattern();

    Scenario scenario;
    scenario.frequency_hz = 23.8e9;
    scenario.bs_position_a = {1.5, -1.09, 0.0};
    scenario.ue_position_b = {0.92, 0.28, 0.0};
    scenario.bs_power_dbm = 10.0;
    scenario.noise_power_dbm = -90.0;
    scenario.bs_gain_db = 19.0;
    scenario.ue_gain_db = 3.2;

    std::mt19937_64 rng(42);
    const ReflectionConfig initial = random_config(layout.size(), alphabet, rng);
    const NoiseModel noise = no_noise();
    const PowerFn oracle = make_power_oracle(scenario, layout, alphabet, pattern, noise, 1, rng);

    ControllerParams params;
    params.pts_dbm = -40.0;  // force a trigger so the session runs
    params.max_iterations = 100;
    params.mode = TerminationMode::fixed_budget;

    InProcessLink link;
    const double p0 = oracle(initial);
    const AdaptationReport report =
        iterative_adapt(initial, oracle, schedule, alphabet.size(), params, link);

    std::printf("initial power  %8.3f dBm\n", p0);
    std::printf("final power    %8.3f dBm after %d iterations\n", report.final_power_dbm,
                report.iterations_used);
    std::printf("improvement    %8.3f dB\n\n", report.final_power_dbm - p0);
    std::printf("%-5s %-9s %-8s %-12s %s\n", "iter", "group_set", "subgroup", "trial_dbm",
                "accepted");
    for (const auto& t : report.trials) {
        if (t.iteration > 12) break;
        std::printf("%-5d %-9d %-8d %-12.3f %d\n", t.iteration, t.group_set, t.subgroup,
                    t.trial_power_dbm, t.accepted ? 1 : 0);
    }
    std::printf("...\n");
    return 0;
}
