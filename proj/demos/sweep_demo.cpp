// Sweeps the UE over a small grid with trigger-based adaptation carried
// across positions and prints a coarse power map.

#include <cstdio>

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
    scenario.bs_power_dbm = 10.0;
    scenario.noise_power_dbm = -90.0;
    scenario.bs_gain_db = 19.0;
    scenario.ue_gain_db = 3.2;

    const AoiGrid grid = build_aoi_grid({0.3, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, 12, 8,
                                        0.08);
    ControllerParams params;
    params.pts_dbm = -70.0;
    params.max_iterations = 100;
    params.mode = TerminationMode::early_exit;

    InProcessLink link;
    const SweepResult result = run_sweep(grid, scenario, layout, alphabet, pattern, schedule,
                                         params, no_noise(), 1, 1, link);

    std::printf("power map (dBm), x right, y down, * = adaptation triggered\n\n");
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const auto& r = result.records[static_cast<std::size_t>(ix * grid.ny + iy)];
            std::printf("%7.1f%c", r.p_ue_dbm, r.triggered ? '*' : ' ');
        }
        std::printf("\n");
    }

    const SweepStats stats = analyze(result, nullptr, params.pts_dbm);
    std::printf("\nmin %.1f  median %.1f  max %.1f dBm, fraction below threshold %.3f\n",
                stats.summary.min_dbm, stats.summary.median_dbm, stats.summary.max_dbm,
                stats.fraction_below_pts);
    return 0;
}
