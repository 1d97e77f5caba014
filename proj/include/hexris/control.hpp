#pragma once

#include <functional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hexris/channel.hpp"
#include "hexris/feedback.hpp"
#include "hexris/schedule.hpp"

namespace hexris {

using PowerFn = std::function<double(const ReflectionConfig&)>;

inline ReflectionConfig random_config(int m, const ReflectionAlphabet& alphabet,
                                      std::mt19937_64& rng) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    ReflectionConfig config;
    config.state_index.resize(static_cast<std::size_t>(m));
    std::uniform_int_distribution<int> pick(1, alphabet.size());
    for (auto& s : config.state_index) s = static_cast<std::uint8_t>(pick(rng));
    return config;
}

/// Cycles one element's state k -> (k mod K) + 1; a toggle for K = 2.
inline ReflectionConfig switch_element(ReflectionConfig config, int m_index, int k_states) {
    const int k = config.state(m_index);
    config.set_state(m_index, (k % k_states) + 1);
    return config;
}

inline ReflectionConfig flip_subgroup(ReflectionConfig config, const std::vector<int>& subgroup,
                                      int k_states) {
    for (int m : subgroup) config = switch_element(std::move(config), m, k_states);
    return config;
}

enum class TerminationMode { fixed_budget, early_exit };

struct ControllerParams {
    double pts_dbm = kNegInfDbm;
    int max_iterations = 100;
    TerminationMode mode = TerminationMode::fixed_budget;
    int timeout_ms = 1000;
};

struct TrialRecord {
    int iteration = 0;   // 1-based
    int group_set = 0;   // 1-based
    int subgroup = 0;    // 1-based
    double trial_power_dbm = 0.0;
    bool accepted = false;
};

struct AdaptationReport {
    std::vector<TrialRecord> trials;
    ReflectionConfig final_config;
    double final_power_dbm = 0.0;
    int iterations_used = 0;
    bool triggered = false;
};

/// The physically applied RIS configuration, shared by both endpoints: the
/// controller writes it, the UE's received power depends on it.
struct AirInterface {
    ReflectionConfig applied;
};

/// RIS-side endpoint. Holds the accepted configuration and the subgroup
/// cursor; consumes only the single feedback bit per trial and never sees a
/// power value.
class ControllerEndpoint {
public:
    ControllerEndpoint(ReflectionConfig initial, const GroupSchedule* schedule, int k_states)
        : accepted_(std::move(initial)), trial_(accepted_), schedule_(schedule), k_states_(k_states) {
        if (k_states < 2) throw std::invalid_argument("need K >= 2");
    }

    const ReflectionConfig& accepted_config() const { return accepted_; }

    /// Advances the subgroup cursor, applies the flipped trial configuration,
    /// and announces it. Returns the (group set, subgroup) tried, 1-based.
    std::pair<int, int> apply_next_trial(AirInterface& air, LinkTransport& link) {
        const auto [j, l] = schedule_->locate(cursor_++);
        trial_ = flip_subgroup(accepted_, schedule_->subgroup(j, l), k_states_);
        air.applied = trial_;
        ++seq_;
        link.ctrl_send(encode(TrialMsg{seq_}));
        return {j, l};
    }

    /// Blocks for the feedback bit answering the current trial. Stale,
    /// duplicate, and malformed frames are discarded.
    bool await_feedback(LinkTransport& link, int timeout_ms) {
        Frame frame;
        while (link.ctrl_recv(frame, timeout_ms)) {
            DecodedMsg msg;
            try {
                msg = decode(frame);
            } catch (const protocol_error&) {
                continue;
            }
            if (msg.kind != kKindFeedback || msg.seq != seq_) continue;
            return msg.degraded;
        }
        throw transport_error("timed out waiting for feedback on trial " + std::to_string(seq_));
    }

    /// Reverts the trial on a degraded bit, retains it otherwise.
    void resolve(AirInterface& air, bool degraded) {
        if (degraded)
            air.applied = accepted_;
        else
            accepted_ = trial_;
    }

    /// Re-applies the accepted configuration, e.g. after an aborted trial.
    void restore(AirInterface& air) const { air.applied = accepted_; }

private:
    ReflectionConfig accepted_;
    ReflectionConfig trial_;
    const GroupSchedule* schedule_;
    int k_states_;
    int cursor_ = 0;
    std::uint32_t seq_ = 0;
};

/// UE-side endpoint. Owns the power oracle and the accepted-power reference;
/// answers each trial with the comparison bit. After a retained trial the
/// reference moves to the trial's power, after a reverted one it stays.
class UeEndpoint {
public:
    UeEndpoint(PowerFn power_fn, double initial_power_dbm)
        : power_fn_(std::move(power_fn)), accepted_dbm_(initial_power_dbm) {}

    /// Handles at most one pending trial announcement; duplicates and stale
    /// sequence numbers are discarded without a reply.
    bool pump(LinkTransport& link, const AirInterface& air, int timeout_ms) {
        Frame frame;
        while (link.ue_recv(frame, timeout_ms)) {
            DecodedMsg msg;
            try {
                msg = decode(frame);
            } catch (const protocol_error&) {
                continue;
            }
            if (msg.kind != kKindTrialApplied || msg.seq <= last_seq_) continue;
            last_seq_ = msg.seq;
            last_trial_dbm_ = power_fn_(air.applied);
            const bool degraded = last_trial_dbm_ < accepted_dbm_;
            if (!degraded) accepted_dbm_ = last_trial_dbm_;
            link.ue_send(encode(FeedbackMsg{msg.seq, degraded}));
            return true;
        }
        return false;
    }

    double accepted_power_dbm() const { return accepted_dbm_; }
    double last_trial_power_dbm() const { return last_trial_dbm_; }

private:
    PowerFn power_fn_;
    double accepted_dbm_;
    double last_trial_dbm_ = 0.0;
    std::uint32_t last_seq_ = 0;
};

/// Runs the trial/feedback loop between two constructed endpoints over one
/// transport, single-threaded: the controller announces, the UE is pumped,
/// the controller resolves. A missing feedback frame aborts with
/// transport_error after restoring the accepted configuration.
inline AdaptationReport run_session(LinkTransport& link, ControllerEndpoint& ctrl, UeEndpoint& ue,
                                    AirInterface& air, const ControllerParams& params) {
    if (params.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    AdaptationReport report;
    report.triggered = true;
    for (int i = 1; i <= params.max_iterations; ++i) {
        const auto [j, l] = ctrl.apply_next_trial(air, link);
        ue.pump(link, air, params.timeout_ms);
        bool degraded = false;
        try {
            degraded = ctrl.await_feedback(link, params.timeout_ms);
        } catch (const transport_error&) {
            ctrl.restore(air);
            throw;
        }
        ctrl.resolve(air, degraded);
        report.trials.push_back({i, j, l, ue.last_trial_power_dbm(), !degraded});
        report.iterations_used = i;
        if (params.mode == TerminationMode::early_exit && ue.accepted_power_dbm() > params.pts_dbm)
            break;
    }
    report.final_config = ctrl.accepted_config();
    report.final_power_dbm = ue.accepted_power_dbm();
    return report;
}

/// Single-bit-feedback adaptation. Measures once; below pts_dbm it runs the
/// subgroup-flip session from the given configuration, otherwise it returns
/// untriggered with zero iterations.
inline AdaptationReport iterative_adapt(const ReflectionConfig& initial, const PowerFn& power_fn,
                                        const GroupSchedule& schedule, int k_states,
                                        const ControllerParams& params, LinkTransport& link) {
    if (params.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    const double p0 = power_fn(initial);
    if (!(p0 < params.pts_dbm)) {
        AdaptationReport report;
        report.final_config = initial;
        report.final_power_dbm = p0;
        return report;
    }
    ControllerEndpoint ctrl(initial, &schedule, k_states);
    UeEndpoint ue(power_fn, p0);
    AirInterface air{initial};
    return run_session(link, ctrl, ue, air, params);
}

struct McResult {
    ReflectionConfig best_config;
    double best_power_dbm = kNegInfDbm;
    std::vector<double> trace;  // running maximum
};

/// Full-knowledge benchmark: best of `iterations` i.i.d. random
/// configurations, each scored with the exact channel model.
inline McResult mc_optimize(const Scenario& scenario, const RisLayout& layout,
                            const ReflectionAlphabet& alphabet, const PatternModel& pattern,
                            int iterations, std::mt19937_64& rng) {
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    McResult result;
    result.trace.reserve(static_cast<std::size_t>(iterations));
    for (int i = 0; i < iterations; ++i) {
        ReflectionConfig config = random_config(layout.size(), alphabet, rng);
        const double p = received_power_dbm(
            scenario, channel_coefficient(scenario, layout, config, alphabet, pattern));
        if (p > result.best_power_dbm) {
            result.best_power_dbm = p;
            result.best_config = std::move(config);
        }
        result.trace.push_back(result.best_power_dbm);
    }
    return result;
}

struct ExhaustiveResult {
    ReflectionConfig best_config;
    double best_power_dbm = kNegInfDbm;
};

inline constexpr std::uint64_t kEnumerationGuard = 1ull << 20;

/// Enumerates all K^M configurations in lexicographic order (element 1 most
/// significant) and returns the power maximizer; ties keep the
/// lexicographically smallest configuration.
inline ExhaustiveResult exhaustive_optimize(const Scenario& scenario, const RisLayout& layout,
                                            const ReflectionAlphabet& alphabet,
                                            const PatternModel& pattern) {
    const int m = layout.size();
    const int k = alphabet.size();
    std::uint64_t total = 1;
    for (int i = 0; i < m; ++i) {
        total *= static_cast<std::uint64_t>(k);
        if (total > kEnumerationGuard)
            throw std::invalid_argument("K^M exceeds the enumeration guard of 2^20");
    }

    ExhaustiveResult result;
    ReflectionConfig config = uniform_config(m, 1);
    for (std::uint64_t n = 0; n < total; ++n) {
        const double p = received_power_dbm(
            scenario, channel_coefficient(scenario, layout, config, alphabet, pattern));
        if (p > result.best_power_dbm) {
            result.best_power_dbm = p;
            result.best_config = config;
        }
        // Odometer increment on the least significant (last) element.
        for (int pos = m; pos >= 1; --pos) {
            const int s = config.state(pos);
            if (s < k) {
                config.set_state(pos, s + 1);
                break;
            }
            config.set_state(pos, 1);
        }
    }
    return result;
}

/// Power oracle over the applied configuration; captures every argument by
/// reference, so keep them alive for the oracle's lifetime. Scenario edits
/// (e.g. moving the UE) are picked up by subsequent calls.
inline PowerFn make_power_oracle(const Scenario& scenario, const RisLayout& layout,
                                 const ReflectionAlphabet& alphabet, const PatternModel& pattern,
                                 const NoiseModel& noise, int n_avg, std::mt19937_64& rng) {
    return [&scenario, &layout, &alphabet, &pattern, noise, n_avg, &rng](const ReflectionConfig& c) {
        return measure_power(scenario, layout, c, alphabet, pattern, noise, n_avg, rng);
    };
}

}  // namespace hexris
