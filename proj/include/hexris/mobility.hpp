#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hexris/control.hpp"

namespace hexris {

/// Rectangular observation grid; position (ix, iy) = origin + ix step x_axis
/// + iy step y_axis.
struct AoiGrid {
    Vec3 origin;
    Vec3 x_axis{1.0, 0.0, 0.0};
    Vec3 y_axis{0.0, 1.0, 0.0};
    int nx = 1;
    int ny = 1;
    double step = 0.02;

    Vec3 position(int ix, int iy) const {
        if (ix < 0 || ix >= nx || iy < 0 || iy >= ny)
            throw std::out_of_range("grid index out of range");
        return origin + (ix * step) * x_axis + (iy * step) * y_axis;
    }

    int count() const { return nx * ny; }

    friend bool operator==(const AoiGrid& a, const AoiGrid& b) {
        return a.origin == b.origin && a.x_axis == b.x_axis && a.y_axis == b.y_axis &&
               a.nx == b.nx && a.ny == b.ny && a.step == b.step;
    }
};

inline AoiGrid build_aoi_grid(const Vec3& origin, const Vec3& x_axis, const Vec3& y_axis, int nx,
                              int ny, double step) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("grid needs nx, ny >= 1");
    if (step <= 0.0) throw std::invalid_argument("grid step must be positive");
    if (std::abs(norm(x_axis) - 1.0) > 1e-9 || std::abs(norm(y_axis) - 1.0) > 1e-9)
        throw std::invalid_argument("grid axes must be unit vectors");
    return {origin, x_axis, y_axis, nx, ny, step};
}

struct PositionRecord {
    int ix = 0;
    int iy = 0;
    Vec3 b;
    double p_ue_dbm = 0.0;
    int iterations_used = 0;
    bool triggered = false;
    std::uint64_t config_hash = 0;  // carried configuration after this position
};

struct SweepMeta {
    std::uint64_t seed = 0;
    double pts_dbm = kNegInfDbm;
    int max_iterations = 0;
    TerminationMode mode = TerminationMode::fixed_budget;
};

struct SweepResult {
    AoiGrid grid;
    SweepMeta meta;
    std::vector<PositionRecord> records;  // raster order: outer ix, inner iy
    ReflectionConfig final_config;
};

namespace detail {

inline std::uint64_t config_hash(const ReflectionConfig& config) {
    return fnv1a64(config.state_index.data(), config.state_index.size());
}

}  // namespace detail

/// Visits the grid in raster order with the RIS configuration carried across
/// positions. Positions measuring below pts_dbm run the adaptation session
/// and mutate the carried configuration; the rest record and move on.
inline SweepResult run_sweep(const AoiGrid& grid, const Scenario& scenario_template,
                             const RisLayout& layout, const ReflectionAlphabet& alphabet,
                             const PatternModel& pattern, const GroupSchedule& schedule,
                             const ControllerParams& params, const NoiseModel& noise, int n_avg,
                             std::uint64_t seed, LinkTransport& link) {
    SweepResult out;
    out.grid = grid;
    out.meta = {seed, params.pts_dbm, params.max_iterations, params.mode};
    out.records.reserve(static_cast<std::size_t>(grid.count()));

    std::mt19937_64 rng(seed);
    ReflectionConfig config = random_config(layout.size(), alphabet, rng);
    Scenario scenario = scenario_template;
    const PowerFn oracle = make_power_oracle(scenario, layout, alphabet, pattern, noise, n_avg, rng);

    for (int ix = 0; ix < grid.nx; ++ix) {
        for (int iy = 0; iy < grid.ny; ++iy) {
            scenario.ue_position_b = grid.position(ix, iy);
            try {
                AdaptationReport report =
                    iterative_adapt(config, oracle, schedule, alphabet.size(), params, link);
                config = report.final_config;
                out.records.push_back({ix, iy, scenario.ue_position_b, report.final_power_dbm,
                                       report.iterations_used, report.triggered,
                                       detail::config_hash(config)});
            } catch (const transport_error& e) {
                throw transport_error("position (" + std::to_string(ix) + "," + std::to_string(iy) +
                                      "): " + e.what());
            }
        }
    }
    out.final_config = config;
    return out;
}

/// Evaluates every position under one constant reflection state; the RIS-off
/// reference when the state has zero amplitude.
inline SweepResult baseline_sweep(const AoiGrid& grid, const Scenario& scenario_template,
                                  const RisLayout& layout, const PatternModel& pattern,
                                  const AlphabetState& off_state) {
    SweepResult out;
    out.grid = grid;
    out.records.reserve(static_cast<std::size_t>(grid.count()));
    out.final_config = uniform_config(layout.size(), 1);

    Scenario scenario = scenario_template;
    for (int ix = 0; ix < grid.nx; ++ix) {
        for (int iy = 0; iy < grid.ny; ++iy) {
            scenario.ue_position_b = grid.position(ix, iy);
            const auto h = channel_coefficient_uniform(scenario, layout, off_state, pattern);
            out.records.push_back({ix, iy, scenario.ue_position_b, received_power_dbm(scenario, h),
                                   0, false, 0});
        }
    }
    return out;
}

struct GainCell {
    int ix = 0;
    int iy = 0;
    double gain_db = 0.0;
};

struct HistBin {
    double bin_left_dbm = 0.0;
    long long count = 0;
};

struct SweepSummary {
    double min_dbm = 0.0;
    double median_dbm = 0.0;
    double max_dbm = 0.0;
};

struct SweepStats {
    std::vector<GainCell> gains;  // empty when no baseline was given
    std::vector<HistBin> histogram;
    SweepSummary summary;
    double fraction_below_pts = 0.0;
};

inline void require_same_grid(const SweepResult& a, const SweepResult& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("sweep results use different grids");
}

inline std::vector<GainCell> gain_map(const SweepResult& adapted, const SweepResult& baseline) {
    require_same_grid(adapted, baseline);
    if (adapted.records.size() != baseline.records.size())
        throw std::invalid_argument("sweep results have different record counts");
    std::vector<GainCell> gains;
    gains.reserve(adapted.records.size());
    for (std::size_t i = 0; i < adapted.records.size(); ++i) {
        const auto& r = adapted.records[i];
        const auto& s = baseline.records[i];
        if (r.ix != s.ix || r.iy != s.iy)
            throw std::invalid_argument("sweep results are not aligned");
        gains.push_back({r.ix, r.iy, r.p_ue_dbm - s.p_ue_dbm});
    }
    return gains;
}

/// 1 dB bins, left edge at floor(p); contiguous from the minimum to the
/// maximum observed bin, zero-count bins included.
inline std::vector<HistBin> power_histogram_1db(const SweepResult& result) {
    if (result.records.empty()) return {};
    std::map<long long, long long> counts;
    for (const auto& r : result.records) counts[static_cast<long long>(std::floor(r.p_ue_dbm))]++;
    std::vector<HistBin> bins;
    for (long long b = counts.begin()->first; b <= counts.rbegin()->first; ++b) {
        const auto it = counts.find(b);
        bins.push_back({static_cast<double>(b), it == counts.end() ? 0 : it->second});
    }
    return bins;
}

inline SweepSummary summarize(const SweepResult& result) {
    if (result.records.empty()) throw std::invalid_argument("empty sweep result");
    std::vector<double> powers;
    powers.reserve(result.records.size());
    for (const auto& r : result.records) powers.push_back(r.p_ue_dbm);
    std::sort(powers.begin(), powers.end());
    const std::size_t n = powers.size();
    const double median =
        n % 2 == 1 ? powers[n / 2] : 0.5 * (powers[n / 2 - 1] + powers[n / 2]);
    return {powers.front(), median, powers.back()};
}

inline double fraction_below(const SweepResult& result, double pts_dbm) {
    if (result.records.empty()) throw std::invalid_argument("empty sweep result");
    long long below = 0;
    for (const auto& r : result.records)
        if (r.p_ue_dbm < pts_dbm) ++below;
    return static_cast<double>(below) / static_cast<double>(result.records.size());
}

/// All records of one constant-x row, in iy order.
inline std::vector<PositionRecord> row_cut(const SweepResult& result, int ix) {
    if (ix < 0 || ix >= result.grid.nx) throw std::out_of_range("row index out of range");
    std::vector<PositionRecord> row;
    for (const auto& r : result.records)
        if (r.ix == ix) row.push_back(r);
    return row;
}

inline SweepStats analyze(const SweepResult& adapted, const SweepResult* baseline, double pts_dbm) {
    SweepStats stats;
    if (baseline) stats.gains = gain_map(adapted, *baseline);
    stats.histogram = power_histogram_1db(adapted);
    stats.summary = summarize(adapted);
    stats.fraction_below_pts = fraction_below(adapted, pts_dbm);
    return stats;
}

}  // namespace hexris
