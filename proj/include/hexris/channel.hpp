#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "hexris/common.hpp"
#include "hexris/geometry.hpp"

namespace hexris {

/// Propagation scenario: one BS, one UE, the RIS plane at x = 0.
struct Scenario {
    double frequency_hz = 0.0;
    Vec3 bs_position_a;
    Vec3 ue_position_b;
    double bs_power_dbm = 0.0;
    double noise_power_dbm = -90.0;
    double bs_gain_db = 0.0;
    double ue_gain_db = 0.0;

    double wavelength() const {
        if (frequency_hz <= 0.0) throw std::invalid_argument("frequency must be positive");
        return kSpeedOfLight / frequency_hz;
    }
};

struct AlphabetState {
    double amplitude = 0.0;   // linear
    double phase_rad = 0.0;

    std::complex<double> gamma() const { return std::polar(amplitude, phase_rad); }

    friend bool operator==(const AlphabetState& a, const AlphabetState& b) {
        return a.amplitude == b.amplitude && a.phase_rad == b.phase_rad;
    }
};

/// Ordered set of K switchable reflection coefficients.
struct ReflectionAlphabet {
    std::vector<AlphabetState> states;

    explicit ReflectionAlphabet(std::vector<AlphabetState> s) : states(std::move(s)) {
        if (states.size() < 2) throw std::invalid_argument("alphabet needs K >= 2 states");
        for (std::size_t i = 0; i < states.size(); ++i)
            for (std::size_t j = i + 1; j < states.size(); ++j)
                if (states[i] == states[j]) throw std::invalid_argument("alphabet states must be distinct");
    }

    int size() const { return static_cast<int>(states.size()); }

    const AlphabetState& state(int k) const {
        if (k < 1 || k > size()) throw std::out_of_range("alphabet state out of range");
        return states[static_cast<std::size_t>(k - 1)];
    }
};

/// The 1-bit active alphabet: on = amplified reflection, off = absorbing.
inline ReflectionAlphabet active_alphabet(double on_amplitude = 1.25, double on_phase_rad = 0.0,
                                          double off_amplitude = 0.0, double off_phase_rad = 0.0) {
    return ReflectionAlphabet({{on_amplitude, on_phase_rad}, {off_amplitude, off_phase_rad}});
}

/// Per-element 1-based state index into an alphabet.
struct ReflectionConfig {
    std::vector<std::uint8_t> state_index;

    int size() const { return static_cast<int>(state_index.size()); }

    std::uint8_t state(int m) const {
        if (m < 1 || m > size()) throw std::out_of_range("element index out of range");
        return state_index[static_cast<std::size_t>(m - 1)];
    }

    void set_state(int m, int k) {
        if (m < 1 || m > size()) throw std::out_of_range("element index out of range");
        state_index[static_cast<std::size_t>(m - 1)] = static_cast<std::uint8_t>(k);
    }

    friend bool operator==(const ReflectionConfig& a, const ReflectionConfig& b) {
        return a.state_index == b.state_index;
    }
};

inline ReflectionConfig uniform_config(int m, int k) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    ReflectionConfig c;
    c.state_index.assign(static_cast<std::size_t>(m), static_cast<std::uint8_t>(k));
    return c;
}

/// Combined antenna pattern model for F^c. The isotropic variant returns 1;
/// the cosine-exponent variant multiplies cos^q terms for the BS antenna,
/// the element's receive and transmit hops, and the UE antenna, clamped at 0
/// behind the respective plane.
struct PatternModel {
    enum class Variant { isotropic, cosine_exponent };

    Variant variant = Variant::isotropic;
    double q_bs = 0.0;
    double q_ris = 0.0;
    double q_ue = 0.0;
    Vec3 bs_boresight{1.0, 0.0, 0.0};
    Vec3 ue_boresight{1.0, 0.0, 0.0};
};

inline PatternModel isotropic_pattern() { return {}; }

inline double combined_pattern(const Vec3& a, const Vec3& b, const Vec3& u_m,
                               const PatternModel& model) {
    const Vec3 to_a = a - u_m;
    const Vec3 to_b = b - u_m;
    const double da = norm(to_a);
    const double db = norm(to_b);
    if (da <= 0.0 || db <= 0.0) throw std::invalid_argument("endpoint coincides with an element");
    if (model.variant == PatternModel::Variant::isotropic) return 1.0;

    const Vec3 ris_normal{1.0, 0.0, 0.0};
    const auto lobe = [](double cosang, double q) {
        if (cosang <= 0.0) return 0.0;
        return std::pow(cosang, q);
    };
    const double c_bs = dot(normalized(model.bs_boresight), {-to_a.x / da, -to_a.y / da, -to_a.z / da});
    const double c_ue = dot(normalized(model.ue_boresight), {-to_b.x / db, -to_b.y / db, -to_b.z / db});
    const double c_rx = dot(ris_normal, {to_a.x / da, to_a.y / da, to_a.z / da});
    const double c_tx = dot(ris_normal, {to_b.x / db, to_b.y / db, to_b.z / db});
    return lobe(c_bs, model.q_bs) * lobe(c_rx, model.q_ris) * lobe(c_tx, model.q_ris) *
           lobe(c_ue, model.q_ue);
}

namespace detail {

template <typename GammaFn>
std::complex<double> channel_sum(const Scenario& scenario, const RisLayout& layout,
                                 GammaFn&& gamma_of, const PatternModel& pattern) {
    const double lambda = scenario.wavelength();
    const double gain_lin = db_to_linear(scenario.bs_gain_db) * db_to_linear(scenario.ue_gain_db);

    std::complex<double> sum{0.0, 0.0};
    const int m_count = layout.size();
    for (int m = 1; m <= m_count; ++m) {
        const Vec3& u = layout.element(m);
        const double da = distance(scenario.bs_position_a, u);
        const double db = distance(scenario.ue_position_b, u);
        if (da <= 0.0 || db <= 0.0) throw std::invalid_argument("endpoint coincides with an element");
        const std::complex<double> gamma = gamma_of(m);
        if (gamma == std::complex<double>{0.0, 0.0}) continue;
        const double f = pattern.variant == PatternModel::Variant::isotropic
                             ? 1.0
                             : combined_pattern(scenario.bs_position_a, scenario.ue_position_b, u,
                                                pattern);
        const double phase = -2.0 * kPi * (da + db) / lambda;
        sum += gamma * std::sqrt(f) * std::polar(1.0, phase) / (da * db);
    }
    const double amp = std::sqrt(gain_lin) * layout.element_dy * layout.element_dz / (4.0 * kPi);
    return amp * sum;
}

}  // namespace detail

/// Frequency-flat channel coefficient of the RIS bounce path: amplitude
/// prefactor sqrt(G_bs G_ue) dy dz / 4pi times the per-element sum of
/// gamma_m sqrt(F^c_m) exp(-j 2pi (|a-u_m|+|b-u_m|)/lambda) / (|a-u_m||b-u_m|),
/// summed in ascending element order for bit reproducibility.
inline std::complex<double> channel_coefficient(const Scenario& scenario, const RisLayout& layout,
                                                const ReflectionConfig& config,
                                                const ReflectionAlphabet& alphabet,
                                                const PatternModel& pattern) {
    if (config.size() != layout.size())
        throw std::invalid_argument("config length does not match layout");
    return detail::channel_sum(
        scenario, layout,
        [&](int m) { return alphabet.state(config.state(m)).gamma(); }, pattern);
}

/// Channel coefficient with one reflection coefficient applied to all
/// elements; used for off-state baselines.
inline std::complex<double> channel_coefficient_uniform(const Scenario& scenario,
                                                        const RisLayout& layout,
                                                        const AlphabetState& state,
                                                        const PatternModel& pattern) {
    return detail::channel_sum(
        scenario, layout, [&](int) { return state.gamma(); }, pattern);
}

/// Received power in dBm: linear-domain P_bs |h|^2 + P_n, re-expressed in dBm.
inline double received_power_dbm(const Scenario& scenario, std::complex<double> h) {
    const double p_mw = dbm_to_mw(scenario.bs_power_dbm) * std::norm(h) +
                        dbm_to_mw(scenario.noise_power_dbm);
    return mw_to_dbm(p_mw);
}

struct NoiseModel {
    enum class Kind { none, gaussian_db };

    Kind kind = Kind::none;
    double sigma_db = 0.0;
};

inline NoiseModel no_noise() { return {}; }

inline NoiseModel gaussian_db_noise(double sigma_db) {
    return {NoiseModel::Kind::gaussian_db, sigma_db};
}

/// Mean of n_avg observations of the received power. Noiseless observations
/// are exact and draw nothing from the rng.
inline double measure_power(const Scenario& scenario, const RisLayout& layout,
                            const ReflectionConfig& config, const ReflectionAlphabet& alphabet,
                            const PatternModel& pattern, const NoiseModel& noise, int n_avg,
                            std::mt19937_64& rng) {
    if (n_avg < 1) throw std::invalid_argument("n_avg must be >= 1");
    const double exact =
        received_power_dbm(scenario, channel_coefficient(scenario, layout, config, alphabet, pattern));
    if (noise.kind == NoiseModel::Kind::none || noise.sigma_db <= 0.0) return exact;

    std::normal_distribution<double> jitter(0.0, noise.sigma_db);
    double acc = 0.0;
    for (int i = 0; i < n_avg; ++i) acc += exact + jitter(rng);
    return acc / static_cast<double>(n_avg);
}

}  // namespace hexris
