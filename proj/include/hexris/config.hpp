#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hexris/channel.hpp"
#include "hexris/control.hpp"
#include "hexris/io.hpp"
#include "hexris/mobility.hpp"
#include "hexris/schedule.hpp"

namespace hexris {

/// A full run description as it appears in the JSON config file. Values stay
/// in their config-native units (GHz, mm, degrees); the make_* factories
/// below convert.
struct RunConfig {
    // scenario
    double frequency_ghz = 23.8;
    Vec3 bs_position_m{1.5, -1.09, 0.0};
    Vec3 ue_position_m{0.92, 0.28, 0.0};
    double bs_power_dbm = 10.0;
    double noise_power_dbm = -90.0;
    double bs_gain_db = 19.0;
    double ue_gain_db = 3.2;

    // layout
    int n_rings = 6;
    double spacing_mm = 8.7;
    double element_dy_mm = 6.6;
    double element_dz_mm = 6.6;
    std::string positions_csv;  // when set, overrides the generated lattice

    // schedule
    std::string schedule_kind = "paper";  // paper | single_element | file
    std::string schedule_path;

    // alphabet
    double on_amplitude = 1.25;
    double on_phase_deg = 0.0;
    double off_amplitude = 0.0;
    double off_phase_deg = 0.0;

    // pattern
    std::string pattern_variant = "isotropic";  // isotropic | cosine_exponent
    double q_bs = 0.0;
    double q_ris = 0.0;
    double q_ue = 0.0;
    Vec3 bs_boresight{-1.0, 0.0, 0.0};
    Vec3 ue_boresight{-1.0, 0.0, 0.0};

    // grid
    Vec3 grid_origin_m{0.3, 0.0, 0.0};
    Vec3 grid_x_axis{1.0, 0.0, 0.0};
    Vec3 grid_y_axis{0.0, 1.0, 0.0};
    int nx = 46;
    int ny = 30;
    double step_m = 0.02;

    // controller
    double pts_dbm = -70.0;
    int max_iterations = 100;
    std::string termination_mode = "early_exit";  // fixed_budget | early_exit

    // measurement
    int n_avg = 5;
    double noise_sigma_db = 0.0;

    // transport
    std::string transport_kind = "inproc";  // inproc | udp
    std::string transport_host = "127.0.0.1";
    int transport_port = 0;
    int transport_timeout_ms = 1000;

    std::vector<std::uint64_t> seeds;
    std::string output_dir = "out";
};

namespace detail {

inline Vec3 vec3_from(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 3)
        throw std::invalid_argument(std::string(what) + " must be a [x, y, z] array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline nlohmann::ordered_json vec3_to(const Vec3& v) {
    return nlohmann::ordered_json::array({v.x, v.y, v.z});
}

inline void require_positive(double v, const char* key) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(key) + " must be positive");
}

inline void require_one_of(const std::string& v, std::initializer_list<const char*> allowed,
                           const char* key) {
    for (const char* a : allowed)
        if (v == a) return;
    throw std::invalid_argument(std::string(key) + " has unsupported value: " + v);
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
    RunConfig cfg;
    if (j.contains("scenario")) {
        const auto& s = j.at("scenario");
        cfg.frequency_ghz = s.value("frequency_ghz", cfg.frequency_ghz);
        if (s.contains("bs_position_m")) cfg.bs_position_m = detail::vec3_from(s.at("bs_position_m"), "bs_position_m");
        if (s.contains("ue_position_m")) cfg.ue_position_m = detail::vec3_from(s.at("ue_position_m"), "ue_position_m");
        cfg.bs_power_dbm = s.value("bs_power_dbm", cfg.bs_power_dbm);
        cfg.noise_power_dbm = s.value("noise_power_dbm", cfg.noise_power_dbm);
        cfg.bs_gain_db = s.value("bs_gain_db", cfg.bs_gain_db);
        cfg.ue_gain_db = s.value("ue_gain_db", cfg.ue_gain_db);
    }
    if (j.contains("layout")) {
        const auto& l = j.at("layout");
        cfg.n_rings = l.value("n_rings", cfg.n_rings);
        cfg.spacing_mm = l.value("spacing_mm", cfg.spacing_mm);
        cfg.element_dy_mm = l.value("element_dy_mm", cfg.element_dy_mm);
        cfg.element_dz_mm = l.value("element_dz_mm", cfg.element_dz_mm);
        cfg.positions_csv = l.value("positions_csv", cfg.positions_csv);
    }
    if (j.contains("schedule")) {
        const auto& s = j.at("schedule");
        cfg.schedule_kind = s.value("kind", cfg.schedule_kind);
        cfg.schedule_path = s.value("path", cfg.schedule_path);
    }
    if (j.contains("alphabet")) {
        const auto& a = j.at("alphabet");
        cfg.on_amplitude = a.value("on_amplitude", cfg.on_amplitude);
        cfg.on_phase_deg = a.value("on_phase_deg", cfg.on_phase_deg);
        cfg.off_amplitude = a.value("off_amplitude", cfg.off_amplitude);
        cfg.off_phase_deg = a.value("off_phase_deg", cfg.off_phase_deg);
    }
    if (j.contains("pattern")) {
        const auto& p = j.at("pattern");
        cfg.pattern_variant = p.value("variant", cfg.pattern_variant);
        cfg.q_bs = p.value("q_bs", cfg.q_bs);
        cfg.q_ris = p.value("q_ris", cfg.q_ris);
        cfg.q_ue = p.value("q_ue", cfg.q_ue);
        if (p.contains("bs_boresight")) cfg.bs_boresight = detail::vec3_from(p.at("bs_boresight"), "bs_boresight");
        if (p.contains("ue_boresight")) cfg.ue_boresight = detail::vec3_from(p.at("ue_boresight"), "ue_boresight");
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (g.contains("origin_m")) cfg.grid_origin_m = detail::vec3_from(g.at("origin_m"), "origin_m");
        if (g.contains("x_axis")) cfg.grid_x_axis = detail::vec3_from(g.at("x_axis"), "x_axis");
        if (g.contains("y_axis")) cfg.grid_y_axis = detail::vec3_from(g.at("y_axis"), "y_axis");
        cfg.nx = g.value("nx", cfg.nx);
        cfg.ny = g.value("ny", cfg.ny);
        cfg.step_m = g.value("step_m", cfg.step_m);
    }
    if (j.contains("controller")) {
        const auto& c = j.at("controller");
        cfg.pts_dbm = c.value("pts_dbm", cfg.pts_dbm);
        cfg.max_iterations = c.value("max_iterations", cfg.max_iterations);
        cfg.termination_mode = c.value("termination_mode", cfg.termination_mode);
    }
    if (j.contains("measurement")) {
        const auto& m = j.at("measurement");
        cfg.n_avg = m.value("n_avg", cfg.n_avg);
        cfg.noise_sigma_db = m.value("noise_sigma_db", cfg.noise_sigma_db);
    }
    if (j.contains("transport")) {
        const auto& t = j.at("transport");
        cfg.transport_kind = t.value("kind", cfg.transport_kind);
        cfg.transport_host = t.value("host", cfg.transport_host);
        cfg.transport_port = t.value("port", cfg.transport_port);
        cfg.transport_timeout_ms = t.value("timeout_ms", cfg.transport_timeout_ms);
    }
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    cfg.output_dir = j.value("output_dir", cfg.output_dir);

    detail::require_positive(cfg.frequency_ghz, "frequency_ghz");
    detail::require_positive(cfg.spacing_mm, "spacing_mm");
    detail::require_positive(cfg.element_dy_mm, "element_dy_mm");
    detail::require_positive(cfg.element_dz_mm, "element_dz_mm");
    detail::require_positive(cfg.step_m, "step_m");
    if (cfg.n_rings < 0) throw std::invalid_argument("n_rings must be >= 0");
    if (cfg.nx < 1 || cfg.ny < 1) throw std::invalid_argument("grid needs nx, ny >= 1");
    if (cfg.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (cfg.n_avg < 1) throw std::invalid_argument("n_avg must be >= 1");
    if (cfg.noise_sigma_db < 0.0) throw std::invalid_argument("noise_sigma_db must be >= 0");
    if (cfg.on_amplitude < 0.0 || cfg.off_amplitude < 0.0)
        throw std::invalid_argument("alphabet amplitudes must be >= 0");
    if (cfg.transport_timeout_ms < 1) throw std::invalid_argument("timeout_ms must be >= 1");
    if (cfg.transport_port < 0 || cfg.transport_port > 65535)
        throw std::invalid_argument("port must be in [0, 65535]");
    detail::require_one_of(cfg.schedule_kind, {"paper", "single_element", "file"}, "schedule.kind");
    detail::require_one_of(cfg.pattern_variant, {"isotropic", "cosine_exponent"}, "pattern.variant");
    detail::require_one_of(cfg.termination_mode, {"fixed_budget", "early_exit"}, "termination_mode");
    detail::require_one_of(cfg.transport_kind, {"inproc", "udp"}, "transport.kind");
    return cfg;
}

/// Canonical serialization: every key, fixed order. Parsing the output
/// reproduces the config exactly.
inline nlohmann::ordered_json to_run_config_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["scenario"] = {{"frequency_ghz", cfg.frequency_ghz},
                     {"bs_position_m", detail::vec3_to(cfg.bs_position_m)},
                     {"ue_position_m", detail::vec3_to(cfg.ue_position_m)},
                     {"bs_power_dbm", cfg.bs_power_dbm},
                     {"noise_power_dbm", cfg.noise_power_dbm},
                     {"bs_gain_db", cfg.bs_gain_db},
                     {"ue_gain_db", cfg.ue_gain_db}};
    j["layout"] = {{"n_rings", cfg.n_rings},
                   {"spacing_mm", cfg.spacing_mm},
                   {"element_dy_mm", cfg.element_dy_mm},
                   {"element_dz_mm", cfg.element_dz_mm},
                   {"positions_csv", cfg.positions_csv}};
    j["schedule"] = {{"kind", cfg.schedule_kind}, {"path", cfg.schedule_path}};
    j["alphabet"] = {{"on_amplitude", cfg.on_amplitude},
                     {"on_phase_deg", cfg.on_phase_deg},
                     {"off_amplitude", cfg.off_amplitude},
                     {"off_phase_deg", cfg.off_phase_deg}};
    j["pattern"] = {{"variant", cfg.pattern_variant},
                    {"q_bs", cfg.q_bs},
                    {"q_ris", cfg.q_ris},
                    {"q_ue", cfg.q_ue},
                    {"bs_boresight", detail::vec3_to(cfg.bs_boresight)},
                    {"ue_boresight", detail::vec3_to(cfg.ue_boresight)}};
    j["grid"] = {{"origin_m", detail::vec3_to(cfg.grid_origin_m)},
                 {"x_axis", detail::vec3_to(cfg.grid_x_axis)},
                 {"y_axis", detail::vec3_to(cfg.grid_y_axis)},
                 {"nx", cfg.nx},
                 {"ny", cfg.ny},
                 {"step_m", cfg.step_m}};
    j["controller"] = {{"pts_dbm", cfg.pts_dbm},
                       {"max_iterations", cfg.max_iterations},
                       {"termination_mode", cfg.termination_mode}};
    j["measurement"] = {{"n_avg", cfg.n_avg}, {"noise_sigma_db", cfg.noise_sigma_db}};
    j["transport"] = {{"kind", cfg.transport_kind},
                      {"host", cfg.transport_host},
                      {"port", cfg.transport_port},
                      {"timeout_ms", cfg.transport_timeout_ms}};
    j["seeds"] = cfg.seeds;
    j["output_dir"] = cfg.output_dir;
    return j;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    return parse_run_config(nlohmann::json::parse(is));
}

inline std::uint64_t config_hash(const RunConfig& cfg) {
    return fnv1a64(to_run_config_json(cfg).dump());
}

inline Scenario make_scenario(const RunConfig& cfg) {
    Scenario s;
    s.frequency_hz = cfg.frequency_ghz * 1e9;
    s.bs_position_a = cfg.bs_position_m;
    s.ue_position_b = cfg.ue_position_m;
    s.bs_power_dbm = cfg.bs_power_dbm;
    s.noise_power_dbm = cfg.noise_power_dbm;
    s.bs_gain_db = cfg.bs_gain_db;
    s.ue_gain_db = cfg.ue_gain_db;
    return s;
}

inline RisLayout make_layout(const RunConfig& cfg) {
    const double dy = cfg.element_dy_mm * 1e-3;
    const double dz = cfg.element_dz_mm * 1e-3;
    const double spacing = cfg.spacing_mm * 1e-3;
    if (!cfg.positions_csv.empty()) {
        auto is = open_input(cfg.positions_csv);
        return read_layout_csv(is, dy, dz, spacing);
    }
    return build_hex_layout(cfg.n_rings, spacing, dy, dz);
}

inline ReflectionAlphabet make_alphabet(const RunConfig& cfg) {
    const double deg = kPi / 180.0;
    return active_alphabet(cfg.on_amplitude, cfg.on_phase_deg * deg, cfg.off_amplitude,
                           cfg.off_phase_deg * deg);
}

inline AlphabetState make_off_state(const RunConfig& cfg) {
    return {cfg.off_amplitude, cfg.off_phase_deg * kPi / 180.0};
}

inline GroupSchedule make_schedule(const RunConfig& cfg, int layout_size) {
    if (cfg.schedule_kind == "paper") {
        if (layout_size != 127)
            throw std::invalid_argument("schedule kind \"paper\" needs a 127-element layout");
        return paper_group_schedule();
    }
    if (cfg.schedule_kind == "single_element") return single_element_schedule(layout_size);
    auto is = open_input(cfg.schedule_path);
    GroupSchedule s = read_schedule_json(is);
    validate_partition(s, layout_size);
    return s;
}

inline PatternModel make_pattern(const RunConfig& cfg) {
    PatternModel p;
    if (cfg.pattern_variant == "cosine_exponent") {
        p.variant = PatternModel::Variant::cosine_exponent;
        p.q_bs = cfg.q_bs;
        p.q_ris = cfg.q_ris;
        p.q_ue = cfg.q_ue;
        p.bs_boresight = cfg.bs_boresight;
        p.ue_boresight = cfg.ue_boresight;
    }
    return p;
}

inline AoiGrid make_grid(const RunConfig& cfg) {
    return build_aoi_grid(cfg.grid_origin_m, cfg.grid_x_axis, cfg.grid_y_axis, cfg.nx, cfg.ny,
                          cfg.step_m);
}

inline ControllerParams make_controller_params(const RunConfig& cfg) {
    ControllerParams p;
    p.pts_dbm = cfg.pts_dbm;
    p.max_iterations = cfg.max_iterations;
    p.mode = cfg.termination_mode == "early_exit" ? TerminationMode::early_exit
                                                  : TerminationMode::fixed_budget;
    p.timeout_ms = cfg.transport_timeout_ms;
    return p;
}

inline NoiseModel make_noise(const RunConfig& cfg) {
    return cfg.noise_sigma_db > 0.0 ? gaussian_db_noise(cfg.noise_sigma_db) : no_noise();
}

}  // namespace hexris
