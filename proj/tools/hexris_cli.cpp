#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hexris/hexris.hpp"

namespace {

using namespace hexris;

struct CliOverrides {
    std::string config_path;
    std::vector<std::uint64_t> seeds;
    std::optional<double> pts_dbm;
    std::optional<int> iters;
    std::optional<std::string> transport;
    std::optional<std::string> out_dir;
};

void apply_overrides(RunConfig& cfg, const CliOverrides& o) {
    if (!o.seeds.empty()) cfg.seeds = o.seeds;
    if (o.pts_dbm) cfg.pts_dbm = *o.pts_dbm;
    if (o.iters) cfg.max_iterations = *o.iters;
    if (o.out_dir) cfg.output_dir = *o.out_dir;
    if (o.transport) {
        const std::string& t = *o.transport;
        if (t == "inproc") {
            cfg.transport_kind = "inproc";
        } else if (t.rfind("udp:", 0) == 0) {
            const std::string rest = t.substr(4);
            const auto colon = rest.rfind(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("--transport udp needs HOST:PORT");
            cfg.transport_kind = "udp";
            cfg.transport_host = rest.substr(0, colon);
            cfg.transport_port = std::stoi(rest.substr(colon + 1));
        } else {
            throw std::invalid_argument("--transport must be inproc or udp:HOST:PORT");
        }
    }
}

RunConfig load_effective_config(const CliOverrides& o) {
    RunConfig cfg = load_run_config(o.config_path);
    apply_overrides(cfg, o);
    std::filesystem::create_directories(cfg.output_dir);
    return cfg;
}

std::unique_ptr<LinkTransport> make_transport(const RunConfig& cfg) {
    if (cfg.transport_kind == "udp")
        return std::make_unique<UdpLink>(cfg.transport_host,
                                         static_cast<std::uint16_t>(cfg.transport_port));
    return std::make_unique<InProcessLink>();
}

void require_seeds(const RunConfig& cfg) {
    if (cfg.seeds.empty())
        throw std::invalid_argument("this command is stochastic; give seeds in the config or via --seed");
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int cmd_sweep(const CliOverrides& o) {
    RunConfig cfg;
    RisLayout layout;
    try {
        cfg = load_effective_config(o);
        require_seeds(cfg);
        layout = make_layout(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    try {
        const Scenario scenario = make_scenario(cfg);
        const ReflectionAlphabet alphabet = make_alphabet(cfg);
        const GroupSchedule schedule = make_schedule(cfg, layout.size());
        const PatternModel pattern = make_pattern(cfg);
        const AoiGrid grid = make_grid(cfg);
        const ControllerParams params = make_controller_params(cfg);
        const NoiseModel noise = make_noise(cfg);
        const Provenance base{"1.0.0", config_hash(cfg), std::nullopt};

        const SweepResult baseline =
            baseline_sweep(grid, scenario, layout, pattern, make_off_state(cfg));
        {
            auto os = open_output(out_path(cfg, "baseline.csv"));
            write_sweep_csv(os, baseline, base);
        }

        auto summary_os = open_output(out_path(cfg, "summary.csv"));
        write_provenance(summary_os, base);
        summary_os << "seed,min_dbm,median_dbm,max_dbm,fraction_below_pts,triggered_positions\n";

        for (const std::uint64_t seed : cfg.seeds) {
            auto link = make_transport(cfg);
            const SweepResult result = run_sweep(grid, scenario, layout, alphabet, pattern,
                                                 schedule, params, noise, cfg.n_avg, seed, *link);
            const SweepStats stats = analyze(result, &baseline, cfg.pts_dbm);
            Provenance prov = base;
            prov.seed = seed;
            const std::string tag = "seed" + std::to_string(seed);
            {
                auto os = open_output(out_path(cfg, "sweep_" + tag + ".csv"));
                write_sweep_csv(os, result, prov);
            }
            {
                auto os = open_output(out_path(cfg, "gain_" + tag + ".csv"));
                write_gain_csv(os, stats.gains, prov);
            }
            {
                auto os = open_output(out_path(cfg, "hist_" + tag + ".csv"));
                write_hist_csv(os, stats.histogram, prov);
            }
            long long triggers = 0;
            for (const auto& r : result.records)
                if (r.triggered) ++triggers;
            summary_os << seed << "," << fmt_g9(stats.summary.min_dbm) << ","
                       << fmt_g9(stats.summary.median_dbm) << "," << fmt_g9(stats.summary.max_dbm)
                       << "," << fmt_g9(stats.fraction_below_pts) << "," << triggers << "\n";
            std::cout << "sweep seed " << seed << ": median " << fmt_g9(stats.summary.median_dbm)
                      << " dBm, " << triggers << "/" << grid.count() << " positions triggered\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_adapt(const CliOverrides& o, int ix, int iy) {
    RunConfig cfg;
    RisLayout layout;
    try {
        cfg = load_effective_config(o);
        require_seeds(cfg);
        layout = make_layout(cfg);
        if ((ix >= 0) != (iy >= 0))
            throw std::invalid_argument("give both --ix and --iy or neither");
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    try {
        Scenario scenario = make_scenario(cfg);
        if (ix >= 0) scenario.ue_position_b = make_grid(cfg).position(ix, iy);
        const ReflectionAlphabet alphabet = make_alphabet(cfg);
        const GroupSchedule schedule = make_schedule(cfg, layout.size());
        const PatternModel pattern = make_pattern(cfg);
        const ControllerParams params = make_controller_params(cfg);
        const NoiseModel noise = make_noise(cfg);

        for (const std::uint64_t seed : cfg.seeds) {
            std::mt19937_64 rng(seed);
            const ReflectionConfig initial = random_config(layout.size(), alphabet, rng);
            const PowerFn oracle =
                make_power_oracle(scenario, layout, alphabet, pattern, noise, cfg.n_avg, rng);
            auto link = make_transport(cfg);
            const AdaptationReport report =
                iterative_adapt(initial, oracle, schedule, alphabet.size(), params, *link);
            Provenance prov{"1.0.0", config_hash(cfg), seed};
            auto os = open_output(out_path(cfg, "adapt_seed" + std::to_string(seed) + ".csv"));
            write_report_csv(os, report, prov);
            std::cout << "adapt seed " << seed << ": triggered " << (report.triggered ? 1 : 0)
                      << ", iterations " << report.iterations_used << ", final "
                      << fmt_g9(report.final_power_dbm) << " dBm\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_mc(const CliOverrides& o) {
    RunConfig cfg;
    RisLayout layout;
    try {
        cfg = load_effective_config(o);
        require_seeds(cfg);
        layout = make_layout(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    try {
        const ReflectionAlphabet alphabet = make_alphabet(cfg);
        const PatternModel pattern = make_pattern(cfg);
        const AoiGrid grid = make_grid(cfg);

        for (const std::uint64_t seed : cfg.seeds) {
            std::mt19937_64 rng(seed);
            Scenario scenario = make_scenario(cfg);
            SweepResult result;
            result.grid = grid;
            result.meta = {seed, cfg.pts_dbm, cfg.max_iterations, TerminationMode::fixed_budget};
            for (int ix = 0; ix < grid.nx; ++ix) {
                for (int iy = 0; iy < grid.ny; ++iy) {
                    scenario.ue_position_b = grid.position(ix, iy);
                    const McResult mc = mc_optimize(scenario, layout, alphabet, pattern,
                                                    cfg.max_iterations, rng);
                    result.records.push_back({ix, iy, scenario.ue_position_b, mc.best_power_dbm,
                                              cfg.max_iterations, true, 0});
                }
            }
            Provenance prov{"1.0.0", config_hash(cfg), seed};
            auto os = open_output(out_path(cfg, "mc_seed" + std::to_string(seed) + ".csv"));
            write_sweep_csv(os, result, prov);
            std::cout << "mc seed " << seed << ": median "
                      << fmt_g9(summarize(result).median_dbm) << " dBm over " << grid.count()
                      << " positions\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_oracle(const CliOverrides& o) {
    RunConfig cfg;
    RisLayout layout;
    try {
        cfg = load_effective_config(o);
        layout = make_layout(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    try {
        const Scenario scenario = make_scenario(cfg);
        const ReflectionAlphabet alphabet = make_alphabet(cfg);
        const PatternModel pattern = make_pattern(cfg);
        const ExhaustiveResult best = exhaustive_optimize(scenario, layout, alphabet, pattern);

        Provenance prov{"1.0.0", config_hash(cfg), std::nullopt};
        auto os = open_output(out_path(cfg, "oracle.csv"));
        write_provenance(os, prov);
        os << "# best_power_dbm " << fmt_g9(best.best_power_dbm) << "\n";
        os << "m,state\n";
        for (int m = 1; m <= best.best_config.size(); ++m)
            os << m << "," << static_cast<int>(best.best_config.state(m)) << "\n";
        std::cout << "oracle: best " << fmt_g9(best.best_power_dbm) << " dBm over "
                  << layout.size() << " elements\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_compare(const std::string& file_a, const std::string& file_b, const std::string& out_dir) {
    std::vector<SweepCsvRow> rows_a, rows_b;
    std::string body_a, body_b;
    try {
        {
            auto is = open_input(file_a);
            std::ostringstream ss;
            ss << is.rdbuf();
            body_a = ss.str();
        }
        {
            auto is = open_input(file_b);
            std::ostringstream ss;
            ss << is.rdbuf();
            body_b = ss.str();
        }
        std::istringstream sa(body_a), sb(body_b);
        rows_a = read_sweep_csv(sa);
        rows_b = read_sweep_csv(sb);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    try {
        std::map<std::pair<int, int>, double> b_power;
        for (const auto& r : rows_b) b_power[{r.ix, r.iy}] = r.p_ue_dbm;

        std::vector<GainCell> deltas;
        std::vector<double> delta_values;
        long long a_on_top = 0;
        for (const auto& r : rows_a) {
            const auto it = b_power.find({r.ix, r.iy});
            if (it == b_power.end())
                throw std::runtime_error("position (" + std::to_string(r.ix) + "," +
                                         std::to_string(r.iy) + ") missing from " + file_b);
            const double d = r.p_ue_dbm - it->second;
            deltas.push_back({r.ix, r.iy, d});
            delta_values.push_back(d);
            if (d >= 0.0) ++a_on_top;
        }

        std::filesystem::create_directories(out_dir);
        Provenance prov{"1.0.0", fnv1a64(body_a + body_b), std::nullopt};
        auto os = open_output((std::filesystem::path(out_dir) / "compare.csv").string());
        write_provenance(os, prov);
        os << "ix,iy,delta_db\n";
        for (const auto& d : deltas) os << d.ix << "," << d.iy << "," << fmt_g9(d.gain_db) << "\n";

        std::cout << "compare: " << deltas.size() << " positions, first-file wins at "
                  << fmt_g9(static_cast<double>(a_on_top) / static_cast<double>(deltas.size()))
                  << ", median delta " << fmt_g9(median_of(delta_values)) << " dB\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_export(const CliOverrides& o) {
    RunConfig cfg;
    RisLayout layout;
    GroupSchedule schedule;
    try {
        cfg = load_effective_config(o);
        layout = make_layout(cfg);
        schedule = make_schedule(cfg, layout.size());
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    try {
        const Provenance prov{"1.0.0", config_hash(cfg), std::nullopt};
        {
            auto os = open_output(out_path(cfg, "layout.csv"));
            write_layout_csv(os, layout, prov);
        }
        {
            auto os = open_output(out_path(cfg, "schedule.json"));
            write_schedule_json(os, schedule);
        }
        std::cout << "exported layout.csv (" << layout.size() << " elements) and schedule.json ("
                  << schedule.total_subgroups() << " subgroups) to " << cfg.output_dir << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive RIS beamforming simulator"};
    app.require_subcommand(1);

    CliOverrides sweep_o, adapt_o, mc_o, oracle_o, export_o;
    int adapt_ix = -1, adapt_iy = -1;
    std::string cmp_a, cmp_b, cmp_out = "out";

    const auto add_common = [](CLI::App* cmd, CliOverrides& o) {
        cmd->add_option("--config", o.config_path, "JSON run configuration")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--seed", o.seeds, "override config seeds (repeatable)");
        cmd->add_option("--pts-dbm", o.pts_dbm, "override power threshold");
        cmd->add_option("--iters", o.iters, "override iteration budget");
        cmd->add_option("--transport", o.transport, "inproc or udp:HOST:PORT");
        cmd->add_option("--out", o.out_dir, "output directory");
    };

    CLI::App* sweep = app.add_subcommand("sweep", "trigger-based adaptation over the grid");
    add_common(sweep, sweep_o);
    CLI::App* adapt = app.add_subcommand("adapt", "single-position adaptation report");
    add_common(adapt, adapt_o);
    adapt->add_option("--ix", adapt_ix, "grid column of the UE position");
    adapt->add_option("--iy", adapt_iy, "grid row of the UE position");
    CLI::App* mc = app.add_subcommand("mc", "per-position random-search benchmark");
    add_common(mc, mc_o);
    CLI::App* oracle = app.add_subcommand("oracle", "exhaustive optimum (small arrays only)");
    add_common(oracle, oracle_o);
    CLI::App* compare = app.add_subcommand("compare", "per-position delta of two sweep CSVs");
    compare->add_option("file_a", cmp_a, "first sweep CSV")->required()->check(CLI::ExistingFile);
    compare->add_option("file_b", cmp_b, "second sweep CSV")->required()->check(CLI::ExistingFile);
    compare->add_option("--out", cmp_out, "output directory");
    CLI::App* exp = app.add_subcommand("export", "write layout CSV and schedule JSON");
    add_common(exp, export_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (sweep->parsed()) return cmd_sweep(sweep_o);
    if (adapt->parsed()) return cmd_adapt(adapt_o, adapt_ix, adapt_iy);
    if (mc->parsed()) return cmd_mc(mc_o);
    if (oracle->parsed()) return cmd_oracle(oracle_o);
    if (compare->parsed()) return cmd_compare(cmp_a, cmp_b, cmp_out);
    if (exp->parsed()) return cmd_export(export_o);
    return 1;
}
