#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hexris/control.hpp"
#include "hexris/geometry.hpp"
#include "hexris/mobility.hpp"
#include "hexris/schedule.hpp"

namespace hexris {

inline std::string fmt_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

/// Comment-line header carried by every CSV artifact. Deliberately contains
/// no timestamps so identical runs produce identical bytes.
struct Provenance {
    std::string version = "1.0.0";
    std::uint64_t config_hash = 0;
    std::optional<std::uint64_t> seed;
};

inline void write_provenance(std::ostream& os, const Provenance& prov) {
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(prov.config_hash));
    os << "# version " << prov.version << "\n";
    os << "# config_hash " << hash << "\n";
    if (prov.seed) os << "# seed " << *prov.seed << "\n";
}

inline void write_layout_csv(std::ostream& os, const RisLayout& layout, const Provenance& prov) {
    write_provenance(os, prov);
    os << "index,y_m,z_m\n";
    for (int m = 1; m <= layout.size(); ++m) {
        const Vec3& p = layout.element(m);
        os << m << "," << fmt_g9(p.y) << "," << fmt_g9(p.z) << "\n";
    }
}

inline void write_schedule_json(std::ostream& os, const GroupSchedule& schedule) {
    os << nlohmann::json(schedule.group_sets).dump(1) << "\n";
}

inline GroupSchedule read_schedule_json(std::istream& is) {
    nlohmann::json j = nlohmann::json::parse(is);
    GroupSchedule s;
    s.group_sets = j.get<std::vector<std::vector<std::vector<int>>>>();
    if (s.group_sets.empty()) throw std::invalid_argument("schedule has no group sets");
    return s;
}

inline void write_report_csv(std::ostream& os, const AdaptationReport& report,
                             const Provenance& prov) {
    write_provenance(os, prov);
    os << "iter,group_set,subgroup,trial_power_dbm,accepted\n";
    for (const auto& t : report.trials)
        os << t.iteration << "," << t.group_set << "," << t.subgroup << ","
           << fmt_g9(t.trial_power_dbm) << "," << (t.accepted ? 1 : 0) << "\n";
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& result, const Provenance& prov) {
    write_provenance(os, prov);
    os << "ix,iy,x_m,y_m,p_ue_dbm,iterations_used,triggered\n";
    for (const auto& r : result.records)
        os << r.ix << "," << r.iy << "," << fmt_g9(r.b.x) << "," << fmt_g9(r.b.y) << ","
           << fmt_g9(r.p_ue_dbm) << "," << r.iterations_used << "," << (r.triggered ? 1 : 0)
           << "\n";
}

inline void write_hist_csv(std::ostream& os, const std::vector<HistBin>& bins,
                           const Provenance& prov) {
    write_provenance(os, prov);
    os << "bin_left_dbm,count\n";
    for (const auto& b : bins) os << fmt_g9(b.bin_left_dbm) << "," << b.count << "\n";
}

inline void write_gain_csv(std::ostream& os, const std::vector<GainCell>& gains,
                           const Provenance& prov) {
    write_provenance(os, prov);
    os << "ix,iy,gain_db\n";
    for (const auto& g : gains) os << g.ix << "," << g.iy << "," << fmt_g9(g.gain_db) << "\n";
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

inline bool skip_line(const std::string& line) {
    return line.empty() || line[0] == '#' || line[0] == '\r';
}

}  // namespace detail

inline RisLayout read_layout_csv(std::istream& is, double dy, double dz, double spacing) {
    RisLayout layout;
    layout.element_dy = dy;
    layout.element_dz = dz;
    layout.lattice_spacing = spacing;
    layout.n_rings = -1;

    std::string line;
    bool seen_header = false;
    while (std::getline(is, line)) {
        if (detail::skip_line(line)) continue;
        if (!seen_header) {
            if (line.rfind("index,", 0) != 0)
                throw std::invalid_argument("layout CSV must start with an index,y_m,z_m header");
            seen_header = true;
            continue;
        }
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 3) throw std::invalid_argument("layout CSV row needs 3 fields");
        const int index = std::stoi(fields[0]);
        if (index != layout.size() + 1)
            throw std::invalid_argument("layout CSV indices must run 1..M in order");
        layout.positions.push_back({0.0, std::stod(fields[1]), std::stod(fields[2])});
    }
    if (layout.positions.empty()) throw std::invalid_argument("layout CSV has no elements");
    return layout;
}

struct SweepCsvRow {
    int ix = 0;
    int iy = 0;
    double x_m = 0.0;
    double y_m = 0.0;
    double p_ue_dbm = 0.0;
    int iterations_used = 0;
    bool triggered = false;
};

inline std::vector<SweepCsvRow> read_sweep_csv(std::istream& is) {
    std::vector<SweepCsvRow> rows;
    std::string line;
    bool seen_header = false;
    while (std::getline(is, line)) {
        if (detail::skip_line(line)) continue;
        if (!seen_header) {
            if (line.rfind("ix,iy,", 0) != 0)
                throw std::invalid_argument("sweep CSV must start with an ix,iy,... header");
            seen_header = true;
            continue;
        }
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 7) throw std::invalid_argument("sweep CSV row needs 7 fields");
        rows.push_back({std::stoi(fields[0]), std::stoi(fields[1]), std::stod(fields[2]),
                        std::stod(fields[3]), std::stod(fields[4]), std::stoi(fields[5]),
                        std::stoi(fields[6]) != 0});
    }
    if (rows.empty()) throw std::invalid_argument("sweep CSV has no rows");
    return rows;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    return os;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open input file: " + path);
    return is;
}

}  // namespace hexris
