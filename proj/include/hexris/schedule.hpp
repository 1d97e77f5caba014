#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "hexris/geometry.hpp"

namespace hexris {

/// Ordered group sets, each an ordered list of subgroups of 1-based element
/// indices. The control loop iterates subgroups set by set, in stored order.
struct GroupSchedule {
    std::vector<std::vector<std::vector<int>>> group_sets;

    int total_subgroups() const {
        int n = 0;
        for (const auto& gs : group_sets) n += static_cast<int>(gs.size());
        return n;
    }

    /// Flat subgroup t (0-based, cycling) -> (group set, subgroup), 1-based.
    std::pair<int, int> locate(int t) const {
        const int total = total_subgroups();
        if (total == 0) throw std::logic_error("empty schedule");
        t %= total;
        for (std::size_t j = 0; j < group_sets.size(); ++j) {
            const int l = static_cast<int>(group_sets[j].size());
            if (t < l) return {static_cast<int>(j) + 1, t + 1};
            t -= l;
        }
        throw std::logic_error("unreachable");
    }

    const std::vector<int>& subgroup(int j, int l) const {
        return group_sets.at(static_cast<std::size_t>(j - 1)).at(static_cast<std::size_t>(l - 1));
    }
};

/// Checks that every group set partitions {1, ..., m} exactly.
inline void validate_partition(const GroupSchedule& schedule, int m) {
    for (std::size_t j = 0; j < schedule.group_sets.size(); ++j) {
        std::vector<int> all;
        for (const auto& sub : schedule.group_sets[j]) all.insert(all.end(), sub.begin(), sub.end());
        std::sort(all.begin(), all.end());
        std::vector<int> want(static_cast<std::size_t>(m));
        std::iota(want.begin(), want.end(), 1);
        if (all != want)
            throw std::invalid_argument("group set " + std::to_string(j + 1) +
                                        " is not a partition of 1.." + std::to_string(m));
    }
}

/// The published 26-row subgroup assignment for the 127-element layout:
/// two group sets of 13 subgroups, each set partitioning the array into
/// parallel element lines, the two line families 60 degrees apart.
inline GroupSchedule paper_group_schedule() {
    GroupSchedule s;
    s.group_sets = {
        {
            {104, 105, 106, 107, 108, 109, 110},
            {103, 72, 73, 74, 75, 76, 77, 111},
            {102, 71, 46, 47, 48, 49, 50, 78, 112},
            {101, 70, 45, 26, 27, 28, 29, 51, 79, 113},
            {100, 69, 44, 25, 12, 13, 14, 30, 52, 80, 114},
            {99, 68, 43, 24, 11, 4, 5, 15, 31, 53, 81, 115},
            {98, 67, 42, 23, 10, 3, 1, 6, 16, 32, 54, 82, 116},
            {97, 66, 41, 22, 9, 2, 7, 17, 33, 55, 83, 117},
            {96, 65, 40, 21, 8, 19, 18, 34, 56, 84, 118},
            {95, 64, 39, 20, 37, 36, 35, 57, 85, 119},
            {94, 63, 38, 61, 60, 59, 58, 86, 120},
            {93, 62, 91, 90, 89, 88, 87, 121},
            {92, 127, 126, 125, 124, 123, 122},
        },
        {
            {98, 97, 96, 95, 94, 93, 92},
            {99, 67, 66, 65, 64, 63, 62, 127},
            {100, 68, 42, 41, 40, 39, 38, 91, 126},
            {101, 69, 43, 23, 22, 21, 20, 61, 90, 125},
            {102, 70, 44, 24, 10, 9, 8, 37, 60, 89, 124},
            {103, 71, 45, 25, 11, 3, 2, 19, 36, 59, 88, 123},
            {104, 72, 46, 26, 12, 4, 1, 7, 18, 35, 58, 87, 122},
            {105, 73, 47, 27, 13, 5, 6, 17, 34, 57, 86, 121},
            {106, 74, 48, 28, 14, 15, 16, 33, 56, 85, 120},
            {107, 75, 49, 29, 30, 31, 32, 55, 84, 119},
            {108, 76, 50, 51, 52, 53, 54, 83, 118},
            {109, 77, 78, 79, 80, 81, 82, 117},
            {110, 111, 112, 113, 114, 115, 116},
        },
    };
    validate_partition(s, 127);
    return s;
}

/// One group set of singleton subgroups {1}, {2}, ..., {m}.
inline GroupSchedule single_element_schedule(int m) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    GroupSchedule s;
    s.group_sets.resize(1);
    for (int i = 1; i <= m; ++i) s.group_sets[0].push_back({i});
    return s;
}

struct SubgroupLineFit {
    int group_set = 0;  // 1-based
    int subgroup = 0;   // 1-based
    double dir_y = 0.0;  // unit line direction in the yz-plane
    double dir_z = 0.0;
    double max_deviation = 0.0;  // m, perpendicular to the fitted line
};

struct CollinearityReport {
    bool ok = false;
    std::vector<SubgroupLineFit> fits;
    std::string failure;
};

namespace detail {

// Principal direction of a point set in the yz-plane: centroid, 2x2 scatter
// matrix, dominant eigenvector. Exact for collinear input.
inline SubgroupLineFit fit_line(const RisLayout& layout, const std::vector<int>& subgroup) {
    SubgroupLineFit fit;
    const std::size_t n = subgroup.size();
    if (n <= 1) return fit;

    double cy = 0.0, cz = 0.0;
    for (int m : subgroup) {
        const Vec3& p = layout.element(m);
        cy += p.y;
        cz += p.z;
    }
    cy /= static_cast<double>(n);
    cz /= static_cast<double>(n);

    double syy = 0.0, syz = 0.0, szz = 0.0;
    for (int m : subgroup) {
        const Vec3& p = layout.element(m);
        syy += (p.y - cy) * (p.y - cy);
        syz += (p.y - cy) * (p.z - cz);
        szz += (p.z - cz) * (p.z - cz);
    }

    const double half_trace = 0.5 * (syy + szz);
    const double lambda = half_trace + std::hypot(0.5 * (syy - szz), syz);
    // Pick the better-conditioned of the two eigenvector expressions.
    double vy = syz, vz = lambda - syy;
    const double wy = lambda - szz, wz = syz;
    if (wy * wy + wz * wz > vy * vy + vz * vz) {
        vy = wy;
        vz = wz;
    }
    double nrm = std::hypot(vy, vz);
    if (nrm == 0.0) {
        vy = 1.0;
        vz = 0.0;
        nrm = 1.0;
    }
    fit.dir_y = vy / nrm;
    fit.dir_z = vz / nrm;

    for (int m : subgroup) {
        const Vec3& p = layout.element(m);
        const double perp = std::abs(-(p.y - cy) * fit.dir_z + (p.z - cz) * fit.dir_y);
        fit.max_deviation = std::max(fit.max_deviation, perp);
    }
    return fit;
}

}  // namespace detail

/// Fits a line to every subgroup and checks the geometric contract of the
/// published tables: every subgroup collinear, directions parallel within a
/// group set, and the two families 60 degrees apart. Angle tests avoid
/// arccos, which is ill-conditioned near parallel; parallelism uses the
/// cross product and the 60-degree split uses |dot| = 1/2.
inline CollinearityReport validate_schedule_collinearity(const RisLayout& layout,
                                                         const GroupSchedule& schedule) {
    CollinearityReport report;
    const double dev_tol = layout.lattice_spacing * 1e-6;
    const double ang_tol = 1e-9;

    for (std::size_t j = 0; j < schedule.group_sets.size(); ++j) {
        for (std::size_t l = 0; l < schedule.group_sets[j].size(); ++l) {
            SubgroupLineFit fit = detail::fit_line(layout, schedule.group_sets[j][l]);
            fit.group_set = static_cast<int>(j) + 1;
            fit.subgroup = static_cast<int>(l) + 1;
            if (fit.max_deviation >= dev_tol) {
                report.failure = "subgroup " + std::to_string(j + 1) + "/" + std::to_string(l + 1) +
                                 " not collinear";
                report.fits.push_back(fit);
                return report;
            }
            report.fits.push_back(fit);
        }
    }

    // Directions within a set must be parallel; the families must differ by
    // 60 degrees. Singletons carry no direction and are skipped.
    std::vector<std::pair<double, double>> family;
    for (std::size_t j = 0; j < schedule.group_sets.size(); ++j) {
        bool have_ref = false;
        double ry = 0.0, rz = 0.0;
        for (const SubgroupLineFit& fit : report.fits) {
            if (fit.group_set != static_cast<int>(j) + 1) continue;
            if (schedule.group_sets[j][static_cast<std::size_t>(fit.subgroup - 1)].size() <= 1) continue;
            if (!have_ref) {
                ry = fit.dir_y;
                rz = fit.dir_z;
                have_ref = true;
                continue;
            }
            const double cross = std::abs(ry * fit.dir_z - rz * fit.dir_y);
            if (cross >= ang_tol) {
                report.failure = "group set " + std::to_string(j + 1) + " directions not parallel";
                return report;
            }
        }
        if (have_ref) family.emplace_back(ry, rz);
    }
    for (std::size_t a = 0; a < family.size(); ++a) {
        for (std::size_t b = a + 1; b < family.size(); ++b) {
            const double d = std::abs(family[a].first * family[b].first +
                                      family[a].second * family[b].second);
            if (std::abs(d - 0.5) >= ang_tol) {
                report.failure = "group set families not 60 degrees apart";
                return report;
            }
        }
    }

    report.ok = true;
    return report;
}

}  // namespace hexris
