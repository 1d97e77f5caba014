#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hexris/common.hpp"

namespace hexris {

/// Centered hexagonal lattice in the yz-plane. Element indices are 1-based;
/// positions[m-1] is the center of element m.
struct RisLayout {
    std::vector<Vec3> positions;
    double element_dy = 0.0;     // m
    double element_dz = 0.0;     // m
    double lattice_spacing = 0.0;  // m, center-to-center
    int n_rings = -1;            // -1 for user-supplied layouts

    int size() const { return static_cast<int>(positions.size()); }

    const Vec3& element(int m) const {
        if (m < 1 || m > size()) throw std::out_of_range("element index out of range");
        return positions[static_cast<std::size_t>(m - 1)];
    }
};

inline int hex_count(int n_rings) {
    int m = 1;
    for (int r = 1; r <= n_rings; ++r) m += 6 * r;
    return m;
}

/// First 1-based index of ring r (ring 0 is the center element).
inline int ring_first_index(int r) {
    return r == 0 ? 1 : 2 + 3 * r * (r - 1);
}

inline int ring_of_index(int m) {
    if (m < 1) throw std::out_of_range("element index out of range");
    int r = 0;
    while (ring_first_index(r + 1) <= m) ++r;
    return r;
}

namespace detail {

// Axial-coordinate corner directions of a hex ring, counterclockwise in the
// yz-plane (y right, z up).
inline constexpr std::array<std::array<int, 2>, 6> kHexCorners = {{
    {1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1},
}};

inline Vec3 axial_to_yz(int i, int j, double d) {
    return {0.0, d * (i + 0.5 * j), d * 0.8660254037844386467637231707529362 * j};
}

}  // namespace detail

/// Spiral layout with explicit per-ring start corner and handedness. Used by
/// the orientation search; production code uses build_hex_layout below.
inline RisLayout build_hex_layout_oriented(int n_rings, double spacing, double dy, double dz,
                                           const std::vector<int>& start_sextant, bool ccw) {
    if (n_rings < 0) throw std::invalid_argument("n_rings must be >= 0");
    if (spacing <= 0.0) throw std::invalid_argument("spacing must be positive");
    if (static_cast<int>(start_sextant.size()) < n_rings)
        throw std::invalid_argument("need a start sextant per ring");

    RisLayout layout;
    layout.element_dy = dy;
    layout.element_dz = dz;
    layout.lattice_spacing = spacing;
    layout.n_rings = n_rings;
    layout.positions.reserve(static_cast<std::size_t>(hex_count(n_rings)));
    layout.positions.push_back({0.0, 0.0, 0.0});

    for (int r = 1; r <= n_rings; ++r) {
        const int s = start_sextant[static_cast<std::size_t>(r - 1)];
        if (s < 0 || s > 5) throw std::invalid_argument("start sextant must be in [0,5]");
        // Walk the 6 legs of ring r: stand on a corner, emit, then step r
        // times toward the next corner.
        int ci = r * detail::kHexCorners[static_cast<std::size_t>(s)][0];
        int cj = r * detail::kHexCorners[static_cast<std::size_t>(s)][1];
        for (int leg = 0; leg < 6; ++leg) {
            const int t0 = ((s + (ccw ? leg : -leg)) % 6 + 6) % 6;
            const int t1 = ((s + (ccw ? leg + 1 : -leg - 1)) % 6 + 6) % 6;
            const int di = detail::kHexCorners[static_cast<std::size_t>(t1)][0] -
                           detail::kHexCorners[static_cast<std::size_t>(t0)][0];
            const int dj = detail::kHexCorners[static_cast<std::size_t>(t1)][1] -
                           detail::kHexCorners[static_cast<std::size_t>(t0)][1];
            for (int step = 0; step < r; ++step) {
                layout.positions.push_back(detail::axial_to_yz(ci, cj, spacing));
                ci += di;
                cj += dj;
            }
        }
    }
    return layout;
}

/// Canonical layout: counterclockwise ring spirals, every ring starting at
/// its +y corner. This is the orientation under which the published group
/// tables come out collinear; see validate_schedule_collinearity.
inline RisLayout build_hex_layout(int n_rings, double spacing, double dy, double dz) {
    return build_hex_layout_oriented(n_rings, spacing, dy, dz,
                                     std::vector<int>(static_cast<std::size_t>(std::max(n_rings, 0)), 0),
                                     true);
}

inline double min_pairwise_distance(const RisLayout& layout) {
    const int m = layout.size();
    if (m < 2) throw std::invalid_argument("need at least two elements");
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            best = std::min(best, distance(layout.positions[static_cast<std::size_t>(i)],
                                           layout.positions[static_cast<std::size_t>(j)]));
    return best;
}

}  // namespace hexris
