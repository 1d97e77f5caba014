#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "hexris/geometry.hpp"
#include "hexris/io.hpp"

namespace {

using namespace hexris;

constexpr double kSpacing = 8.7e-3;
constexpr double kDy = 6.6e-3;
constexpr double kDz = 6.6e-3;

RisLayout full_layout() { return build_hex_layout(6, kSpacing, kDy, kDz); }

TEST(HexCount, CenteredHexNumbers) {
    EXPECT_EQ(hex_count(0), 1);
    EXPECT_EQ(hex_count(1), 7);
    EXPECT_EQ(hex_count(2), 19);
    EXPECT_EQ(hex_count(6), 127);
}

TEST(RingIndex, FirstIndexAndInverse) {
    EXPECT_EQ(ring_first_index(0), 1);
    EXPECT_EQ(ring_first_index(1), 2);
    EXPECT_EQ(ring_first_index(2), 8);
    EXPECT_EQ(ring_first_index(6), 92);
    EXPECT_EQ(ring_of_index(1), 0);
    EXPECT_EQ(ring_of_index(2), 1);
    EXPECT_EQ(ring_of_index(7), 1);
    EXPECT_EQ(ring_of_index(91), 5);
    EXPECT_EQ(ring_of_index(92), 6);
    EXPECT_EQ(ring_of_index(127), 6);
    EXPECT_THROW(ring_of_index(0), std::out_of_range);
}

TEST(BuildHexLayout, PaperSizeAndCenter) {
    const RisLayout layout = full_layout();
    EXPECT_EQ(layout.size(), 127);
    EXPECT_EQ(layout.n_rings, 6);
    EXPECT_EQ(layout.element(1), (Vec3{0.0, 0.0, 0.0}));
    for (int m = 1; m <= 127; ++m) EXPECT_EQ(layout.element(m).x, 0.0);
}

TEST(BuildHexLayout, DegenerateZeroRings) {
    const RisLayout layout = build_hex_layout(0, kSpacing, kDy, kDz);
    ASSERT_EQ(layout.size(), 1);
    EXPECT_EQ(layout.element(1), (Vec3{0.0, 0.0, 0.0}));
}

TEST(BuildHexLayout, OneRingDistances) {
    const RisLayout layout = build_hex_layout(1, kSpacing, kDy, kDz);
    ASSERT_EQ(layout.size(), 7);
    for (int m = 2; m <= 7; ++m)
        EXPECT_NEAR(norm(layout.element(m)), kSpacing, kSpacing * 1e-12);
}

TEST(BuildHexLayout, RejectsBadArguments) {
    EXPECT_THROW(build_hex_layout(6, 0.0, kDy, kDz), std::invalid_argument);
    EXPECT_THROW(build_hex_layout(6, -1.0, kDy, kDz), std::invalid_argument);
    EXPECT_THROW(build_hex_layout(-1, kSpacing, kDy, kDz), std::invalid_argument);
}

TEST(BuildHexLayout, RingPopulations) {
    const RisLayout layout = full_layout();
    for (int r = 1; r <= 6; ++r) {
        int count = 0;
        for (int m = 1; m <= layout.size(); ++m)
            if (ring_of_index(m) == r) ++count;
        EXPECT_EQ(count, 6 * r) << "ring " << r;
        // Every member of ring r sits exactly r..r*spacing from the center in
        // lattice terms: between r*spacing*sqrt(3)/2 (edge midpoints) and
        // r*spacing (corners).
        for (int m = ring_first_index(r); m < ring_first_index(r + 1); ++m) {
            const double d = norm(layout.element(m));
            EXPECT_LE(d, r * kSpacing * (1.0 + 1e-12));
            EXPECT_GE(d, r * kSpacing * 0.8660254037844386 * (1.0 - 1e-12));
        }
    }
}

TEST(BuildHexLayout, MinPairwiseSpacing) {
    const RisLayout layout = full_layout();
    EXPECT_NEAR(min_pairwise_distance(layout), kSpacing, kSpacing * 1e-9);
}

TEST(BuildHexLayout, SixfoldRotationSymmetry) {
    const RisLayout layout = full_layout();
    const double c = 0.5, s = 0.8660254037844386467637232;
    for (const Vec3& p : layout.positions) {
        const Vec3 rotated{0.0, c * p.y - s * p.z, s * p.y + c * p.z};
        double best = 1.0;
        for (const Vec3& q : layout.positions) best = std::min(best, distance(rotated, q));
        EXPECT_LT(best, kSpacing * 1e-12);
    }
}

TEST(BuildHexLayout, ElementAccessBounds) {
    const RisLayout layout = full_layout();
    EXPECT_THROW(layout.element(0), std::out_of_range);
    EXPECT_THROW(layout.element(128), std::out_of_range);
}

TEST(OrientedLayout, RejectsBadOrientationArguments) {
    EXPECT_THROW(build_hex_layout_oriented(6, kSpacing, kDy, kDz, {0, 0, 0}, true),
                 std::invalid_argument);
    EXPECT_THROW(build_hex_layout_oriented(1, kSpacing, kDy, kDz, {6}, true),
                 std::invalid_argument);
}

TEST(OrientedLayout, SameCellSetForAnyOrientation) {
    const RisLayout canonical = full_layout();
    const RisLayout other =
        build_hex_layout_oriented(6, kSpacing, kDy, kDz, {3, 1, 4, 0, 5, 2}, false);
    ASSERT_EQ(other.size(), canonical.size());
    for (const Vec3& p : other.positions) {
        double best = 1.0;
        for (const Vec3& q : canonical.positions) best = std::min(best, distance(p, q));
        EXPECT_LT(best, kSpacing * 1e-12);
    }
}

TEST(MinPairwiseDistance, NeedsTwoElements) {
    const RisLayout single = build_hex_layout(0, kSpacing, kDy, kDz);
    EXPECT_THROW(min_pairwise_distance(single), std::invalid_argument);
}

TEST(LayoutCsv, RoundTrip) {
    const RisLayout layout = full_layout();
    std::ostringstream out;
    write_layout_csv(out, layout, Provenance{});

    std::istringstream in(out.str());
    const RisLayout loaded = read_layout_csv(in, kDy, kDz, kSpacing);
    ASSERT_EQ(loaded.size(), layout.size());
    EXPECT_EQ(loaded.n_rings, -1);
    for (int m = 1; m <= layout.size(); ++m) {
        EXPECT_NEAR(loaded.element(m).y, layout.element(m).y, 1e-10);
        EXPECT_NEAR(loaded.element(m).z, layout.element(m).z, 1e-10);
    }

    // A second export of the loaded layout reproduces the bytes exactly: the
    // 9-significant-digit format is a fixed point of the round trip.
    std::ostringstream again;
    write_layout_csv(again, loaded, Provenance{});
    EXPECT_EQ(again.str(), out.str());
}

TEST(LayoutCsv, RejectsMalformedInput) {
    {
        std::istringstream in("not,a,header\n1,0,0\n");
        EXPECT_THROW(read_layout_csv(in, kDy, kDz, kSpacing), std::invalid_argument);
    }
    {
        std::istringstream in("index,y_m,z_m\n2,0,0\n");
        EXPECT_THROW(read_layout_csv(in, kDy, kDz, kSpacing), std::invalid_argument);
    }
    {
        std::istringstream in("index,y_m,z_m\n1,0\n");
        EXPECT_THROW(read_layout_csv(in, kDy, kDz, kSpacing), std::invalid_argument);
    }
    {
        std::istringstream in("index,y_m,z_m\n");
        EXPECT_THROW(read_layout_csv(in, kDy, kDz, kSpacing), std::invalid_argument);
    }
}

}  // namespace
