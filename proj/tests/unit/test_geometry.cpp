#include <gtest/gtest.h>

#include <set>

#include "ifk/geometry.hpp"

using namespace ifk;

namespace {

Domain rect_fk(int w, int h, const char* a, const char* b) {
    return build_domain(ShapeSpec::rectangle(w, h), 1.0, Variant::FK, Anchor::named(a), Anchor::named(b));
}

}  // namespace

TEST(Domain, Rectangle4x4HasSixteenVertices) {
    Domain D = rect_fk(4, 4, "NW", "SE");
    EXPECT_EQ(D.vertices.size(), 16u);
    int wired = 0, free_arc = 0;
    for (std::size_t i = 0; i < D.vertices.size(); ++i) {
        wired += D.wired[i];
        free_arc += D.free_arc[i];
        EXPECT_FALSE(D.wired[i] && D.free_arc[i]);
    }
    EXPECT_GT(wired, 0);
    EXPECT_GT(free_arc, 0);
    EXPECT_EQ(D.medial[D.a].role, MedialRole::Start);
    EXPECT_EQ(D.medial[D.b].role, MedialRole::End);
}

TEST(Domain, BoundaryWalkVisitsEachBoundaryVertexOnce) {
    Domain D = rect_fk(4, 3, "NW", "SE");
    std::set<int> seen(D.boundary.begin(), D.boundary.end());
    EXPECT_EQ(seen.size(), D.boundary.size());
    EXPECT_EQ(D.boundary.size(), 10u);
}

TEST(Domain, CoincidingMarksRejected) {
    try {
        build_domain(ShapeSpec::rectangle(2, 2), 1.0, Variant::FK, Anchor::named("NW"), Anchor::named("NW"));
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("marked points coincide"), std::string::npos);
    }
}

TEST(Domain, TooSmallRectangleRejected) {
    EXPECT_THROW(build_domain(ShapeSpec::rectangle(1, 1), 1.0, Variant::FK, Anchor::named("NW"),
                              Anchor::named("SE")),
                 Error);
}

TEST(Domain, UnknownCornerRejected) {
    EXPECT_THROW(rect_fk(3, 3, "XX", "SE"), Error);
}

TEST(Domain, SpinDiskMedialVerticesBorderBlackFaces) {
    Domain D = build_domain(ShapeSpec::disk(1), 1.0 / 8, Variant::Spin, Anchor::at({-1, 0}), Anchor::at({1, 0}));
    ASSERT_GT(D.medial.size(), 0u);
    for (std::size_t m = 0; m < D.medial.size(); ++m) {
        const auto& mv = D.medial[m];
        ASSERT_GE(mv.p0, 0);
        Site d = mv.s1 - mv.s0;
        EXPECT_EQ(std::abs(d.x) + std::abs(d.y), 1);
        EXPECT_EQ(mv.u, mv.s0.x + mv.s1.x);
        EXPECT_EQ(mv.v, mv.s0.y + mv.s1.y);
        EXPECT_EQ(D.vertex_at(mv.s0), mv.p0);
    }
}

TEST(Domain, FkDiskAnchorsNearTargets) {
    Domain D = build_domain(ShapeSpec::disk(1), 1.0 / 4, Variant::FK, Anchor::at({-1, 0}), Anchor::at({1, 0}));
    EXPECT_LT(std::abs(D.medial_pos(D.a) - cplx(-1, 0)), 0.5);
    EXPECT_LT(std::abs(D.medial_pos(D.b) - cplx(1, 0)), 0.5);
}

TEST(Domain, HashDependsOnMarks) {
    EXPECT_EQ(rect_fk(3, 3, "NW", "SE").hash(), rect_fk(3, 3, "NW", "SE").hash());
    EXPECT_NE(rect_fk(3, 3, "NW", "SE").hash(), rect_fk(3, 3, "NE", "SW").hash());
}

TEST(MedialLine, EastIsRealWestIsImaginary) {
    EXPECT_NEAR(line_of(cplx(1, 0)).imag(), 0.0, 1e-15);
    EXPECT_NEAR(line_of(cplx(-1, 0)).real(), 0.0, 1e-15);
    EXPECT_NEAR(std::abs((line_of_dir(1) / std::polar(1.0, -kPi / 4)).imag()), 0.0, 1e-15);
    EXPECT_NEAR(std::abs((line_of_dir(3) / std::polar(1.0, kPi / 4)).imag()), 0.0, 1e-15);
}

TEST(MedialLine, NortheastIsRotatedByMinusPiOverEight) {
    cplx l = line_of(std::polar(1.0, kPi / 4));
    cplx want = std::polar(1.0, -kPi / 8);
    EXPECT_NEAR(std::abs((l / want).imag()), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(l), 1.0, 1e-15);
}

TEST(MedialLine, ProjectionIsIdempotent) {
    cplx u = line_of_dir(1), f(0.3, -1.7);
    cplx p = project(f, u);
    EXPECT_NEAR(std::abs(project(p, u) - p), 0.0, 1e-15);
    EXPECT_NEAR(std::abs((p / u).imag()), 0.0, 1e-15);
}

TEST(Winding, StraightPathIsZero) {
    EXPECT_DOUBLE_EQ(winding({0, 0, 0, 0, 0}, 0, 4), 0.0);
}

TEST(Winding, CounterclockwiseSquareIsFullTurn) {
    EXPECT_NEAR(winding({0, 1, 2, 3, 0}, 0, 4), 2 * kPi, 1e-15);
}

TEST(Winding, LeftThenRightCancels) {
    EXPECT_DOUBLE_EQ(winding({0, 1, 0}, 0, 2), 0.0);
    EXPECT_NEAR(winding({0, 1, 0}, 0, 1), kPi / 2, 1e-15);
}

TEST(Winding, ReversalRejected) {
    EXPECT_THROW(winding({0, 2}, 0, 1), Error);
    EXPECT_THROW(winding({0, 1}, 0, 5), Error);
}
