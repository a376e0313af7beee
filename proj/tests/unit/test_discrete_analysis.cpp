#include <gtest/gtest.h>

#include "ifk/discrete_analysis.hpp"
#include "ifk/fk_model.hpp"
#include "ifk/observables.hpp"

using namespace ifk;

namespace {

std::vector<cplx> field(const Network& net, const std::function<cplx(cplx)>& f) {
    std::vector<cplx> v(net.size());
    for (int i = 0; i < net.size(); ++i) v[i] = f(net.pos[i]);
    return v;
}

double max_error(const Network& net, const std::vector<cplx>& h, const std::function<cplx(cplx)>& f) {
    double e = 0;
    for (int i = 0; i < net.size(); ++i) e = std::max(e, std::abs(h[i] - f(net.pos[i])));
    return e;
}

}  // namespace

TEST(Laplacian, ConstantAndLinearFieldsAreHarmonic) {
    Network net = box_network(5, 5);
    auto c = field(net, [](cplx) { return cplx(2.5, -1); });
    auto x = field(net, [](cplx z) { return cplx(z.real()); });
    for (int u : net.interior_vertices()) {
        EXPECT_NEAR(std::abs(discrete_laplacian(net, c, u)), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(discrete_laplacian(net, x, u)), 0.0, 1e-15);
    }
}

TEST(Laplacian, SquareOfXGivesOneHalf) {
    Network net = box_network(5, 5);
    auto f = field(net, [](cplx z) { return cplx(z.real() * z.real()); });
    for (int u : net.interior_vertices()) EXPECT_NEAR(discrete_laplacian(net, f, u).real(), 0.5, 1e-13);
}

TEST(Laplacian, RejectsBoundaryVertex) {
    Network net = box_network(4, 4);
    auto f = field(net, [](cplx) { return cplx(1); });
    EXPECT_THROW(discrete_laplacian(net, f, 0), Error);
}

TEST(Dirichlet, ConstantData) {
    Network net = box_network(6, 5);
    auto h = solve_dirichlet(net, field(net, [](cplx) { return cplx(3); }));
    EXPECT_LT(max_error(net, h, [](cplx) { return cplx(3); }), 1e-12);
}

TEST(Dirichlet, LinearDataReproducedExactly) {
    Network net = lattice_network(1.0 / 8, [](cplx z) { return std::abs(z) < 1; });
    auto re = [](cplx z) { return cplx(z.real()); };
    auto im = [](cplx z) { return cplx(z.imag()); };
    EXPECT_LT(max_error(net, solve_dirichlet(net, field(net, re)), re), 1e-10);
    EXPECT_LT(max_error(net, solve_dirichlet(net, field(net, im)), im), 1e-10);
    HarmonicSolver S(net);
    EXPECT_LT(S.residual(S.solve(field(net, im))), 1e-10);
}

TEST(Dirichlet, QuadraticErrorDecreasesWithMesh) {
    auto g = [](cplx z) { return cplx((z * z).real() + 0.3 * std::exp(z).imag()); };
    double prev = 1e9;
    for (double d : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
        Network net = lattice_network(d, [](cplx z) { return z.real() > 0 && z.real() < 1 && z.imag() > 0 && z.imag() < 1; });
        double e = max_error(net, solve_dirichlet(net, field(net, g)), g);
        EXPECT_LT(e, prev);
        prev = e;
    }
}

TEST(HarmonicMeasure, OneStepExitIsOneQuarter) {
    Network net = box_network(3, 3);
    int centre = net.find({1, 1});
    for (Site s : {Site{0, 1}, Site{2, 1}, Site{1, 0}, Site{1, 2}}) {
        auto hm = harmonic_measure(net, net.find(s));
        EXPECT_NEAR(hm[centre], 0.25, 1e-15);
    }
    auto corner = harmonic_measure(net, net.find({0, 0}));
    EXPECT_NEAR(corner[centre], 0.0, 1e-15);
}

TEST(HarmonicMeasure, SumsToOne) {
    Network net = box_network(6, 7);
    std::vector<double> tot(net.size(), 0.0);
    for (int y : net.boundary_vertices()) {
        auto hm = harmonic_measure(net, y);
        for (int i = 0; i < net.size(); ++i) tot[i] += hm[i];
    }
    for (int u : net.interior_vertices()) EXPECT_NEAR(tot[u], 1.0, 1e-12);
}

TEST(Green, SymmetricAndSingleVertexValue) {
    Network net = box_network(6, 5);
    auto in = net.interior_vertices();
    for (int x : in)
        for (int y : in) ASSERT_NEAR(green_function(net, x)[y], green_function(net, y)[x], 1e-12);
    Network one = box_network(3, 3);
    int c = one.find({1, 1});
    EXPECT_NEAR(green_function(one, c)[c], -1.0, 1e-15);
}

TEST(Green, MassiveIsBetweenZeroAndOne) {
    Network net = box_network(9, 9);
    int c = net.find({4, 4});
    auto g = massive_green_function(net, c, 0.9);
    EXPECT_DOUBLE_EQ(g[c], 1.0);
    for (int u : net.interior_vertices()) {
        EXPECT_GE(g[u], 0.0);
        EXPECT_LE(g[u], 1.0);
    }
    EXPECT_THROW(massive_green_function(net, c, 1.5), Error);
}

TEST(Dbar, HolomorphicAndAntiHolomorphic) {
    cplx E(1, 0), N(0, 1), W(-1, 0), S(0, -1);
    EXPECT_NEAR(std::abs(dbar(E, N, W, S)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(dbar(1, 1, 1, 1)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(dbar(std::conj(E), std::conj(N), std::conj(W), std::conj(S))), 2.0, 1e-15);
}

TEST(Dbar, FaceStencilOnDomain) {
    Domain D = build_domain(ShapeSpec::rectangle(4, 4), 1.0, Variant::FK, Anchor::named("NW"), Anchor::named("SE"));
    std::vector<cplx> z(D.vertices.size()), zbar(D.vertices.size());
    for (std::size_t v = 0; v < D.vertices.size(); ++v) {
        z[v] = D.vertex_pos(int(v));
        zbar[v] = std::conj(z[v]);
    }
    for (int f = 0; f < int(D.faces.size()); ++f) {
        if (!D.faces[f].inner) continue;
        EXPECT_NEAR(std::abs(dbar_at_face(D, z, f)), 0.0, 1e-14);
        EXPECT_GT(std::abs(dbar_at_face(D, zbar, f)), 0.5);
    }
}

TEST(SHolomorphic, ZeroFieldPasses) {
    Domain D = build_domain(ShapeSpec::rectangle(3, 3), 1.0, Variant::FK, Anchor::named("NW"), Anchor::named("SE"));
    auto r = check_s_holomorphic(D, std::vector<cplx>(D.medial.size(), 0.0), 1e-12);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.max_gap, 0.0);
}

TEST(SHolomorphic, ExactObservablePassesAndPerturbationIsLocal) {
    Domain D = build_domain(ShapeSpec::rectangle(3, 4), 1.0, Variant::FK, Anchor::named("NE"), Anchor::named("SW"));
    auto F = fk_observable_exact(D, FKParams::self_dual(2), 2);
    auto r = check_s_holomorphic(D, F.vertex, 1e-12);
    EXPECT_TRUE(r.pass) << r.max_gap;
    int m = -1;
    for (int k = 0; k < int(D.medial.size()); ++k)
        if (D.is_full(k)) {
            m = k;
            break;
        }
    ASSERT_GE(m, 0);
    auto g = F.vertex;
    // a generic direction, so that no incident line is orthogonal to the perturbation
    g[m] += std::polar(0.1, 0.3);
    auto bad = check_s_holomorphic(D, g, 1e-12);
    EXPECT_FALSE(bad.pass);
    ASSERT_EQ(bad.violating.size(), 4u);
    for (int e : bad.violating) EXPECT_TRUE(D.medial_edges[e].from == m || D.medial_edges[e].to == m);
}

TEST(HField, ZeroFieldIsConstant) {
    Domain D = build_domain(ShapeSpec::rectangle(3, 3), 1.0, Variant::FK, Anchor::named("NW"), Anchor::named("SE"));
    auto H = integrate_H(D, std::vector<cplx>(D.medial.size(), 0.0), 0, 1.0);
    for (double h : H.black) EXPECT_DOUBLE_EQ(h, 1.0);
    for (double h : H.white) EXPECT_DOUBLE_EQ(h, 1.0);
    EXPECT_EQ(H.inconsistency, 0.0);
}

TEST(HField, LeastSquaresAgreesOnExactData) {
    Domain D = build_domain(ShapeSpec::rectangle(3, 3), 1.0, Variant::FK, Anchor::named("NW"), Anchor::named("SE"));
    auto F = fk_observable_exact(D, FKParams::self_dual(2), 2);
    int base = -1;
    for (std::size_t v = 0; v < D.vertices.size(); ++v)
        if (D.wired[v]) base = int(v);
    auto a = integrate_H_edges(D, F.edge, base, 1.0);
    auto b = least_squares_H(D, F.edge, base, 1.0);
    EXPECT_LT(a.inconsistency, 1e-12);
    for (std::size_t v = 0; v < a.black.size(); ++v) EXPECT_NEAR(a.black[v], b.black[v], 1e-10);
    for (std::size_t f = 0; f < a.white.size(); ++f) EXPECT_NEAR(a.white[f], b.white[f], 1e-10);
}

TEST(ModifiedWalk, BoundaryValuesAreZeroOrOne) {
    Domain D = build_domain(ShapeSpec::rectangle(4, 4), 1.0, Variant::FK, Anchor::named("NW"), Anchor::named("SE"));
    for (const auto& w : {black_walk(D), white_walk(D)}) {
        auto h = modified_harmonic_measure(w);
        for (int i = 0; i < w.net.size(); ++i) {
            EXPECT_GE(h[i], -1e-12);
            EXPECT_LE(h[i], 1 + 1e-12);
        }
    }
}
