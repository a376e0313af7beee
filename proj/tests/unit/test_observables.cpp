#include <gtest/gtest.h>

#include "ifk/discrete_analysis.hpp"
#include "ifk/fk_model.hpp"
#include "ifk/observables.hpp"

using namespace ifk;

namespace {

Domain fk_rect(int w, int h, const char* a, const char* b) {
    return build_domain(ShapeSpec::rectangle(w, h), 1.0, Variant::FK, Anchor::named(a), Anchor::named(b));
}

}  // namespace

TEST(Parafermion, SpinValues) {
    EXPECT_NEAR(parafermion_spin(2), 0.5, 1e-15);
    EXPECT_NEAR(parafermion_spin(1), 1 - 2 / kPi * std::acos(0.5), 1e-15);
    EXPECT_NEAR(parafermion_spin(3), 1 - 2 / kPi * std::acos(std::sqrt(3.0) / 2), 1e-15);
}

TEST(Parafermion, RelationHoldsAtSelfDualPoint) {
    Domain D = fk_rect(2, 3, "NW", "SE");
    for (double q : {1.0, 2.0, 3.0}) {
        auto F = fk_observable_exact(D, FKParams::self_dual(q), q);
        EXPECT_LT(parafermionic_residual(D, F), 1e-10) << q;
    }
}

TEST(Parafermion, WrongSpinBreaksTheRelation) {
    Domain D = fk_rect(3, 4, "NE", "SW");
    double q = 3;
    auto F = fk_observable_exact(D, FKParams::self_dual(q), q, parafermion_spin(q) + 0.1);
    EXPECT_GT(parafermionic_residual(D, F), 1e-3);
}

TEST(FkObservable, TerminalEdgeHasUnitModulus) {
    for (auto [a, b] : {std::pair{"NW", "SE"}, std::pair{"NE", "SW"}}) {
        Domain D = fk_rect(3, 3, a, b);
        auto F = fk_observable_exact(D, FKParams::self_dual(2), 2);
        EXPECT_NEAR(std::abs(F.edge[D.end_edge]), 1.0, 1e-13);
        EXPECT_NEAR(std::abs(F.edge[D.start_edge]), 1.0, 1e-13);
    }
}

TEST(FkObservable, EdgeValuesLieOnTheirLines) {
    Domain D = fk_rect(3, 4, "NW", "SE");
    auto F = fk_observable_exact(D, FKParams::self_dual(2), 2);
    for (int e = 0; e < int(D.medial_edges.size()); ++e) {
        if (!D.medial_edges[e].active) continue;
        cplx l = line_of_dir(D.medial_edges[e].dir);
        EXPECT_NEAR((F.edge[e] / l).imag(), 0.0, 1e-13);
    }
}

TEST(FkObservable, BoundaryModulusIsConnectionProbability) {
    // on a free-arc boundary edge, |F(e)| is the probability that the interface
    // passes, i.e. that the adjacent vertex connects to the wired arc
    Domain D = fk_rect(3, 3, "NW", "SE");
    double p = FKParams::self_dual(2);
    auto F = fk_observable_exact(D, p, 2);
    DobrushinGraph dg = dobrushin_graph(D);
    int wired = -1;
    for (std::size_t v = 0; v < D.vertices.size(); ++v)
        if (D.wired[v]) wired = int(v);
    int checked = 0;
    for (int e = 0; e < int(D.medial_edges.size()); ++e) {
        const auto& me = D.medial_edges[e];
        if (!me.active || !D.free_arc[me.black] || me.white < 0 || D.faces[me.white].inner) continue;
        if (D.outer_face.empty() || !D.outer_face[me.white]) continue;
        double conn = exact_connection_probability(dg.g, FKParams{p, 2}, dg.xi, me.black, wired);
        EXPECT_NEAR(std::abs(F.edge[e]), conn, 1e-12) << e;
        ++checked;
    }
    EXPECT_GT(checked, 0);
}

TEST(FkObservable, VertexValuesProjectToEdges) {
    Domain D = fk_rect(3, 4, "NE", "SW");
    auto F = fk_observable_exact(D, FKParams::self_dual(2), 2);
    for (int e = 0; e < int(D.medial_edges.size()); ++e) {
        const auto& me = D.medial_edges[e];
        if (!me.active) continue;
        cplx l = line_of_dir(me.dir);
        EXPECT_NEAR(std::abs(project(F.vertex[me.from], l) - F.edge[e]), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(project(F.vertex[me.to], l) - F.edge[e]), 0.0, 1e-12);
    }
}

TEST(FkObservable, ZeroEdgesGiveZeroVertex) {
    Domain D = fk_rect(3, 3, "NW", "SE");
    auto v = fk_vertex_values(D, std::vector<cplx>(D.medial_edges.size(), 0.0));
    for (auto z : v) EXPECT_EQ(z, cplx(0));
}

TEST(FkObservable, MonteCarloAgreesWithEnumeration) {
    Domain D = fk_rect(3, 3, "NW", "SE");
    double p = FKParams::self_dual(2);
    auto ex = fk_observable_exact(D, p, 2);
    auto mc = fk_observable_mc(D, p, 2, 100000, 21);
    for (int e = 0; e < int(D.medial_edges.size()); ++e) {
        if (!D.medial_edges[e].active) continue;
        EXPECT_LT(std::abs(ex.edge[e] - mc.edge[e]), 5 * mc.edge_err[e] + 1e-3) << e;
    }
}

TEST(Massive, PhaseTrivialAtSelfDualPoint) {
    EXPECT_NEAR(massive_alpha(FKParams::self_dual(2)), 0.0, 1e-15);
    EXPECT_NEAR(massive_mass(FKParams::self_dual(2)), 1.0, 1e-15);
}

TEST(Massive, RelationHoldsOffCritical) {
    Domain D = fk_rect(2, 3, "NW", "SE");
    for (double p : {0.3, 0.6}) {
        auto F = fk_observable_exact(D, p, 2);
        auto r = massive_residual(D, F, p);
        EXPECT_LT(r.relation, 1e-10) << p;
    }
}

TEST(Massive, ShiftedPhaseBreaksTheRelation) {
    Domain D = fk_rect(2, 3, "NW", "SE");
    auto F = fk_observable_exact(D, 0.3, 2);
    EXPECT_GT(massive_residual(D, F, 0.3, 0.1).relation, 1e-3);
}

TEST(StripDecay, VanishesAtSelfDualPointAndDecreases) {
    EXPECT_NEAR(strip_decay_rate(FKParams::self_dual(2)), 0.0, 1e-12);
    EXPECT_GT(strip_decay_rate(0.5), 0.0);
    double prev = 1e300;
    for (double p = 0.1; p < FKParams::self_dual(2); p += 0.02) {
        double x = strip_decay_rate(p);
        EXPECT_LT(x, prev) << p;
        prev = x;
    }
}

TEST(SpinObservable, EqualsOneAtTheEndpoint) {
    Domain D = build_domain(ShapeSpec::disk(1), 1.0 / 3, Variant::Spin, Anchor::at({-1, 0}), Anchor::at({1, 0}));
    auto F = spin_observable_exact(D);
    EXPECT_NEAR(std::abs(F.vertex[D.b] - cplx(1)), 0.0, 1e-12);
}

TEST(SpinObservable, SHolomorphicOnRotatedLines) {
    Domain D = build_domain(ShapeSpec::disk(1), 1.0 / 3, Variant::Spin, Anchor::at({-1, 0}), Anchor::at({1, 0}));
    auto F = spin_observable_exact(D);
    std::vector<cplx> g(F.vertex.size());
    for (std::size_t m = 0; m < g.size(); ++m) g[m] = F.vertex[m] * std::polar(1.0, -kPi / 8);
    EXPECT_LT(check_s_holomorphic(D, g, 1e-10).max_gap, 1e-10);
}

TEST(SpinObservable, FirstStepProbabilitiesSumToOne) {
    Domain D = build_domain(ShapeSpec::rectangle(3, 2), 1.0, Variant::Spin, Anchor::named("SW"), Anchor::named("SE"));
    double tot = 0;
    for (const auto& s : spin_first_steps(D)) tot += s.probability;
    EXPECT_NEAR(tot, 1.0, 1e-12);
}

TEST(EnergyDensity, NearTheLimitOnSmallDisk) {
    auto e = energy_density_estimate(1.0, 1.0 / 8, 20000, 3);
    EXPECT_GT(e.mean, 0.6);
    EXPECT_LT(e.mean, 0.8);
    EXPECT_NEAR(e.prediction, kSqrt2 / 2 - 1.0 / 8 / kPi, 1e-15);
    EXPECT_GT(e.stderr_, 0.0);
}
