#include <gtest/gtest.h>

#include "ifk/fk_model.hpp"
#include "ifk/geometry.hpp"

using namespace ifk;

TEST(Weight, AllClosedFree) {
    Graph g = grid_graph(3, 2);
    std::vector<char> closed(g.edges.size(), 0);
    FKParams par{0.3, 2.5};
    EXPECT_NEAR(fk_weight(g, closed, par, free_wiring(g.n)), std::pow(0.7, 7) * std::pow(2.5, 6), 1e-12);
}

TEST(Weight, SingleOpenEdge) {
    Graph g = path_graph(2);
    EXPECT_NEAR(fk_weight(g, {1}, FKParams{0.4, 2}, free_wiring(2)), 0.4 * 2, 1e-15);
}

TEST(Weight, SingleEdgeOpenProbability) {
    double p = FKParams::self_dual(2);
    auto d = exact_fk_distribution(path_graph(2), FKParams{p, 2}, free_wiring(2));
    ASSERT_EQ(d.prob.size(), 2u);
    EXPECT_NEAR(d.prob[1], p / (p + 2 * (1 - p)), 1e-15);
    EXPECT_NEAR(d.prob[1], 0.41421356237, 1e-10);
}

TEST(Distribution, PercolationFactorizes) {
    auto d = exact_fk_distribution(cycle_graph(3), FKParams{0.3, 1}, free_wiring(3));
    for (std::uint32_t s = 0; s < 8; ++s) {
        int k = __builtin_popcount(s);
        EXPECT_NEAR(d.prob[s], std::pow(0.3, k) * std::pow(0.7, 3 - k), 1e-15);
    }
}

TEST(Distribution, SmallGridSumsToOne) {
    auto d = exact_fk_distribution(grid_graph(2, 2), FKParams{0.5, 2}, free_wiring(4));
    EXPECT_EQ(d.prob.size(), 16u);
    double s = 0;
    for (double p : d.prob) s += p;
    EXPECT_NEAR(s, 1.0, 1e-14);
}

TEST(Distribution, FullyOpenAtPOne) {
    auto d = exact_fk_distribution(grid_graph(3, 2), FKParams{1.0, 2}, free_wiring(6));
    EXPECT_DOUBLE_EQ(d.prob.back(), 1.0);
}

TEST(Clusters, UnionFindAgreesWithBfs) {
    Graph g = grid_graph(4, 3);
    Wiring xi = wire_all(g.n, grid_ring(4, 3));
    Rng rng(4);
    for (int t = 0; t < 200; ++t) {
        std::vector<char> open(g.edges.size());
        for (auto& o : open) o = rng.bernoulli(0.5);
        ASSERT_EQ(fk_clusters(g, open, xi), fk_clusters_bfs(g, open, xi));
    }
}

TEST(Dual, AllOpenGivesAllClosed) {
    GridDuality gd = grid_duality(4, 4);
    std::vector<char> open(gd.primal.edges.size(), 1);
    auto dual = dual_configuration(gd, open);
    EXPECT_EQ(dual.size(), gd.dual.edges.size());
    for (char c : dual) EXPECT_EQ(c, 0);
}

TEST(Dual, PushforwardIsDualLaw) {
    GridDuality gd = grid_duality(3, 3);
    FKParams par{0.35, 2};
    auto primal = exact_fk_distribution(gd.primal, par, gd.xi);
    auto dual = exact_fk_distribution(gd.dual, FKParams{par.dual_p(), 2}, free_wiring(gd.dual.n));
    std::vector<double> pushed(dual.prob.size(), 0.0);
    for (std::uint32_t s = 0; s < primal.prob.size(); ++s) {
        auto star = dual_configuration(gd, primal.config(s, {}));
        std::uint32_t t = 0;
        for (std::size_t i = 0; i < dual.random_edges.size(); ++i)
            if (star[dual.random_edges[i]]) t |= 1u << i;
        pushed[t] += primal.prob[s];
    }
    for (std::size_t t = 0; t < pushed.size(); ++t) EXPECT_NEAR(pushed[t], dual.prob[t], 1e-13);
}

TEST(EdwardsSokal, ClosedEdgesGiveIndependentSpins) {
    Graph g = grid_graph(3, 3);
    std::vector<char> closed(g.edges.size(), 0);
    Rng rng(8);
    const int n = 100000;
    double m = 0;
    for (int i = 0; i < n; ++i)
        for (auto s : fk_to_spin(g, closed, free_wiring(g.n), rng)) m += s;
    m /= double(n) * g.n;
    EXPECT_LT(std::abs(m), 4 / std::sqrt(double(n) * g.n));
}

TEST(EdwardsSokal, OpenClustersAreMonochromatic) {
    Graph g = grid_graph(4, 4);
    Rng rng(2);
    std::vector<char> open(g.edges.size());
    for (auto& o : open) o = rng.bernoulli(0.5);
    auto s = fk_to_spin(g, open, free_wiring(g.n), rng);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (open[e]) EXPECT_EQ(s[g.edges[e][0]], s[g.edges[e][1]]);
    auto w = spin_to_fk(g, s, 0.7, rng);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (w[e]) EXPECT_EQ(s[g.edges[e][0]], s[g.edges[e][1]]);
}

TEST(Loops, AllClosedPathHugsTheFreeArc) {
    Domain D = build_domain(ShapeSpec::rectangle(2, 3), 1.0, Variant::FK, Anchor::named("NW"), Anchor::named("SE"));
    std::vector<char> closed(D.num_vars(), 0);
    auto L = loop_representation(D, closed);
    ASSERT_FALSE(L.path.empty());
    EXPECT_EQ(L.path.front(), D.start_edge);
    EXPECT_EQ(L.path.back(), D.end_edge);
    EXPECT_EQ(L.open, 0);
    // every primal vertex off the wired arc is isolated, each surrounded by one loop
    int isolated = 0;
    for (std::size_t v = 0; v < D.vertices.size(); ++v) isolated += !D.wired[v];
    EXPECT_EQ(L.loops + 1, dobrushin_primal_clusters(D, closed) + dobrushin_dual_clusters(D, closed) - 1);
    EXPECT_EQ(dobrushin_primal_clusters(D, closed), isolated + 1);
}

TEST(Loops, EulerRelationOnEveryConfiguration) {
    Domain D = build_domain(ShapeSpec::rectangle(3, 3), 1.0, Variant::FK, Anchor::named("NW"), Anchor::named("SE"));
    ASSERT_LE(D.num_vars(), 16);
    for (std::uint32_t s = 0; s < (1u << D.num_vars()); ++s) {
        std::vector<char> st(D.num_vars());
        for (int i = 0; i < D.num_vars(); ++i) st[i] = (s >> i) & 1;
        auto L = loop_representation(D, st);
        ASSERT_EQ(L.loops + 1, dobrushin_primal_clusters(D, st) + dobrushin_dual_clusters(D, st) - 1) << s;
    }
}

TEST(Sampler, SingleEdgeHeatBath) {
    double p = FKParams::self_dual(2);
    FKSampler S(path_graph(2), FKParams{p, 2}, free_wiring(2), {}, 12);
    const int n = 200000;
    int open = 0;
    for (int i = 0; i < n; ++i) {
        S.heat_bath_sweep();
        open += S.open()[0];
    }
    double want = p / (p + 2 * (1 - p));
    EXPECT_NEAR(double(open) / n, want, 4 * std::sqrt(want * (1 - want) / n));
}

TEST(Sampler, PercolationEdgeDensity) {
    Graph g = grid_graph(5, 5);
    FKSampler S(g, FKParams{0.3, 1}, free_wiring(g.n), {}, 6);
    const int n = 5000;
    double open = 0;
    for (int i = 0; i < n; ++i) {
        S.heat_bath_sweep();
        for (char o : S.open()) open += o;
    }
    double trials = double(n) * g.edges.size();
    EXPECT_NEAR(open / trials, 0.3, 4 * std::sqrt(0.21 / trials));
}

TEST(Sampler, FixedEdgesRespected) {
    Graph g = grid_graph(3, 3);
    EdgeConstraint fixed(g.edges.size(), -1);
    fixed[0] = 1;
    fixed[1] = 0;
    FKSampler S(g, FKParams{0.5, 2}, free_wiring(g.n), fixed, 1);
    for (int i = 0; i < 50; ++i) {
        S.sweep(FKSamplerKind::SwendsenWang);
        S.sweep(FKSamplerKind::HeatBath);
        ASSERT_EQ(S.open()[0], 1);
        ASSERT_EQ(S.open()[1], 0);
    }
}
