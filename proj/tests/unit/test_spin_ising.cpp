#include <gtest/gtest.h>

#include "ifk/spin_ising.hpp"

using namespace ifk;

namespace {

Graph single_edge() { return path_graph(2); }

}  // namespace

TEST(Partition, SingleEdgeIsFourCosh) {
    EXPECT_NEAR(partition_enumerate(single_edge(), 1.0, free_bc(2)), 4 * std::cosh(1.0), 1e-12);
    EXPECT_NEAR(4 * std::cosh(1.0), 6.17232, 1e-5);
}

TEST(Partition, SingleVertexIsTwo) {
    Graph g;
    g.add_vertex();
    EXPECT_DOUBLE_EQ(partition_enumerate(g, 0.7, free_bc(1)), 2.0);
}

TEST(Partition, TransferMatchesEnumerationWithPlusBoundary) {
    double bc = beta_critical();
    Graph g = grid_graph(4, 4);
    SpinBC plus = fixed_bc(16, grid_ring(4, 4), +1);
    double z = partition_enumerate(g, bc, plus);
    EXPECT_NEAR(log_partition_transfer(4, 4, bc, plus), std::log(z), 1e-12);
    Graph g2 = grid_graph(2, 2);
    SpinBC plus2 = fixed_bc(4, grid_ring(2, 2), +1);
    EXPECT_NEAR(log_partition_transfer(2, 2, bc, plus2), std::log(partition_enumerate(g2, bc, plus2)), 1e-12);
}

TEST(Partition, TransferMatchesEnumerationFree) {
    EXPECT_NEAR(log_partition_transfer(3, 5, 0.6, free_bc(15)),
                std::log(partition_enumerate(grid_graph(3, 5), 0.6, free_bc(15))), 1e-12);
}

TEST(HighTemperature, SingleEdgeCorrelationIsTanh) {
    for (double b : {0.1, 0.5, 1.0, 2.0}) EXPECT_NEAR(ht_correlation(single_edge(), b, 0, 1), std::tanh(b), 1e-15);
}

TEST(HighTemperature, SingleEdgePartition) {
    EXPECT_NEAR(ht_partition(single_edge(), 1.0), 4 * std::cosh(1.0), 1e-12);
}

TEST(HighTemperature, TriangleContourSum) {
    Graph g = cycle_graph(3);
    for (double b : {0.2, 0.8}) {
        double t = std::tanh(b);
        EXPECT_NEAR(even_subgraph_sum(g, t), 1 + t * t * t, 1e-15);
        EXPECT_NEAR(ht_partition(g, b), 8 * std::pow(std::cosh(b), 3) * (1 + t * t * t), 1e-12);
        EXPECT_NEAR(ht_partition(g, b), partition_enumerate(g, b, free_bc(3)), 1e-12);
    }
}

TEST(HighTemperature, CorrelationMatchesEnumerationOnGrid) {
    Graph g = grid_graph(3, 3);
    EXPECT_NEAR(ht_correlation(g, 0.4, 0, 8), exact_correlation(g, 0.4, free_bc(9), 0, 8), 1e-13);
}

TEST(Duality, DualBetaIsInvolution) {
    EXPECT_NEAR(dual_beta(dual_beta(0.3)), 0.3, 1e-14);
    EXPECT_NEAR(dual_beta(beta_critical()), beta_critical(), 1e-14);
}

TEST(Duality, ResidualVanishesOnSmallGrids) {
    EXPECT_LT(kw_duality_residual(2, 2, 0.3), 1e-10);
    EXPECT_LT(kw_duality_residual(3, 3, beta_critical()), 1e-10);
}

TEST(Duality, ShiftedDualBetaBreaksTheRelation) {
    EXPECT_GT(kw_duality_residual(3, 3, beta_critical(), 0.01), 1e-3);
}

TEST(Distribution, SumsToOne) {
    auto d = exact_spin_distribution(grid_graph(3, 2), 0.5, free_bc(6));
    double s = 0;
    for (double p : d.prob) s += p;
    EXPECT_NEAR(s, 1.0, 1e-14);
    EXPECT_EQ(d.prob.size(), 64u);
}

TEST(Sampler, SingleEdgeAgreementProbability) {
    const double want = std::exp(1.0) / (2 * std::cosh(1.0));
    for (auto kind : {SpinSamplerKind::Metropolis, SpinSamplerKind::Wolff, SpinSamplerKind::SwendsenWang}) {
        SpinSampler S(single_edge(), 1.0, free_bc(2), 17);
        const int n = 200000;
        int agree = 0;
        for (int i = 0; i < n; ++i) {
            S.sweep(kind);
            agree += S.spins()[0] == S.spins()[1];
        }
        double p = double(agree) / n, se = std::sqrt(want * (1 - want) / n);
        EXPECT_NEAR(p, want, 4 * se) << int(kind);
    }
}

TEST(Sampler, InfiniteTemperatureIsUnbiased) {
    SpinSampler S(grid_graph(5, 5), 0.0, free_bc(25), 3);
    const int n = 20000;
    double m = 0;
    for (int i = 0; i < n; ++i) {
        S.metropolis_sweep();
        for (auto s : S.spins()) m += s;
    }
    m /= double(n) * 25;
    EXPECT_LT(std::abs(m), 4 / std::sqrt(double(n) * 25));
}

TEST(Sampler, FrozenSpinsStayFrozen) {
    SpinBC bc = fixed_bc(9, grid_ring(3, 3), -1);
    SpinSampler S(grid_graph(3, 3), 0.4, bc, 5);
    for (int i = 0; i < 100; ++i) {
        S.sweep(SpinSamplerKind::Wolff);
        S.sweep(SpinSamplerKind::SwendsenWang);
        S.sweep(SpinSamplerKind::Metropolis);
        for (int v : grid_ring(3, 3)) ASSERT_EQ(S.spins()[v], -1);
    }
}

TEST(TwoPoint, SameSiteIsOne) {
    auto e = estimate_two_point(grid_graph(4, 4), 0.3, free_bc(16), 5, 5, 100, SpinSamplerKind::Wolff, 1);
    EXPECT_DOUBLE_EQ(e.mean, 1.0);
}

TEST(TwoPoint, SingleEdgeIsTanh) {
    auto e = estimate_two_point(single_edge(), 1.0, free_bc(2), 0, 1, 100000, SpinSamplerKind::Metropolis, 9, 100, 1);
    EXPECT_NEAR(e.mean, std::tanh(1.0), 4 * e.stderr_ + 1e-3);
}

TEST(Parsing, SamplerNames) {
    EXPECT_EQ(parse_spin_sampler("wolff"), SpinSamplerKind::Wolff);
    EXPECT_EQ(parse_spin_sampler("swendsen_wang"), SpinSamplerKind::SwendsenWang);
    EXPECT_THROW(parse_spin_sampler("glauber"), Error);
}
