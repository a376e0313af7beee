#include <gtest/gtest.h>

#include <random>

#include "ifk/harness.hpp"

using namespace ifk;

TEST(ConformalTarget, StripMapImaginaryPartAtCentre) {
    EXPECT_NEAR(conformal_target("im_phi", 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(strip_map(0).imag(), 0.5, 1e-15);
}

TEST(ConformalTarget, SpinRatioAtCentre) {
    EXPECT_NEAR(std::abs(conformal_target("sqrt_psi_prime_ratio", 0) - cplx(2)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(spin_target(0.5) - cplx(4.0 / 3)), 0.0, 1e-15);
}

TEST(ConformalTarget, SqrtDerivativeAtCentre) {
    EXPECT_NEAR(std::abs(conformal_target("sqrt_phi_prime", 0) - std::sqrt(2 / kPi)), 0.0, 1e-15);
    EXPECT_NEAR(std::sqrt(2 / kPi), 0.79788, 1e-5);
}

TEST(ConformalTarget, DerivativeMatchesFiniteDifference) {
    cplx z(0.2, -0.3), h(1e-6, 0);
    cplx fd = (strip_map(z + h) - strip_map(z - h)) / (2.0 * h);
    EXPECT_NEAR(std::abs(fd - strip_map_derivative(z)), 0.0, 1e-8);
    EXPECT_THROW(conformal_target("nope", 0), Error);
}

TEST(CorrelationLength, SymmetricInTheDirection) {
    double b = beta_critical() - 0.05;
    auto r1 = correlation_length(b, 3, 4);
    auto r2 = correlation_length(b, 4, 3);
    EXPECT_NEAR(r1.tau, r2.tau, 1e-12);
    EXPECT_GT(r1.tau, 0);
    EXPECT_THROW(correlation_length(beta_critical() + 0.01, 1, 0), Error);
}

TEST(CorrelationLength, MassiveGreenDecayMatchesAxisRate) {
    auto f = massive_green_decay(0.3);
    EXPECT_NEAR(f.rate, f.tau, 0.05 * f.tau);
}

TEST(Loewner, VerticalSlitHasZeroDriving) {
    std::vector<cplx> curve;
    for (int k = 0; k <= 50; ++k) curve.push_back(cplx(0, 0.02 * k));
    auto tr = zip_curve(curve);
    ASSERT_FALSE(tr.W.empty());
    for (double w : tr.W) EXPECT_NEAR(w, 0.0, 1e-12);
    // a slit of height h has capacity h^2/4
    EXPECT_NEAR(tr.t.back(), 0.25, 1e-9);
}

TEST(Loewner, RoundTripReconstructsCurve) {
    std::vector<cplx> curve{0.0};
    for (int k = 1; k <= 200; ++k) {
        double s = 0.01 * k;
        curve.push_back(cplx(0.3 * std::sin(3 * s), s));
    }
    auto rt = zipper_roundtrip(curve);
    EXPECT_LT(rt.error, 1e-6);
    EXPECT_GT(rt.checked, 100);
}

TEST(Loewner, DiskMapSendsMarksToZeroAndInfinity) {
    EXPECT_LT(std::abs(disk_to_halfplane(-1.0 + 1e-12, -1, 1)), 1e-6);
    EXPECT_GT(std::abs(disk_to_halfplane(1.0 - 1e-9, -1, 1)), 1e6);
    EXPECT_NEAR(std::abs(disk_to_halfplane(0, -1, 1) - cplx(0, 1)), 0.0, 1e-12);
}

TEST(Kappa, BrownianDrivingRecoversDiffusivity) {
    // synthetic traces with W = sqrt(kappa) B_t on a fine grid
    const double kappa = 4.0;
    Rng rng(5);
    std::normal_distribution<double> n01;
    std::vector<LoewnerTrace> traces(2000);
    for (auto& tr : traces) {
        double w = 0;
        for (int k = 0; k <= 400; ++k) {
            tr.t.push_back(k * 0.0025);
            tr.W.push_back(w);
            w += std::sqrt(kappa * 0.0025) * n01(rng);
        }
    }
    auto est = estimate_kappa(traces, 0.0, 1.0, 41, 1, 50);
    EXPECT_NEAR(est.kappa, kappa, 0.4);
    EXPECT_LE(est.lo, est.kappa);
    EXPECT_GE(est.hi, est.kappa);
}

TEST(Crossing, SubcriticalRarelyCrosses) {
    auto c = rsw_crossing(8, 0.3, 300, 2);
    EXPECT_LT(c.prob, 0.05);
}

TEST(Chi2, SamplersMatchEnumeratedLaw) {
    Graph g = cycle_graph(4);
    for (auto kind : {SpinSamplerKind::Metropolis, SpinSamplerKind::Wolff, SpinSamplerKind::SwendsenWang}) {
        auto r = spin_sampler_chi2(g, 0.4, kind, 100000, 7);
        EXPECT_GT(r.p_value, 0.001) << r.sampler;
        EXPECT_GT(r.dof, 0);
    }
    for (auto kind : {FKSamplerKind::HeatBath, FKSamplerKind::SwendsenWang}) {
        auto r = fk_sampler_chi2(g, FKParams{FKParams::self_dual(2), 2}, kind, 100000, 7);
        EXPECT_GT(r.p_value, 0.001) << r.sampler;
    }
}

TEST(Exponent, InfiniteTemperatureCorrelationVanishes) {
    auto prof = torus_two_point(16, 0.0, 2000, 4, 10, 1);
    ASSERT_GT(prof.g.size(), 2u);
    for (std::size_t i = 0; i < prof.r.size(); ++i)
        if (prof.r[i] > 0) EXPECT_LT(std::abs(prof.g[i]), 4 * prof.err[i] + 1e-3) << prof.r[i];
}

TEST(Convergence, SingleMeshPipelineIdentity) {
    // the probe at b is the normalization point: observable and target are both 1
    auto t = spin_observable_convergence({1.0 / 3}, {cplx(1.0), cplx(0.0)});
    ASSERT_EQ(t.rows.size(), 2u);
    const auto& b = t.rows[0];
    EXPECT_NEAR(std::abs(b.value - cplx(1)), 0.0, 1e-12);
    EXPECT_EQ(b.target, cplx(1));
    EXPECT_NEAR(b.error, 0.0, 1e-12);
    const auto& c = t.rows[1];
    EXPECT_NEAR(c.error, std::abs(c.value - c.target), 1e-15);
    ASSERT_EQ(t.max_error.size(), 1u);
    EXPECT_DOUBLE_EQ(t.max_error[0], std::max(b.error, c.error));
}
