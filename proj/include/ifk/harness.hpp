#pragma once

#include <string>
#include <vector>

#include "ifk/observables.hpp"

namespace ifk {

// Unit disk with a = -1, b = 1.
// phi: disk -> strip R x (0,1), a -> -inf, b -> +inf
cplx strip_map(cplx z);
cplx strip_map_derivative(cplx z);
// psi: disk -> upper half-plane, a -> inf, b -> 0; returns sqrt(psi'(z)/psi'(b)) = 2/(1+z)
cplx spin_target(cplx z);
// kind: "sqrt_phi_prime", "im_phi", "sqrt_psi_prime_ratio"
cplx conformal_target(const std::string& kind, cplx z);

struct CorrelationLengthResult {
    double beta = 0, x = 0, y = 0;
    double s = 0;
    double tau = 0;
};
// Bisection for sqrt(1+s^2x^2) + sqrt(1+s^2y^2) = sinh 2b + 1/sinh 2b.
CorrelationLengthResult correlation_length(double beta, double x, double y);
// p = 1 - exp(-2 beta)
inline double fk_p_of_beta(double beta) { return 1.0 - std::exp(-2.0 * beta); }

struct MassiveDecayFit {
    double beta = 0;
    double mass = 0;
    double rate = 0;   // fitted decay rate of G_m(0, n e1)
    double tau = 0;    // correlation length formula along the axis
    int box = 0;
    int n_lo = 0, n_hi = 0;
};
// G_m(0, .) on a box with absorbing boundary; fits log G = c - rate n - log(n)/2.
MassiveDecayFit massive_green_decay(double beta, int n_lo = 8, int n_hi = 30);

// Loewner chain of a curve in the upper half-plane started at 0, by vertical slits.
struct LoewnerTrace {
    std::vector<double> t;      // half-plane capacity after k slits
    std::vector<double> W;      // driving value at t[k]
    std::vector<cplx> curve;    // the zipped input points
    std::vector<double> dt, xi, height;  // slit data, used for reconstruction
    bool crossing = false;      // a point was mapped below the real axis
};
// Stops once the capacity reaches t_stop.
LoewnerTrace zip_curve(const std::vector<cplx>& curve, double t_stop = 1e300);
std::vector<cplx> unzip_curve(const LoewnerTrace& tr);
// Max distance between the curve and its reconstruction, relative to the
// curve diameter. Points whose slit-domain height is below min_height (deep
// in channels pinched below double precision) are counted, not compared.
struct RoundTrip {
    double error = 0;
    int checked = 0;
    int unresolved = 0;
};
RoundTrip zipper_roundtrip(const std::vector<cplx>& curve, double t_stop = 1e300, double min_height = 1e-9);

// Moebius map of the unit disk onto the upper half-plane sending the
// boundary points nearest to a and b to 0 and infinity, with 0 -> i.
cplx disk_to_halfplane(cplx z, cplx a, cplx b);
// Keeps points inside the unit disk, maps them and starts the curve at 0.
std::vector<cplx> curve_to_halfplane(const std::vector<cplx>& disk_curve, cplx a, cplx b);

struct KappaEstimate {
    double kappa = 0;
    double lo = 0, hi = 0;  // 95% bootstrap interval
    int used = 0;
    int discarded = 0;
    std::vector<double> tgrid, variance;  // lags s and pooled Var[W(t+s) - W(t)]
};
// W on a grid of ngrid capacities in [t_lo, t_hi]; kappa is the least-squares
// slope of the increment variance against the lag (lags up to half the window).
KappaEstimate estimate_kappa(const std::vector<LoewnerTrace>& traces, double t_lo, double t_hi, int ngrid,
                             std::uint64_t seed, int bootstrap = 200);

// Interfaces between a = -1 and b = 1 on a disk about L lattice spacings across.
std::vector<std::vector<cplx>> fk_interfaces(int L, int count, std::uint64_t seed, int burn_in = 200,
                                             int sweeps_between = 20);
std::vector<std::vector<cplx>> spin_interfaces(int L, int count, std::uint64_t seed, int burn_in = 200,
                                               int sweeps_between = 20);

struct CrossingEstimate {
    int n = 0;
    double p = 0;
    double prob = 0;
    double stderr_ = 0;
    std::size_t samples = 0;
};
// Left-right open crossing of the (4n+1) x (n+1) grid, free boundary, q = 2.
CrossingEstimate rsw_crossing(int n, double p, std::size_t samples, std::uint64_t seed, int burn_in = 100,
                              int sweeps_between = 2);
// Open path between the boundaries of the annulus S_{n,2n}, both boundaries wired as one class.
CrossingEstimate annulus_crossing(int n, double p, std::size_t samples, std::uint64_t seed, int burn_in = 100,
                                  int sweeps_between = 2);

struct TwoPointProfile {
    int L = 0;
    double beta = 0;
    std::vector<double> r, g, err;
    std::vector<std::vector<double>> batches;  // batch means per distance
    std::size_t measurements = 0;
};
// Axis two-point function on the L x L torus from Wolff cluster indicators.
TwoPointProfile torus_two_point(int L, double beta, std::size_t measurements, std::uint64_t seed,
                                int burn_in = 500, int steps_between = 4);

struct ExponentFit {
    double eta = 0, eta_err = 0;
    double rate = 0;            // exponential model decay rate
    double aic_power = 0, aic_exp = 0;
    int points = 0;
};
// log-log slope over [rmin, rmax]; also fits log G = c - rate r for comparison
ExponentFit fit_exponent(const TwoPointProfile& prof, double rmin, double rmax);
// -log2(G_L(r) / G_{L/2}(r/2)) averaged over even r in [rmin, rmax]; the
// torus scaling function cancels between the two sizes.
double finite_size_ratio_eta(const TwoPointProfile& large, const TwoPointProfile& small, double rmin, double rmax);

struct Chi2Result {
    std::string sampler;
    double statistic = 0;
    int dof = 0;
    double p_value = 0;
    std::size_t samples = 0;
    std::vector<double> expected, observed;  // per state
};
// Empirical state frequencies of a sampler against the enumerated law.
// Free boundary conditions; states with expected count < 5 are pooled.
Chi2Result spin_sampler_chi2(const Graph& g, double beta, SpinSamplerKind kind, std::size_t samples,
                             std::uint64_t seed, int thinning = 5);
Chi2Result fk_sampler_chi2(const Graph& g, const FKParams& par, FKSamplerKind kind, std::size_t samples,
                           std::uint64_t seed, int thinning = 5);

struct EnergySlope {
    std::vector<EnergyDensity> points;
    std::vector<double> deltas;
    double slope = 0, slope_err = 0, intercept = 0;
};
// Fits <s_x s_y> = c + slope * delta over the given meshes of the unit disk.
EnergySlope energy_density_slope(const std::vector<double>& deltas, std::size_t samples, std::uint64_t seed);

struct ProbeRow {
    double delta = 0;
    cplx z;
    cplx value;   // F_delta / sqrt(2 delta) at the nearest medial vertex
    cplx target;
    double error = 0;
    double noise = 0;
};
struct ConvergenceTable {
    std::vector<ProbeRow> rows;
    std::vector<double> deltas;
    std::vector<double> max_error, max_noise;       // observable, per delta
    std::vector<double> h_error, h_noise;            // H field vs Im phi on |z| <= h_radius
};
ConvergenceTable fk_observable_convergence(const std::vector<double>& deltas, const std::vector<cplx>& probes,
                                           std::size_t samples, std::uint64_t seed, double h_radius = 0.5);
ConvergenceTable spin_observable_convergence(const std::vector<double>& deltas, const std::vector<cplx>& probes);

}  // namespace ifk
