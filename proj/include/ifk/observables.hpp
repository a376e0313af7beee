#pragma once

#include <string>
#include <vector>

#include "ifk/fk_model.hpp"
#include "ifk/geometry.hpp"
#include "ifk/spin_ising.hpp"

namespace ifk {

struct ObservableField {
    std::vector<cplx> edge;       // per medial edge (FK)
    std::vector<double> edge_err; // Monte Carlo standard error per medial edge
    std::vector<cplx> vertex;     // per medial vertex
    double p = 0, q = 0, beta = 0, sigma = 0;
    std::uint64_t domain_hash = 0;
    std::string method = "exact";
    std::size_t samples = 0;
};

// 1 - (2/pi) arccos(sqrt(q)/2)
double parafermion_spin(double q);

// Exploration path of a Dobrushin configuration (medial edges from start_edge to end_edge).
std::vector<int> exploration_path(const Domain& D, const std::vector<char>& state);
// W(path[k], b) in radians for every k.
std::vector<double> windings_to_end(const Domain& D, const std::vector<int>& path);

// E[exp(i sigma W(e,b)) 1{e in path}] by enumeration of the random states.
// fixed: per random state -1 (free), 0 or 1; sigma defaults to the value for q.
ObservableField fk_observable_exact(const Domain& D, double p, double q, double sigma = -1,
                                    const std::vector<signed char>& fixed = {});
ObservableField fk_observable_mc(const Domain& D, double p, double q, std::size_t samples, std::uint64_t seed,
                                 FKSamplerKind sampler = FKSamplerKind::SwendsenWang, int burn_in = 200,
                                 int thinning = 1);

// Vertex values: half-sum of the four edges at interior medial vertices; at
// boundary medial vertices the number whose projections give the incident edges.
std::vector<cplx> fk_vertex_values(const Domain& D, const std::vector<cplx>& edge);
// Edge values at geographic positions 0:E 1:N 2:W 3:S around m.
std::array<cplx, 4> edge_values_around(const Domain& D, const std::vector<cplx>& edge, int m);

// exp(i alpha) for the off-critical relation
cplx massive_phase(double p);
inline double massive_alpha(double p) { return std::arg(massive_phase(p)); }
// cos(2 alpha)
inline double massive_mass(double p) { return std::cos(2 * massive_alpha(p)); }
double strip_decay_rate(double p);

struct MassiveResidual {
    double relation = 0;   // max |F(A)-F(C) - i e^{i alpha}(F(B)-F(D))|
    double laplacian = 0;  // max |cos 2alpha * mean(F) - F| over the sites at distance sqrt2 delta
    double literal = 0;    // max |Delta F - (cos 2alpha - 1) F|
    int vertices = 0;
    int laplacian_vertices = 0;
};
// alpha_shift perturbs alpha (negative control).
MassiveResidual massive_residual(const Domain& D, const ObservableField& F, double p, double alpha_shift = 0);
// max |F(N)-F(S) - i[F(E)-F(W)]| over interior medial vertices.
double parafermionic_residual(const Domain& D, const ObservableField& F);

// Slit domain after the first exploration step: the first random medial
// vertex after a is frozen to state, the edge into it is removed and the
// exploration starts at the following edge.
Domain fk_slit_domain(const Domain& D, bool state);
// first random state met by the exploration path
int fk_first_variable(const Domain& D);

// Spin observable. The path starts at vertex v0 arriving in lattice direction
// d0; allowed marks usable primal edges. Weights r^{|omega|}, r = sqrt2 - 1.
struct SpinStart {
    int v0 = -1;
    int d0 = 0;
    std::vector<char> allowed;
};
SpinStart spin_start(const Domain& D);
// Sum over contour configurations from the start to the medial vertex z of
// exp(-i W / 2) r^{|omega|} (phase dropped when real_weights).
cplx spin_contour_sum(const Domain& D, const SpinStart& st, int z, bool real_weights = false,
                      double r = kSqrt2 - 1);
ObservableField spin_observable_exact(const Domain& D);
ObservableField spin_observable_from(const Domain& D, const SpinStart& st);

struct SpinFirstStep {
    SpinStart slit;
    double probability = 0;
    int edge = -1;
};
// All first steps of the interface from a, with their probabilities.
std::vector<SpinFirstStep> spin_first_steps(const Domain& D);

struct EnergyDensity {
    double mean = 0;
    double stderr_ = 0;
    double prediction = 0;
    int vertices = 0;
    std::size_t samples = 0;
};
// Nearest-neighbour correlation at the horizontal edge closest to the centre
// of the radius-r disk on delta Z^2, free boundary, critical temperature.
EnergyDensity energy_density_estimate(double radius, double delta, std::size_t samples, std::uint64_t seed,
                                      int burn_in = 2000, int wolff_per_sample = 2);

}  // namespace ifk
