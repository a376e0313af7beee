#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ifk/geometry.hpp"

namespace ifk {

// Random-walk network: interior vertices carry the harmonic equation,
// the others hold boundary values. Jump rates need not be symmetric.
struct Network {
    double delta = 1.0;
    std::vector<cplx> pos;
    std::vector<Site> sites;
    std::vector<char> interior;
    std::vector<std::vector<std::pair<int, double>>> out;  // (target, rate)

    int size() const { return int(pos.size()); }
    int find(Site s) const;
    std::vector<int> interior_vertices() const;
    std::vector<int> boundary_vertices() const;
    void rebuild_index();
    // returns the existing index when s is already present
    int add_site(Site s, cplx p, bool is_interior);

private:
    std::unordered_map<std::uint64_t, int> index_;
};

// Lattice delta*Z^2 (origin + delta*(x + iy)). Interior: sites whose
// position satisfies inside; boundary: outside neighbours of interior sites.
Network lattice_network(double delta, const std::function<bool(cplx)>& inside, cplx origin = {});
// w x h box of sites, the outer ring is the boundary.
Network box_network(int w, int h, double delta = 1.0, cplx origin = {});

// 1/4 sum (f(v) - f(u)) over the four neighbours; throws unless u is interior
cplx discrete_laplacian(const Network& net, const std::vector<cplx>& f, int u);

// Solves h(x) = m * sum_y r(x,y) h(y) / sum_y r(x,y) + s(x) at interior x,
// h = g elsewhere. Factorizes once per network and mass.
class HarmonicSolver {
public:
    explicit HarmonicSolver(const Network& net, double mass = 1.0);
    ~HarmonicSolver();
    std::vector<cplx> solve(const std::vector<cplx>& g, const std::vector<cplx>& source = {}) const;
    // max over interior x of |h(x) - m * mean - s(x)|
    double residual(const std::vector<cplx>& h, const std::vector<cplx>& source = {}) const;

private:
    struct Impl;
    const Network& net_;
    double mass_;
    std::unique_ptr<Impl> impl_;
};

std::vector<cplx> solve_dirichlet(const Network& net, const std::vector<cplx>& g);
// Exit distribution through the boundary vertex y.
std::vector<double> harmonic_measure(const Network& net, int y);
// Delta G = delta_y with G = 0 off the interior; with mass m < 1 the
// killed-walk version h = m * mean off y, h(y) = 1.
std::vector<double> green_function(const Network& net, int y);
std::vector<double> massive_green_function(const Network& net, int y, double m);

// Walks on the FK domain with boundary-modified rates rho = 2/(sqrt2 + 1).
// black: primal vertices, 1 on the wired arc, jumps out of the free arc to 0.
// white: faces, 0 on the dual arc, jumps across the wired arc to 1.
struct ModifiedWalk {
    Network net;
    std::vector<double> boundary_value;
    std::vector<int> domain_index;  // network vertex -> domain vertex/face, -1 for extra sites
};
inline double modified_rate() { return 2.0 / (kSqrt2 + 1.0); }
ModifiedWalk black_walk(const Domain& D, double rho = modified_rate());
ModifiedWalk white_walk(const Domain& D, double rho = modified_rate());
std::vector<double> modified_harmonic_measure(const ModifiedWalk& w);

// 1/2 [f(E) - f(W)] + i/2 [f(N) - f(S)]
inline cplx dbar(cplx fE, cplx fN, cplx fW, cplx fS) { return 0.5 * (fE - fW) + cplx(0, 0.5) * (fN - fS); }
// Cauchy-Riemann gap on a rhombus z[0..3] (counterclockwise), normalized
// to agree with dbar on an E, N, W, S stencil.
cplx cauchy_riemann_gap(const std::array<cplx, 4>& z, const std::array<cplx, 4>& f);
// dbar of a primal field at face fc of the domain; throws if a corner is missing.
cplx dbar_at_face(const Domain& D, const std::vector<cplx>& f, int fc);

struct SHolomorphicReport {
    double max_gap = 0;
    std::vector<int> violating;  // medial edges with gap >= tol
    bool pass = true;
};
SHolomorphicReport check_s_holomorphic(const Domain& D, const std::vector<cplx>& f, double tol);

// H(black) - H(white) = scale * |P_l(e) f(x)|^2 across each active medial edge.
struct HField {
    std::vector<double> black;   // per domain vertex
    std::vector<double> white;   // per face
    double inconsistency = 0;    // max path-dependence
};
// f on medial vertices; base is a domain vertex with H = base_value.
HField integrate_H(const Domain& D, const std::vector<cplx>& f, int base, double scale, double base_value = 1.0);
// Same increments from given edge values (each F(e) on its line).
HField integrate_H_edges(const Domain& D, const std::vector<cplx>& fe, int base, double scale,
                         double base_value = 1.0);
// Least-squares fit of the same increments over all edges at once; agrees
// with integrate_H_edges on exact data and averages out noisy edge values.
// inconsistency is then the largest edge residual.
HField least_squares_H(const Domain& D, const std::vector<cplx>& fe, int base, double scale,
                       double base_value = 1.0);
// 1/4 sum over lattice neighbours; NaN unless all four exist
double black_laplacian(const Domain& D, const HField& H, int v);
double white_laplacian(const Domain& D, const HField& H, int f);

}  // namespace ifk
