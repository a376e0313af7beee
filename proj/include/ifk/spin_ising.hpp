#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ifk/graph.hpp"

namespace ifk {

// Boundary data: 0 for a free spin, +1 or -1 for a frozen one.
using SpinBC = std::vector<signed char>;

SpinBC free_bc(int n);
SpinBC fixed_bc(int n, const std::vector<int>& vertices, int value);

// tanh(beta*) = exp(-2 beta)
double dual_beta(double beta);

// Energy sum over edges of sigma_x sigma_y.
double spin_energy(const Graph& g, const std::vector<signed char>& s);

// Brute-force partition function over the free spins (at most 24).
double partition_enumerate(const Graph& g, double beta, const SpinBC& bc);
// Site-by-site transfer matrix on a w x h grid (w <= 20); returns log Z.
double log_partition_transfer(int w, int h, double beta, const SpinBC& bc);

// Exact law of the free spins; state bit i is +1 for the i-th free vertex.
struct SpinDistribution {
    std::vector<int> free_vertices;
    std::vector<double> prob;
};
SpinDistribution exact_spin_distribution(const Graph& g, double beta, const SpinBC& bc);
double exact_correlation(const Graph& g, double beta, const SpinBC& bc, int x, int y);

// Sum over even edge subsets of w^{|omega|} (at most 24 edges); with marks a != b,
// the sum over subsets odd exactly at a and b.
double even_subgraph_sum(const Graph& g, double w, int a = -1, int b = -1);
// Free-boundary partition function through the high-temperature expansion.
double ht_partition(const Graph& g, double beta);
// Two-point function through the high-temperature expansion.
double ht_correlation(const Graph& g, double beta, int a, int b);

// w x h primal grid with the outer ring frozen to +, bonds between two ring
// vertices omitted, and its dual grid of (w-1) x (h-1) faces.
struct DualPair {
    Graph primal;
    SpinBC bc;
    Graph dual;
};
DualPair kw_grids(int w, int h);
// Plus-boundary partition function through the low-temperature contour sum.
double lt_partition_plus(const DualPair& dp, double beta);
// |LHS - RHS| / RHS of the duality relation; shift perturbs beta*.
double kw_duality_residual(int w, int h, double beta, double beta_star_shift = 0.0);

enum class SpinSamplerKind { Metropolis, Wolff, SwendsenWang };
SpinSamplerKind parse_spin_sampler(const std::string& s);

class SpinSampler {
public:
    SpinSampler(Graph g, double beta, SpinBC bc, std::uint64_t seed);

    void randomize();
    void set_all(int value);
    // |free| single-site updates at uniformly chosen sites
    void metropolis_sweep();
    // one cluster update; returns the number of flipped spins
    int wolff_step();
    void swendsen_wang_sweep();
    // burn-in/thinning unit: one Metropolis or SW sweep, or Wolff steps
    // until about |V| spins were flipped
    void sweep(SpinSamplerKind kind);

    const std::vector<signed char>& spins() const { return s_; }
    std::vector<signed char>& spins() { return s_; }
    const Graph& graph() const { return g_; }
    Rng& rng() { return rng_; }
    double beta() const { return beta_; }

private:
    Graph g_;
    double beta_;
    SpinBC bc_;
    Rng rng_;
    std::vector<signed char> s_;
    std::vector<std::vector<int>> nb_;
    std::vector<int> free_;
    std::vector<int> stack_;
    std::vector<char> mark_;
    UnionFind uf_;
};

struct Estimate {
    double mean = 0;
    double stderr_ = 0;
};
// Jackknife error over nblocks consecutive blocks.
Estimate jackknife_mean(const std::vector<double>& xs, int nblocks = 50);

Estimate estimate_two_point(const Graph& g, double beta, const SpinBC& bc, int x, int y,
                            std::size_t samples, SpinSamplerKind kind, std::uint64_t seed,
                            int burn_in = 1000, int thinning = 10);

}  // namespace ifk
