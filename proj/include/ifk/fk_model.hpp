#pragma once

#include <string>
#include <vector>

#include "ifk/geometry.hpp"
#include "ifk/graph.hpp"

namespace ifk {

struct FKParams {
    double p = 0.5;
    double q = 2.0;

    // (1-p)q / ((1-p)q + p)
    double dual_p() const { return (1 - p) * q / ((1 - p) * q + p); }
    // p / (sqrt(q)(1-p))
    double x() const { return p / (std::sqrt(q) * (1 - p)); }
    static double self_dual(double q) { return std::sqrt(q) / (1 + std::sqrt(q)); }
};

// Boundary partition: wiring class per vertex, -1 for an unwired vertex.
using Wiring = std::vector<int>;
Wiring free_wiring(int n);
Wiring wire_all(int n, const std::vector<int>& vertices);

// Edge constraint: -1 random, 0 closed, 1 open.
using EdgeConstraint = std::vector<signed char>;

// Clusters of the open subgraph with each wiring class counted once.
int fk_clusters(const Graph& g, const std::vector<char>& open, const Wiring& xi);
// BFS recount, kept independent of the union-find path.
int fk_clusters_bfs(const Graph& g, const std::vector<char>& open, const Wiring& xi);
double fk_weight(const Graph& g, const std::vector<char>& open, const FKParams& par, const Wiring& xi);

// Exact law over the random edges (at most 24); state bit i is the i-th random edge.
struct FKDistribution {
    std::vector<int> random_edges;
    std::vector<double> prob;
    std::vector<char> config(std::uint32_t state, const EdgeConstraint& fixed) const;
};
FKDistribution exact_fk_distribution(const Graph& g, const FKParams& par, const Wiring& xi,
                                     const EdgeConstraint& fixed = {});
// Probability of {x <-> y} under the exact law.
double exact_connection_probability(const Graph& g, const FKParams& par, const Wiring& xi, int x, int y);

// w x h grid whose outer ring is wired (ring-to-ring edges dropped) and its
// free dual on the (w-1) x (h-1) inner faces; dual_of maps primal to dual edges.
struct GridDuality {
    Graph primal;
    Wiring xi;
    Graph dual;
    std::vector<int> dual_of;
};
GridDuality grid_duality(int w, int h);
std::vector<char> dual_configuration(const GridDuality& gd, const std::vector<char>& open);

// Edwards-Sokal coupling (q = 2).
std::vector<signed char> fk_to_spin(const Graph& g, const std::vector<char>& open, const Wiring& xi, Rng& rng);
std::vector<char> spin_to_fk(const Graph& g, const std::vector<signed char>& spins, double p, Rng& rng);

// FK-Dobrushin domain seen as a graph: wired arc as one class, wired boundary
// walk edges fixed open.
struct DobrushinGraph {
    Graph g;
    Wiring xi;
    EdgeConstraint fixed;
    std::vector<int> var_of_edge;  // random state index of each edge, -1 if fixed
};
DobrushinGraph dobrushin_graph(const Domain& D);
// Convert between per-edge states and the domain's random states.
std::vector<char> domain_state(const DobrushinGraph& dg, const std::vector<char>& open);
std::vector<char> edge_states(const DobrushinGraph& dg, const std::vector<char>& state);

// Exploration path and loops of a Dobrushin configuration.
struct LoopConfiguration {
    std::vector<int> path;     // medial edges of the exploration path, from start_edge to end_edge
    std::vector<int> loop_of;  // per medial edge: -1 on the path, loop index, -2 inactive
    int loops = 0;
    int open = 0;              // open random edges
};
// Whether the medial vertex m is open (fixed roles resolved).
bool medial_open(const Domain& D, const std::vector<char>& state, int m);
// Successor of medial edge e given the states, -1 at the end.
int next_medial_edge(const Domain& D, const std::vector<char>& state, int e);
LoopConfiguration loop_representation(const Domain& D, const std::vector<char>& state);
// Primal clusters (wired arc merged) and dual clusters (dual arc merged).
int dobrushin_primal_clusters(const Domain& D, const std::vector<char>& state);
int dobrushin_dual_clusters(const Domain& D, const std::vector<char>& state);

enum class FKSamplerKind { HeatBath, SwendsenWang };
FKSamplerKind parse_fk_sampler(const std::string& s);

class FKSampler {
public:
    FKSampler(Graph g, FKParams par, Wiring xi, EdgeConstraint fixed, std::uint64_t seed);

    // resample edge e from its conditional law given the others
    void heat_bath_step(int e);
    void heat_bath_sweep();
    // q = 2 only
    void swendsen_wang_sweep();
    void sweep(FKSamplerKind kind);

    const std::vector<char>& open() const { return open_; }
    std::vector<char>& open() { return open_; }
    const Graph& graph() const { return g_; }
    Rng& rng() { return rng_; }

private:
    bool connected_without(int e);

    Graph g_;
    FKParams par_;
    Wiring xi_;
    EdgeConstraint fixed_;
    Rng rng_;
    std::vector<char> open_;
    std::vector<int> random_;
    std::vector<std::vector<int>> adj_;
    std::vector<std::vector<int>> classes_;
    std::vector<int> seen_;
    int stamp_ = 0;
    std::vector<int> queue_;
    UnionFind uf_;
};

}  // namespace ifk
