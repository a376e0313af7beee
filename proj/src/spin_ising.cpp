#include "ifk/spin_ising.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace ifk {

SpinBC free_bc(int n) { return SpinBC(n, 0); }

SpinBC fixed_bc(int n, const std::vector<int>& vertices, int value) {
    SpinBC bc(n, 0);
    for (int v : vertices) bc.at(v) = static_cast<signed char>(value > 0 ? 1 : -1);
    return bc;
}

double dual_beta(double beta) { return std::atanh(std::exp(-2.0 * beta)); }

double spin_energy(const Graph& g, const std::vector<signed char>& s) {
    double e = 0;
    for (auto [u, v] : g.edges) e += s[u] * s[v];
    return e;
}

namespace {

std::vector<int> free_vertices(const SpinBC& bc) {
    std::vector<int> f;
    for (int i = 0; i < int(bc.size()); ++i)
        if (bc[i] == 0) f.push_back(i);
    return f;
}

void check_bc(const Graph& g, const SpinBC& bc) {
    if (int(bc.size()) != g.n) throw Error("boundary data size does not match the graph");
}

// Visit every free-spin state in Gray-code order; f(state, spins, energy).
template <class F>
void for_each_state(const Graph& g, const SpinBC& bc, F&& f) {
    check_bc(g, bc);
    auto fr = free_vertices(bc);
    if (fr.size() > 24) throw Error("too many free spins to enumerate (limit 24)");
    auto nb = g.neighbours();
    std::vector<signed char> s(g.n);
    for (int i = 0; i < g.n; ++i) s[i] = bc[i] ? bc[i] : -1;
    double e = spin_energy(g, s);
    std::uint32_t state = 0;
    const std::uint64_t total = std::uint64_t(1) << fr.size();
    f(state, s, e);
    for (std::uint64_t k = 1; k < total; ++k) {
        int bit = std::countr_zero(k);
        int v = fr[bit];
        int h = 0;
        for (int w : nb[v]) h += s[w];
        e -= 2.0 * s[v] * h;
        s[v] = static_cast<signed char>(-s[v]);
        state ^= 1u << bit;
        f(state, s, e);
    }
}

}  // namespace

double partition_enumerate(const Graph& g, double beta, const SpinBC& bc) {
    double z = 0;
    for_each_state(g, bc, [&](std::uint32_t, const auto&, double e) { z += std::exp(beta * e); });
    return z;
}

double log_partition_transfer(int w, int h, double beta, const SpinBC& bc) {
    if (w < 1 || h < 1 || w > 20) throw Error("transfer matrix needs 1 <= width <= 20");
    if (int(bc.size()) != w * h) throw Error("boundary data size does not match the grid");
    const std::size_t ns = std::size_t(1) << w;
    std::vector<double> cur(ns, 0.0), nxt(ns);
    cur[0] = 1.0;
    double logz = 0;
    const double ep = std::exp(beta), em = std::exp(-beta);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::fill(nxt.begin(), nxt.end(), 0.0);
            const std::size_t bx = std::size_t(1) << x;
            for (std::size_t st = 0; st < ns; ++st) {
                double z = cur[st];
                if (z == 0) continue;
                for (int sv = 0; sv < 2; ++sv) {
                    int spin = sv ? 1 : -1;
                    signed char fx = bc[x + w * y];
                    if (fx && fx != spin) continue;
                    double wgt = z;
                    if (y > 0) wgt *= (((st & bx) != 0) == bool(sv)) ? ep : em;
                    if (x > 0) wgt *= (((st >> (x - 1)) & 1) == std::size_t(sv)) ? ep : em;
                    nxt[sv ? (st | bx) : (st & ~bx)] += wgt;
                }
            }
            double m = *std::max_element(nxt.begin(), nxt.end());
            if (m <= 0) throw Error("transfer matrix underflow");
            for (auto& v : nxt) v /= m;
            logz += std::log(m);
            std::swap(cur, nxt);
        }
    return logz + std::log(std::accumulate(cur.begin(), cur.end(), 0.0));
}

SpinDistribution exact_spin_distribution(const Graph& g, double beta, const SpinBC& bc) {
    SpinDistribution d;
    d.free_vertices = free_vertices(bc);
    d.prob.assign(std::size_t(1) << d.free_vertices.size(), 0.0);
    double emax = -1e300;
    for_each_state(g, bc, [&](std::uint32_t, const auto&, double e) { emax = std::max(emax, e); });
    double z = 0;
    for_each_state(g, bc, [&](std::uint32_t st, const auto&, double e) {
        double p = std::exp(beta * (e - emax));
        d.prob[st] = p;
        z += p;
    });
    for (auto& p : d.prob) p /= z;
    return d;
}

double exact_correlation(const Graph& g, double beta, const SpinBC& bc, int x, int y) {
    double z = 0, c = 0;
    for_each_state(g, bc, [&](std::uint32_t, const auto& s, double e) {
        double p = std::exp(beta * e);
        z += p;
        c += p * s[x] * s[y];
    });
    return c / z;
}

double even_subgraph_sum(const Graph& g, double w, int a, int b) {
    const int m = int(g.edges.size());
    if (m > 24) throw Error("too many edges to enumerate (limit 24)");
    if (g.n > 64) throw Error("too many vertices for parity masks (limit 64)");
    std::vector<std::uint64_t> emask(m);
    for (int e = 0; e < m; ++e)
        emask[e] = (std::uint64_t(1) << g.edges[e][0]) ^ (std::uint64_t(1) << g.edges[e][1]);
    std::uint64_t target = 0;
    if (a >= 0 && b >= 0 && a != b) target = (std::uint64_t(1) << a) | (std::uint64_t(1) << b);
    std::vector<double> pw(m + 1, 1.0);
    for (int k = 1; k <= m; ++k) pw[k] = pw[k - 1] * w;
    std::uint64_t parity = 0;
    int size = 0;
    double sum = parity == target ? 1.0 : 0.0;
    const std::uint64_t total = std::uint64_t(1) << m;
    std::uint32_t cfg = 0;
    for (std::uint64_t k = 1; k < total; ++k) {
        int e = std::countr_zero(k);
        cfg ^= 1u << e;
        parity ^= emask[e];
        size += (cfg >> e) & 1 ? 1 : -1;
        if (parity == target) sum += pw[size];
    }
    return sum;
}

double ht_partition(const Graph& g, double beta) {
    return std::pow(2.0, g.n) * std::pow(std::cosh(beta), double(g.edges.size())) *
           even_subgraph_sum(g, std::tanh(beta));
}

double ht_correlation(const Graph& g, double beta, int a, int b) {
    if (a == b) return 1.0;
    double t = std::tanh(beta);
    return even_subgraph_sum(g, t, a, b) / even_subgraph_sum(g, t);
}

DualPair kw_grids(int w, int h) {
    if (w < 2 || h < 2) throw Error("duality grids need at least 2 x 2 vertices");
    DualPair dp;
    Graph full = grid_graph(w, h);
    dp.primal.n = full.n;
    dp.primal.pos = full.pos;
    auto ring = grid_ring(w, h);
    dp.bc = fixed_bc(full.n, ring, +1);
    for (auto e : full.edges)
        if (!(dp.bc[e[0]] && dp.bc[e[1]])) dp.primal.add_edge(e[0], e[1]);
    dp.dual = grid_graph(w - 1, h - 1);
    for (auto& p : dp.dual.pos) p += cplx(0.5, 0.5);
    return dp;
}

double lt_partition_plus(const DualPair& dp, double beta) {
    return std::exp(beta * double(dp.dual.edges.size())) * even_subgraph_sum(dp.dual, std::exp(-2.0 * beta));
}

// Z^+_{beta,G} / (e^{beta |E*|}) = sum_{even w in G*} e^{-2 beta |w|}
//   = Z^f_{beta*,G*} / (2^{|V*|} cosh(beta*)^{|E*|})
double kw_duality_residual(int w, int h, double beta, double beta_star_shift) {
    auto dp = kw_grids(w, h);
    double zp = partition_enumerate(dp.primal, beta, dp.bc);
    double bs = dual_beta(beta) + beta_star_shift;
    double lhs = zp / std::exp(beta * double(dp.dual.edges.size()));
    double rhs = partition_enumerate(dp.dual, bs, free_bc(dp.dual.n)) /
                 (std::pow(2.0, dp.dual.n) * std::pow(std::cosh(bs), double(dp.dual.edges.size())));
    return std::abs(lhs - rhs) / std::abs(rhs);
}

SpinSamplerKind parse_spin_sampler(const std::string& s) {
    if (s == "metropolis") return SpinSamplerKind::Metropolis;
    if (s == "wolff") return SpinSamplerKind::Wolff;
    if (s == "sw" || s == "swendsen-wang" || s == "swendsen_wang") return SpinSamplerKind::SwendsenWang;
    throw Error("unknown spin sampler '" + s + "' (metropolis, wolff, sw)");
}

SpinSampler::SpinSampler(Graph g, double beta, SpinBC bc, std::uint64_t seed)
    : g_(std::move(g)), beta_(beta), bc_(std::move(bc)), rng_(seed) {
    check_bc(g_, bc_);
    nb_ = g_.neighbours();
    free_ = free_vertices(bc_);
    s_.resize(g_.n);
    mark_.assign(g_.n, 0);
    randomize();
}

void SpinSampler::randomize() {
    for (int i = 0; i < g_.n; ++i) s_[i] = bc_[i] ? bc_[i] : (rng_.bernoulli(0.5) ? 1 : -1);
}

void SpinSampler::set_all(int value) {
    for (int i = 0; i < g_.n; ++i) s_[i] = bc_[i] ? bc_[i] : static_cast<signed char>(value);
}

void SpinSampler::metropolis_sweep() {
    for (std::size_t k = 0; k < free_.size(); ++k) {
        int v = free_[rng_.below(free_.size())];
        int h = 0;
        for (int w : nb_[v]) h += s_[w];
        double de = 2.0 * s_[v] * h;
        if (de <= 0 || rng_.uniform() < std::exp(-beta_ * de)) s_[v] = static_cast<signed char>(-s_[v]);
    }
}

int SpinSampler::wolff_step() {
    if (free_.empty()) return 0;
    const double padd = 1.0 - std::exp(-2.0 * beta_);
    int seed = free_[rng_.below(free_.size())];
    signed char sv = s_[seed];
    stack_.clear();
    std::vector<int> cluster{seed};
    mark_[seed] = 1;
    stack_.push_back(seed);
    bool frozen = false;
    while (!stack_.empty() && !frozen) {
        int v = stack_.back();
        stack_.pop_back();
        for (int w : nb_[v]) {
            if (mark_[w] || s_[w] != sv || !rng_.bernoulli(padd)) continue;
            if (bc_[w]) {
                frozen = true;
                break;
            }
            mark_[w] = 1;
            cluster.push_back(w);
            stack_.push_back(w);
        }
    }
    for (int v : cluster) {
        mark_[v] = 0;
        if (!frozen) s_[v] = static_cast<signed char>(-sv);
    }
    return frozen ? 0 : int(cluster.size());
}

void SpinSampler::swendsen_wang_sweep() {
    const double padd = 1.0 - std::exp(-2.0 * beta_);
    uf_.reset(g_.n);
    for (auto [u, v] : g_.edges)
        if (s_[u] == s_[v] && rng_.bernoulli(padd)) uf_.unite(u, v);
    // 0: undecided, 1: keep, 2: flip
    std::vector<signed char> act(g_.n, 0);
    for (int i = 0; i < g_.n; ++i)
        if (bc_[i]) act[uf_.find(i)] = 1;
    for (int i = 0; i < g_.n; ++i) {
        int r = uf_.find(i);
        if (!act[r]) act[r] = rng_.bernoulli(0.5) ? 2 : 1;
        if (act[r] == 2) s_[i] = static_cast<signed char>(-s_[i]);
    }
}

void SpinSampler::sweep(SpinSamplerKind kind) {
    switch (kind) {
        case SpinSamplerKind::Metropolis: metropolis_sweep(); break;
        case SpinSamplerKind::SwendsenWang: swendsen_wang_sweep(); break;
        case SpinSamplerKind::Wolff: {
            int steps = std::max<int>(1, int(free_.size()) / 8);
            for (int i = 0; i < steps; ++i) wolff_step();
            break;
        }
    }
}

Estimate jackknife_mean(const std::vector<double>& xs, int nblocks) {
    Estimate est;
    const std::size_t n = xs.size();
    if (n == 0) return est;
    double total = std::accumulate(xs.begin(), xs.end(), 0.0);
    est.mean = total / double(n);
    nblocks = int(std::min<std::size_t>(std::size_t(std::max(nblocks, 2)), n));
    if (nblocks < 2) return est;
    std::size_t bs = n / std::size_t(nblocks);
    std::vector<double> loo(nblocks);
    for (int k = 0; k < nblocks; ++k) {
        double s = 0;
        for (std::size_t i = k * bs; i < (k + 1) * bs; ++i) s += xs[i];
        loo[k] = (total - s) / double(n - bs);
    }
    double m = std::accumulate(loo.begin(), loo.end(), 0.0) / nblocks;
    double v = 0;
    for (double x : loo) v += (x - m) * (x - m);
    est.stderr_ = std::sqrt(v * double(nblocks - 1) / nblocks);
    return est;
}

Estimate estimate_two_point(const Graph& g, double beta, const SpinBC& bc, int x, int y,
                            std::size_t samples, SpinSamplerKind kind, std::uint64_t seed,
                            int burn_in, int thinning) {
    SpinSampler s(g, beta, bc, seed);
    for (int i = 0; i < burn_in; ++i) s.sweep(kind);
    std::vector<double> xs;
    xs.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        for (int i = 0; i < thinning; ++i) s.sweep(kind);
        xs.push_back(double(s.spins()[x] * s.spins()[y]));
    }
    return jackknife_mean(xs);
}

}  // namespace ifk
