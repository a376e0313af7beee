#include "ifk/fk_model.hpp"

#include <algorithm>
#include <bit>

namespace ifk {

Wiring free_wiring(int n) { return Wiring(n, -1); }

Wiring wire_all(int n, const std::vector<int>& vertices) {
    Wiring xi(n, -1);
    for (int v : vertices) xi.at(v) = 0;
    return xi;
}

namespace {

void unite_classes(UnionFind& uf, const Wiring& xi) {
    std::vector<int> first;
    for (int v = 0; v < int(xi.size()); ++v) {
        int c = xi[v];
        if (c < 0) continue;
        if (c >= int(first.size())) first.resize(c + 1, -1);
        if (first[c] < 0) first[c] = v;
        else uf.unite(first[c], v);
    }
}

void check_sizes(const Graph& g, const std::vector<char>& open, const Wiring& xi) {
    if (open.size() != g.edges.size()) throw Error("edge states do not match the graph");
    if (int(xi.size()) != g.n) throw Error("wiring does not match the graph");
}

}  // namespace

int fk_clusters(const Graph& g, const std::vector<char>& open, const Wiring& xi) {
    check_sizes(g, open, xi);
    UnionFind uf(g.n);
    unite_classes(uf, xi);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (open[e]) uf.unite(g.edges[e][0], g.edges[e][1]);
    return uf.components();
}

int fk_clusters_bfs(const Graph& g, const std::vector<char>& open, const Wiring& xi) {
    check_sizes(g, open, xi);
    auto adj = g.adjacency();
    std::vector<std::vector<int>> cls;
    for (int v = 0; v < g.n; ++v)
        if (xi[v] >= 0) {
            if (xi[v] >= int(cls.size())) cls.resize(xi[v] + 1);
            cls[xi[v]].push_back(v);
        }
    std::vector<char> seen(g.n, 0), cseen(cls.size(), 0);
    int count = 0;
    std::vector<int> q;
    for (int s = 0; s < g.n; ++s) {
        if (seen[s]) continue;
        ++count;
        seen[s] = 1;
        q.assign(1, s);
        while (!q.empty()) {
            int v = q.back();
            q.pop_back();
            if (xi[v] >= 0 && !cseen[xi[v]]) {
                cseen[xi[v]] = 1;
                for (int w : cls[xi[v]])
                    if (!seen[w]) {
                        seen[w] = 1;
                        q.push_back(w);
                    }
            }
            for (int e : adj[v]) {
                if (!open[e]) continue;
                int w = g.edges[e][0] == v ? g.edges[e][1] : g.edges[e][0];
                if (!seen[w]) {
                    seen[w] = 1;
                    q.push_back(w);
                }
            }
        }
    }
    return count;
}

double fk_weight(const Graph& g, const std::vector<char>& open, const FKParams& par, const Wiring& xi) {
    int o = int(std::count(open.begin(), open.end(), 1));
    int c = int(open.size()) - o;
    return std::pow(par.p, o) * std::pow(1 - par.p, c) * std::pow(par.q, fk_clusters(g, open, xi));
}

std::vector<char> FKDistribution::config(std::uint32_t state, const EdgeConstraint& fixed) const {
    std::size_t m = fixed.empty() ? random_edges.size() : fixed.size();
    std::vector<char> open(m, 0);
    for (std::size_t e = 0; e < fixed.size(); ++e) open[e] = fixed[e] == 1;
    for (std::size_t i = 0; i < random_edges.size(); ++i) open[random_edges[i]] = (state >> i) & 1;
    return open;
}

FKDistribution exact_fk_distribution(const Graph& g, const FKParams& par, const Wiring& xi,
                                     const EdgeConstraint& fixed) {
    const int m = int(g.edges.size());
    EdgeConstraint fx = fixed.empty() ? EdgeConstraint(m, -1) : fixed;
    if (int(fx.size()) != m) throw Error("edge constraint does not match the graph");
    FKDistribution d;
    for (int e = 0; e < m; ++e)
        if (fx[e] < 0) d.random_edges.push_back(e);
    if (d.random_edges.size() > 24) throw Error("too many random edges to enumerate (limit 24)");
    const std::uint32_t total = 1u << d.random_edges.size();
    d.prob.resize(total);
    double z = 0;
    for (std::uint32_t st = 0; st < total; ++st) {
        d.prob[st] = fk_weight(g, d.config(st, fx), par, xi);
        z += d.prob[st];
    }
    for (auto& p : d.prob) p /= z;
    return d;
}

double exact_connection_probability(const Graph& g, const FKParams& par, const Wiring& xi, int x, int y) {
    auto d = exact_fk_distribution(g, par, xi);
    EdgeConstraint fx(g.edges.size(), -1);
    double s = 0;
    for (std::uint32_t st = 0; st < d.prob.size(); ++st) {
        auto open = d.config(st, fx);
        UnionFind uf(g.n);
        unite_classes(uf, xi);
        for (std::size_t e = 0; e < g.edges.size(); ++e)
            if (open[e]) uf.unite(g.edges[e][0], g.edges[e][1]);
        if (uf.find(x) == uf.find(y)) s += d.prob[st];
    }
    return s;
}

GridDuality grid_duality(int w, int h) {
    if (w < 2 || h < 2) throw Error("duality grids need at least 2 x 2 vertices");
    GridDuality gd;
    Graph full = grid_graph(w, h);
    gd.primal.n = full.n;
    gd.primal.pos = full.pos;
    gd.xi = wire_all(full.n, grid_ring(w, h));
    gd.dual = grid_graph(w - 1, h - 1);
    for (auto& p : gd.dual.pos) p += cplx(0.5, 0.5);
    const int dw = w - 1;
    auto cell = [&](int x, int y) { return x + dw * y; };
    auto dual_edge = [&](int c0, int c1) {
        for (int e = 0; e < int(gd.dual.edges.size()); ++e) {
            auto [a, b] = gd.dual.edges[e];
            if ((a == c0 && b == c1) || (a == c1 && b == c0)) return e;
        }
        throw Error("grid duality: missing dual edge");
    };
    for (auto [u, v] : full.edges) {
        if (gd.xi[u] >= 0 && gd.xi[v] >= 0) continue;
        int x = u % w, y = u / w;
        bool horizontal = v == u + 1;
        int c0 = horizontal ? cell(x, y - 1) : cell(x - 1, y);
        int c1 = cell(x, y);
        gd.primal.add_edge(u, v);
        gd.dual_of.push_back(dual_edge(c0, c1));
    }
    return gd;
}

std::vector<char> dual_configuration(const GridDuality& gd, const std::vector<char>& open) {
    if (open.size() != gd.primal.edges.size()) throw Error("edge states do not match the graph");
    std::vector<char> d(gd.dual.edges.size(), 0);
    for (std::size_t e = 0; e < open.size(); ++e) d[gd.dual_of[e]] = !open[e];
    return d;
}

std::vector<signed char> fk_to_spin(const Graph& g, const std::vector<char>& open, const Wiring& xi, Rng& rng) {
    check_sizes(g, open, xi);
    UnionFind uf(g.n);
    unite_classes(uf, xi);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (open[e]) uf.unite(g.edges[e][0], g.edges[e][1]);
    std::vector<signed char> colour(g.n, 0), s(g.n);
    for (int v = 0; v < g.n; ++v) {
        int r = uf.find(v);
        if (!colour[r]) colour[r] = rng.bernoulli(0.5) ? 1 : -1;
        s[v] = colour[r];
    }
    return s;
}

std::vector<char> spin_to_fk(const Graph& g, const std::vector<signed char>& spins, double p, Rng& rng) {
    if (int(spins.size()) != g.n) throw Error("spins do not match the graph");
    std::vector<char> open(g.edges.size(), 0);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        open[e] = spins[g.edges[e][0]] == spins[g.edges[e][1]] && rng.bernoulli(p);
    return open;
}

DobrushinGraph dobrushin_graph(const Domain& D) {
    if (D.variant != Variant::FK) throw Error("Dobrushin graph needs an FK domain");
    DobrushinGraph dg;
    for (int i = 0; i < int(D.vertices.size()); ++i) dg.g.add_vertex(D.vertex_pos(i));
    for (auto [i, j] : D.edges) dg.g.add_edge(i, j);
    dg.xi.assign(D.vertices.size(), -1);
    for (int i = 0; i < int(D.vertices.size()); ++i)
        if (D.wired[i]) dg.xi[i] = 0;
    dg.fixed.assign(D.edges.size(), -1);
    dg.var_of_edge.assign(D.edges.size(), -1);
    for (int e = 0; e < int(D.edges.size()); ++e) {
        const auto& mv = D.medial[D.medial_of_edge[e]];
        dg.var_of_edge[e] = mv.var;
        if (mv.role == MedialRole::FixedOpen) dg.fixed[e] = 1;
        else if (mv.role == MedialRole::FixedClosed) dg.fixed[e] = 0;
    }
    return dg;
}

std::vector<char> domain_state(const DobrushinGraph& dg, const std::vector<char>& open) {
    int nv = 0;
    for (int v : dg.var_of_edge) nv = std::max(nv, v + 1);
    std::vector<char> st(nv, 0);
    for (std::size_t e = 0; e < open.size(); ++e)
        if (dg.var_of_edge[e] >= 0) st[dg.var_of_edge[e]] = open[e];
    return st;
}

std::vector<char> edge_states(const DobrushinGraph& dg, const std::vector<char>& state) {
    std::vector<char> open(dg.g.edges.size(), 0);
    for (std::size_t e = 0; e < open.size(); ++e)
        open[e] = dg.var_of_edge[e] >= 0 ? state.at(dg.var_of_edge[e]) : dg.fixed[e] == 1;
    return open;
}

bool medial_open(const Domain& D, const std::vector<char>& state, int m) {
    const auto& mv = D.medial[m];
    switch (mv.role) {
        case MedialRole::Variable: return state[mv.var] != 0;
        case MedialRole::FixedOpen: return true;
        default: return false;
    }
}

int next_medial_edge(const Domain& D, const std::vector<char>& state, int e) {
    int m = D.medial_edges[e].to;
    if (D.medial[m].role == MedialRole::End) return -1;
    return medial_open(D, state, m) ? D.next_open[e] : D.next_closed[e];
}

LoopConfiguration loop_representation(const Domain& D, const std::vector<char>& state) {
    if (int(state.size()) != D.num_vars()) throw Error("configuration does not match the domain");
    const int ne = int(D.medial_edges.size());
    LoopConfiguration lc;
    lc.loop_of.assign(ne, -2);
    for (int e = 0; e < ne; ++e)
        if (D.medial_edges[e].active) lc.loop_of[e] = -3;
    for (int e = D.start_edge; e >= 0; e = next_medial_edge(D, state, e)) {
        if (lc.loop_of[e] != -3 || int(lc.path.size()) > ne) throw Error("exploration path does not close at b");
        lc.loop_of[e] = -1;
        lc.path.push_back(e);
    }
    if (lc.path.empty() || lc.path.back() != D.end_edge) throw Error("exploration path does not end at b");
    for (int e0 = 0; e0 < ne; ++e0) {
        if (lc.loop_of[e0] != -3) continue;
        int e = e0;
        do {
            if (e < 0 || lc.loop_of[e] != -3) throw Error("medial strand does not close into a loop");
            lc.loop_of[e] = lc.loops;
            e = next_medial_edge(D, state, e);
        } while (e != e0);
        ++lc.loops;
    }
    lc.open = int(std::count(state.begin(), state.end(), 1));
    return lc;
}

int dobrushin_primal_clusters(const Domain& D, const std::vector<char>& state) {
    UnionFind uf(int(D.vertices.size()));
    int w0 = -1;
    for (int i = 0; i < int(D.vertices.size()); ++i)
        if (D.wired[i]) {
            if (w0 < 0) w0 = i;
            else uf.unite(w0, i);
        }
    for (int e = 0; e < int(D.edges.size()); ++e)
        if (medial_open(D, state, D.medial_of_edge[e])) uf.unite(D.edges[e][0], D.edges[e][1]);
    return uf.components();
}

int dobrushin_dual_clusters(const Domain& D, const std::vector<char>& state) {
    UnionFind uf(int(D.faces.size()));
    int o0 = -1;
    for (int f = 0; f < int(D.faces.size()); ++f)
        if (D.outer_face[f]) {
            if (o0 < 0) o0 = f;
            else uf.unite(o0, f);
        }
    for (int e = 0; e < int(D.edges.size()); ++e) {
        if (medial_open(D, state, D.medial_of_edge[e])) continue;
        Site s = D.vertices[D.edges[e][0]], t = D.vertices[D.edges[e][1]];
        Site lo = (s.x < t.x || s.y < t.y) ? s : t;
        bool horizontal = s.y == t.y;
        int f0 = horizontal ? D.face_at({lo.x, lo.y - 1}) : D.face_at({lo.x - 1, lo.y});
        int f1 = D.face_at(lo);
        if (f0 >= 0 && f1 >= 0) uf.unite(f0, f1);
    }
    return uf.components();
}

FKSamplerKind parse_fk_sampler(const std::string& s) {
    if (s == "heat-bath" || s == "heatbath" || s == "heat_bath") return FKSamplerKind::HeatBath;
    if (s == "sw" || s == "swendsen-wang" || s == "swendsen_wang") return FKSamplerKind::SwendsenWang;
    throw Error("unknown FK sampler '" + s + "' (heat-bath, sw)");
}

FKSampler::FKSampler(Graph g, FKParams par, Wiring xi, EdgeConstraint fixed, std::uint64_t seed)
    : g_(std::move(g)), par_(par), xi_(std::move(xi)), fixed_(std::move(fixed)), rng_(seed) {
    if (!(par_.p >= 0 && par_.p <= 1)) throw Error("p must lie in [0,1]");
    if (!(par_.q > 0)) throw Error("q must be positive");
    if (xi_.empty()) xi_ = free_wiring(g_.n);
    if (fixed_.empty()) fixed_.assign(g_.edges.size(), -1);
    if (int(xi_.size()) != g_.n || fixed_.size() != g_.edges.size()) throw Error("sampler data do not match the graph");
    adj_ = g_.adjacency();
    for (int v = 0; v < g_.n; ++v)
        if (xi_[v] >= 0) {
            if (xi_[v] >= int(classes_.size())) classes_.resize(xi_[v] + 1);
            classes_[xi_[v]].push_back(v);
        }
    open_.assign(g_.edges.size(), 0);
    for (int e = 0; e < int(g_.edges.size()); ++e) {
        if (fixed_[e] < 0) random_.push_back(e);
        open_[e] = fixed_[e] == 1;
    }
    seen_.assign(g_.n, 0);
}

bool FKSampler::connected_without(int e) {
    const int s = g_.edges[e][0], t = g_.edges[e][1];
    if (s == t) return true;
    ++stamp_;
    std::vector<int> cstamp(classes_.size(), 0);
    queue_.assign(1, s);
    seen_[s] = stamp_;
    while (!queue_.empty()) {
        int v = queue_.back();
        queue_.pop_back();
        if (v == t) return true;
        if (xi_[v] >= 0 && cstamp[xi_[v]] != stamp_) {
            cstamp[xi_[v]] = stamp_;
            for (int w : classes_[xi_[v]])
                if (seen_[w] != stamp_) {
                    seen_[w] = stamp_;
                    queue_.push_back(w);
                }
        }
        for (int f : adj_[v]) {
            if (f == e || !open_[f]) continue;
            int w = g_.edges[f][0] == v ? g_.edges[f][1] : g_.edges[f][0];
            if (seen_[w] != stamp_) {
                seen_[w] = stamp_;
                queue_.push_back(w);
            }
        }
    }
    return false;
}

void FKSampler::heat_bath_step(int e) {
    if (fixed_[e] >= 0) return;
    const double p = par_.p;
    double popen = connected_without(e) ? p : p / (p + par_.q * (1 - p));
    open_[e] = rng_.bernoulli(popen);
}

void FKSampler::heat_bath_sweep() {
    for (int e : random_) heat_bath_step(e);
}

void FKSampler::swendsen_wang_sweep() {
    if (std::abs(par_.q - 2.0) > 1e-12) throw Error("Swendsen-Wang update needs q = 2");
    auto s = fk_to_spin(g_, open_, xi_, rng_);
    for (int e : random_) open_[e] = s[g_.edges[e][0]] == s[g_.edges[e][1]] && rng_.bernoulli(par_.p);
}

void FKSampler::sweep(FKSamplerKind kind) {
    if (kind == FKSamplerKind::HeatBath) heat_bath_sweep();
    else swendsen_wang_sweep();
}

}  // namespace ifk
