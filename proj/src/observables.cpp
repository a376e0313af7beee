#include "ifk/observables.hpp"

#include <algorithm>
#include <bit>
#include <limits>

namespace ifk {

double parafermion_spin(double q) {
    if (!(q > 0 && q <= 4)) throw Error("cluster weight q must lie in (0,4]");
    return 1.0 - 2.0 / kPi * std::acos(std::sqrt(q) / 2.0);
}

std::vector<int> exploration_path(const Domain& D, const std::vector<char>& state) {
    std::vector<int> path;
    const std::size_t limit = D.medial_edges.size();
    for (int e = D.start_edge; e >= 0; e = next_medial_edge(D, state, e)) {
        path.push_back(e);
        if (path.size() > limit) throw Error("exploration path does not close at b");
    }
    if (path.back() != D.end_edge) throw Error("exploration path does not end at b");
    return path;
}

std::vector<double> windings_to_end(const Domain& D, const std::vector<int>& path) {
    std::vector<double> w(path.size(), 0.0);
    for (int k = int(path.size()) - 2; k >= 0; --k)
        w[k] = w[k + 1] + 0.5 * kPi * turn(D.medial_edges[path[k]].dir, D.medial_edges[path[k + 1]].dir);
    return w;
}

ObservableField fk_observable_exact(const Domain& D, double p, double q, double sigma,
                                    const std::vector<signed char>& fixed) {
    if (D.variant != Variant::FK) throw Error("FK observable needs an FK domain");
    if (!(p > 0 && p < 1)) throw Error("p must lie in (0,1)");
    if (sigma < 0) sigma = parafermion_spin(q);
    const int n = D.num_vars();
    std::vector<int> freev;
    std::vector<char> state(n, 0);
    for (int k = 0; k < n; ++k) {
        signed char f = fixed.empty() ? -1 : fixed.at(k);
        if (f < 0) freev.push_back(k);
        else state[k] = f;
    }
    if (freev.size() > 24) throw Error("too many random edges to enumerate (limit 24)");
    ObservableField F;
    F.p = p;
    F.q = q;
    F.sigma = sigma;
    F.domain_hash = D.hash();
    F.edge.assign(D.medial_edges.size(), 0.0);
    double z = 0;
    const std::uint64_t total = std::uint64_t(1) << freev.size();
    for (std::uint64_t st = 0; st < total; ++st) {
        int o = 0;
        for (std::size_t i = 0; i < freev.size(); ++i) state[freev[i]] = (st >> i) & 1;
        for (int k = 0; k < n; ++k) o += state[k];
        double w = std::pow(p, o) * std::pow(1 - p, n - o) * std::pow(q, dobrushin_primal_clusters(D, state));
        z += w;
        auto path = exploration_path(D, state);
        auto wind = windings_to_end(D, path);
        for (std::size_t k = 0; k < path.size(); ++k) F.edge[path[k]] += w * std::polar(1.0, sigma * wind[k]);
    }
    for (auto& v : F.edge) v /= z;
    F.vertex = fk_vertex_values(D, F.edge);
    return F;
}

ObservableField fk_observable_mc(const Domain& D, double p, double q, std::size_t samples, std::uint64_t seed,
                                 FKSamplerKind sampler, int burn_in, int thinning) {
    if (D.variant != Variant::FK) throw Error("FK observable needs an FK domain");
    if (samples == 0) throw Error("sample count must be positive");
    auto dg = dobrushin_graph(D);
    FKSampler S(dg.g, FKParams{p, q}, dg.xi, dg.fixed, seed);
    for (int i = 0; i < burn_in; ++i) S.sweep(sampler);
    const double sigma = parafermion_spin(q);
    const std::size_t ne = D.medial_edges.size();
    const int nblocks = int(std::min<std::size_t>(50, samples));
    const std::size_t bsize = samples / nblocks;
    std::vector<cplx> sum(ne, 0.0), block(ne, 0.0);
    std::vector<double> sq(ne, 0.0);
    std::size_t used = 0;
    for (int b = 0; b < nblocks; ++b) {
        std::fill(block.begin(), block.end(), cplx(0));
        for (std::size_t s = 0; s < bsize; ++s) {
            for (int t = 0; t < thinning; ++t) S.sweep(sampler);
            auto state = domain_state(dg, S.open());
            auto path = exploration_path(D, state);
            auto wind = windings_to_end(D, path);
            for (std::size_t k = 0; k < path.size(); ++k) block[path[k]] += std::polar(1.0, sigma * wind[k]);
        }
        used += bsize;
        for (std::size_t e = 0; e < ne; ++e) {
            cplx m = block[e] / double(bsize);
            sum[e] += m;
            sq[e] += std::norm(m);
        }
    }
    ObservableField F;
    F.p = p;
    F.q = q;
    F.sigma = sigma;
    F.domain_hash = D.hash();
    F.method = "mc";
    F.samples = used;
    F.edge.resize(ne);
    F.edge_err.resize(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        F.edge[e] = sum[e] / double(nblocks);
        double var = std::max(0.0, sq[e] / nblocks - std::norm(F.edge[e]));
        F.edge_err[e] = std::sqrt(var / (nblocks - 1));
    }
    F.vertex = fk_vertex_values(D, F.edge);
    return F;
}

std::vector<cplx> fk_vertex_values(const Domain& D, const std::vector<cplx>& edge) {
    std::vector<cplx> v(D.medial.size(), 0.0);
    for (int m = 0; m < int(D.medial.size()); ++m) {
        const auto& mv = D.medial[m];
        std::vector<int> inc;
        for (int e : {mv.in[0], mv.in[1], mv.out[0], mv.out[1]})
            if (e >= 0 && D.medial_edges[e].active) inc.push_back(e);
        if (inc.size() == 4) {
            for (int e : inc) v[m] += 0.5 * edge[e];
        } else if (inc.size() == 1) {
            v[m] = edge[inc[0]];
        } else if (inc.size() >= 2) {
            // solve Re(conj(u_k) F) = Re(conj(u_k) F(e_k)) for two incident edges
            cplx u1 = line_of_dir(D.medial_edges[inc[0]].dir), u2 = line_of_dir(D.medial_edges[inc[1]].dir);
            double c1 = (std::conj(u1) * edge[inc[0]]).real(), c2 = (std::conj(u2) * edge[inc[1]]).real();
            double det = u1.real() * u2.imag() - u1.imag() * u2.real();
            if (std::abs(det) < 1e-12) {
                v[m] = 0.5 * (edge[inc[0]] + edge[inc[1]]);
                continue;
            }
            v[m] = cplx((c1 * u2.imag() - c2 * u1.imag()) / det, (u1.real() * c2 - u2.real() * c1) / det);
        }
    }
    return v;
}

std::array<cplx, 4> edge_values_around(const Domain& D, const std::vector<cplx>& edge, int m) {
    std::array<cplx, 4> r{};
    const auto& mv = D.medial[m];
    for (int e : mv.out)
        if (e >= 0) r[D.medial_edges[e].dir] = edge[e];
    for (int e : mv.in)
        if (e >= 0) r[(D.medial_edges[e].dir + 2) % 4] = edge[e];
    return r;
}

cplx massive_phase(double p) {
    const cplx w = std::polar(1.0, -kPi / 4);
    cplx z = (w * (1 - p) * kSqrt2 + p) / (w * p + (1 - p) * kSqrt2);
    return z / std::abs(z);
}

double strip_decay_rate(double p) {
    if (!(p > 0 && p < 1)) throw Error("p must lie in (0,1)");
    const double a = massive_alpha(p);
    const double cm = std::cos(kPi / 4 - a), cp = std::cos(kPi / 4 + a);
    return -std::log((1 + cm) * cm / ((1 + cp) * cp));
}

namespace {

bool full_active(const Domain& D, int m) {
    const auto& mv = D.medial[m];
    for (int e : {mv.in[0], mv.in[1], mv.out[0], mv.out[1]})
        if (e < 0 || !D.medial_edges[e].active) return false;
    return true;
}

}  // namespace

MassiveResidual massive_residual(const Domain& D, const ObservableField& F, double p, double alpha_shift) {
    MassiveResidual r;
    const double alpha = massive_alpha(p) + alpha_shift;
    const cplx ie = cplx(0, 1) * std::polar(1.0, alpha);
    const double mass = std::cos(2 * alpha);
    for (int m = 0; m < int(D.medial.size()); ++m) {
        if (!full_active(D, m)) continue;
        ++r.vertices;
        auto f = edge_values_around(D, F.edge, m);
        for (int e : D.medial[m].in) {
            int A = (D.medial_edges[e].dir + 2) % 4;
            int B = (A + 3) % 4, C = (A + 2) % 4, Dd = (A + 1) % 4;
            r.relation = std::max(r.relation, std::abs(f[A] - f[C] - ie * (f[B] - f[Dd])));
        }
        const int u = D.medial[m].u, v = D.medial[m].v;
        int nb[4] = {D.medial_at(u + 2, v), D.medial_at(u, v + 2), D.medial_at(u - 2, v), D.medial_at(u, v - 2)};
        bool ok = true;
        for (int k : nb) ok = ok && k >= 0 && full_active(D, k);
        if (!ok) continue;
        ++r.laplacian_vertices;
        cplx lap = 0;
        for (int k : nb) lap += 0.25 * (F.vertex[k] - F.vertex[m]);
        r.laplacian = std::max(r.laplacian, std::abs(mass * (lap + F.vertex[m]) - F.vertex[m]));
        r.literal = std::max(r.literal, std::abs(lap - (mass - 1) * F.vertex[m]));
    }
    return r;
}

double parafermionic_residual(const Domain& D, const ObservableField& F) {
    double r = 0;
    for (int m = 0; m < int(D.medial.size()); ++m) {
        if (!full_active(D, m)) continue;
        auto f = edge_values_around(D, F.edge, m);
        r = std::max(r, std::abs(f[1] - f[3] - cplx(0, 1) * (f[0] - f[2])));
    }
    return r;
}

int fk_first_variable(const Domain& D) {
    for (int e = D.start_edge; e >= 0;) {
        int m = D.medial_edges[e].to;
        const auto& mv = D.medial[m];
        if (mv.role == MedialRole::Variable) return m;
        if (mv.role == MedialRole::End) break;
        e = mv.role == MedialRole::FixedOpen ? D.next_open[e] : D.next_closed[e];
    }
    throw Error("exploration path meets no random edge");
}

Domain fk_slit_domain(const Domain& D, bool state) {
    const int m1 = fk_first_variable(D);
    Domain S = D;
    int last = -1;
    for (int e = D.start_edge;;) {
        S.medial_edges[e].active = false;
        if (D.medial_edges[e].to == m1) {
            last = e;
            break;
        }
        const auto role = D.medial[D.medial_edges[e].to].role;
        e = role == MedialRole::FixedOpen ? D.next_open[e] : D.next_closed[e];
    }
    S.medial[m1].role = state ? MedialRole::FixedOpen : MedialRole::FixedClosed;
    S.medial[m1].var = -1;
    S.start_edge = state ? D.next_open[last] : D.next_closed[last];
    S.var_medial.clear();
    for (int m = 0; m < int(S.medial.size()); ++m)
        if (S.medial[m].role == MedialRole::Variable) {
            S.medial[m].var = int(S.var_medial.size());
            S.var_medial.push_back(m);
        }
    return S;
}

// ---- spin observable ----

namespace {

struct SpinLattice {
    std::vector<std::array<int, 4>> edge_at;  // vertex, lattice direction -> domain edge
};

SpinLattice spin_lattice(const Domain& D) {
    SpinLattice L;
    L.edge_at.assign(D.vertices.size(), {-1, -1, -1, -1});
    for (int e = 0; e < int(D.edges.size()); ++e) {
        auto [i, j] = D.edges[e];
        int d = lattice_dir(D.vertices[j] - D.vertices[i]);
        L.edge_at[i][d] = e;
        L.edge_at[j][(d + 2) % 4] = e;
    }
    return L;
}

}  // namespace

SpinStart spin_start(const Domain& D) {
    if (D.variant != Variant::Spin) throw Error("spin observable needs a spin domain");
    const auto& a = D.medial[D.a];
    SpinStart st;
    st.v0 = a.p0;
    st.d0 = lattice_dir(a.s0 - a.s1);
    st.allowed.assign(D.edges.size(), 1);
    return st;
}

cplx spin_contour_sum(const Domain& D, const SpinStart& st, int z, bool real_weights, double r) {
    const auto& mz = D.medial.at(z);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (z == D.a) throw Error("observable is not defined at the starting point");
    if (mz.edge >= 0 && !st.allowed[mz.edge]) return {nan, nan};
    std::vector<std::pair<int, int>> halves;  // (vertex, direction towards z)
    if (mz.edge >= 0) {
        auto [i, j] = D.edges[mz.edge];
        halves.push_back({i, lattice_dir(D.vertices[j] - D.vertices[i])});
        halves.push_back({j, lattice_dir(D.vertices[i] - D.vertices[j])});
    } else {
        halves.push_back({mz.p0, lattice_dir(mz.s1 - mz.s0)});
    }
    const SpinLattice L = spin_lattice(D);
    std::vector<int> edges, local(D.edges.size(), -1);
    for (int e = 0; e < int(D.edges.size()); ++e)
        if (st.allowed[e] && e != mz.edge) {
            local[e] = int(edges.size());
            edges.push_back(e);
        }
    if (edges.size() > 64) throw Error("too many edges for contour enumeration (limit 64)");
    const int nv = int(D.vertices.size());

    // spanning forest, tree paths and fundamental cycles
    std::vector<int> parent(nv, -1), pedge(nv, -1), depth(nv, 0), comp(nv, -1);
    std::vector<char> tree(edges.size(), 0);
    for (int s = 0; s < nv; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = s;
        std::vector<int> q{s};
        for (std::size_t h = 0; h < q.size(); ++h) {
            int v = q[h];
            for (int d = 0; d < 4; ++d) {
                int e = L.edge_at[v][d];
                if (e < 0 || local[e] < 0) continue;
                int w = D.edges[e][0] == v ? D.edges[e][1] : D.edges[e][0];
                if (comp[w] >= 0) continue;
                comp[w] = s;
                parent[w] = v;
                pedge[w] = local[e];
                depth[w] = depth[v] + 1;
                tree[local[e]] = 1;
                q.push_back(w);
            }
        }
    }
    auto tree_path = [&](int x, int y) {
        std::uint64_t m = 0;
        while (x != y) {
            if (depth[x] >= depth[y]) {
                m ^= std::uint64_t(1) << pedge[x];
                x = parent[x];
            } else {
                m ^= std::uint64_t(1) << pedge[y];
                y = parent[y];
            }
        }
        return m;
    };
    std::vector<std::uint64_t> basis;
    for (std::size_t k = 0; k < edges.size(); ++k)
        if (!tree[k]) {
            auto [i, j] = D.edges[edges[k]];
            basis.push_back(tree_path(i, j) ^ (std::uint64_t(1) << k));
        }
    if (basis.size() > 26) throw Error("contour space too large to enumerate");

    cplx total = 0;
    std::vector<char> used(edges.size());
    for (auto [vz, dz] : halves) {
        if (comp[vz] != comp[st.v0]) continue;
        std::uint64_t cfg = tree_path(st.v0, vz);
        const std::uint64_t count = std::uint64_t(1) << basis.size();
        for (std::uint64_t k = 0;; ++k) {
            std::fill(used.begin(), used.end(), 0);
            int v = st.v0, d = st.d0;
            double w = 0;
            for (;;) {
                int next = -1;
                bool finish = false;
                for (int c : {(d + 1) % 4, d, (d + 3) % 4}) {
                    if (v == vz && c == dz) {
                        finish = true;
                        next = c;
                        break;
                    }
                    int e = L.edge_at[v][c];
                    if (e < 0 || local[e] < 0) continue;
                    int le = local[e];
                    if (!((cfg >> le) & 1) || used[le]) continue;
                    used[le] = 1;
                    next = c;
                    v = D.edges[e][0] == v ? D.edges[e][1] : D.edges[e][0];
                    break;
                }
                if (next < 0) throw Error("contour walk got stuck");
                w += 0.5 * kPi * turn(d, next);
                d = next;
                if (finish) break;
            }
            double mag = std::pow(r, std::popcount(cfg));
            total += real_weights ? cplx(mag) : mag * std::polar(1.0, -0.5 * w);
            if (k + 1 == count) break;
            cfg ^= basis[std::countr_zero(k + 1)];
        }
    }
    return total;
}

ObservableField spin_observable_from(const Domain& D, const SpinStart& st) {
    ObservableField F;
    F.beta = beta_critical();
    F.domain_hash = D.hash();
    F.vertex.assign(D.medial.size(), 0.0);
    cplx nb = spin_contour_sum(D, st, D.b);
    if (std::abs(nb) == 0) throw Error("no contour reaches b");
    for (int m = 0; m < int(D.medial.size()); ++m)
        F.vertex[m] = m == D.a ? cplx(std::numeric_limits<double>::quiet_NaN()) : spin_contour_sum(D, st, m) / nb;
    return F;
}

ObservableField spin_observable_exact(const Domain& D) { return spin_observable_from(D, spin_start(D)); }

std::vector<SpinFirstStep> spin_first_steps(const Domain& D) {
    const SpinStart st = spin_start(D);
    const SpinLattice L = spin_lattice(D);
    const double r = kSqrt2 - 1;
    const double total = spin_contour_sum(D, st, D.b, true).real();
    std::vector<SpinFirstStep> out;
    std::vector<char> more_left(D.edges.size(), 0);
    for (int c : {(st.d0 + 1) % 4, st.d0, (st.d0 + 3) % 4}) {
        int e = L.edge_at[st.v0][c];
        if (e < 0) continue;
        SpinFirstStep fs;
        fs.edge = e;
        fs.slit.allowed.assign(D.edges.size(), 1);
        for (int k = 0; k < int(D.edges.size()); ++k)
            if (more_left[k]) fs.slit.allowed[k] = 0;
        fs.slit.allowed[e] = 0;
        fs.slit.v0 = D.edges[e][0] == st.v0 ? D.edges[e][1] : D.edges[e][0];
        fs.slit.d0 = c;
        fs.probability = r * spin_contour_sum(D, fs.slit, D.b, true).real() / total;
        more_left[e] = 1;
        out.push_back(fs);
    }
    return out;
}

EnergyDensity energy_density_estimate(double radius, double delta, std::size_t samples, std::uint64_t seed,
                                      int burn_in, int wolff_per_sample) {
    if (!(radius > 0) || !(delta > 0) || radius / delta < 4) throw Error("mesh too coarse for the disk (need 8 sites across)");
    if (samples == 0) throw Error("sample count must be positive");
    const int R = int(std::ceil(radius / delta)) + 1;
    std::unordered_map<std::uint64_t, int> idx;
    Graph g;
    for (int y = -R; y <= R; ++y)
        for (int x = -R; x <= R; ++x)
            if (std::abs(delta * cplx(x, y)) < radius) idx[pack(x, y)] = g.add_vertex(delta * cplx(x, y));
    for (int y = -R; y <= R; ++y)
        for (int x = -R; x <= R; ++x) {
            auto i = idx.find(pack(x, y));
            if (i == idx.end()) continue;
            auto r = idx.find(pack(x + 1, y));
            if (r != idx.end()) g.add_edge(i->second, r->second);
            auto u = idx.find(pack(x, y + 1));
            if (u != idx.end()) g.add_edge(i->second, u->second);
        }
    const int vx = idx.at(pack(-1, 0)), vy = idx.at(pack(0, 0));
    const double beta = beta_critical();
    SpinSampler S(g, beta, free_bc(g.n), seed);
    const auto nb = g.neighbours();
    for (int i = 0; i < burn_in; ++i) S.sweep(SpinSamplerKind::Wolff);
    std::vector<double> xs;
    xs.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        for (int i = 0; i < wolff_per_sample; ++i) S.wolff_step();
        const auto& s = S.spins();
        int hx = 0, hy = 0;
        for (int w : nb[vx])
            if (w != vy) hx += s[w];
        for (int w : nb[vy])
            if (w != vx) hy += s[w];
        // conditional expectation of s_x s_y given the other spins
        double same = std::exp(beta) * std::cosh(beta * (hx + hy));
        double diff = std::exp(-beta) * std::cosh(beta * (hx - hy));
        xs.push_back((same - diff) / (same + diff));
    }
    auto est = jackknife_mean(xs, 100);
    EnergyDensity out;
    out.mean = est.mean;
    out.stderr_ = est.stderr_;
    out.prediction = std::sqrt(2.0) / 2 - delta / (kPi * radius);
    out.vertices = g.n;
    out.samples = samples;
    return out;
}

}  // namespace ifk
