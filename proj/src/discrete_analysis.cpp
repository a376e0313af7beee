#include "ifk/discrete_analysis.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <deque>
#include <limits>

namespace ifk {

int Network::find(Site s) const {
    auto it = index_.find(pack(s.x, s.y));
    return it == index_.end() ? -1 : it->second;
}

void Network::rebuild_index() {
    index_.clear();
    for (int i = 0; i < int(sites.size()); ++i) index_[pack(sites[i].x, sites[i].y)] = i;
}

int Network::add_site(Site s, cplx p, bool is_interior) {
    int i = find(s);
    if (i >= 0) return i;
    i = size();
    sites.push_back(s);
    pos.push_back(p);
    interior.push_back(is_interior);
    out.emplace_back();
    index_[pack(s.x, s.y)] = i;
    return i;
}

std::vector<int> Network::interior_vertices() const {
    std::vector<int> r;
    for (int i = 0; i < size(); ++i)
        if (interior[i]) r.push_back(i);
    return r;
}

std::vector<int> Network::boundary_vertices() const {
    std::vector<int> r;
    for (int i = 0; i < size(); ++i)
        if (!interior[i]) r.push_back(i);
    return r;
}

namespace {

void connect_lattice(Network& net) {
    for (int i = 0; i < net.size(); ++i) {
        if (!net.interior[i]) continue;
        net.out[i].clear();
        for (int d = 0; d < 4; ++d) {
            int j = net.find(net.sites[i] + lattice_step(d));
            if (j < 0) throw Error("interior site without four neighbours");
            net.out[i].push_back({j, 1.0});
        }
    }
}

}  // namespace

Network lattice_network(double delta, const std::function<bool(cplx)>& inside, cplx origin) {
    if (!(delta > 0)) throw Error("mesh must be positive");
    Network net;
    net.delta = delta;
    const int R = int(std::ceil(64.0 / delta)) + 2;
    std::vector<Site> in_sites;
    for (int y = -R; y <= R; ++y)
        for (int x = -R; x <= R; ++x)
            if (inside(origin + delta * cplx(x, y))) {
                if (std::abs(x) == R || std::abs(y) == R) throw Error("region too large for the lattice scan");
                in_sites.push_back({x, y});
            }
    if (in_sites.empty()) throw Error("region has no interior vertex");
    for (Site s : in_sites) net.add_site(s, origin + delta * cplx(s.x, s.y), true);
    for (Site s : in_sites)
        for (int d = 0; d < 4; ++d) {
            Site t = s + lattice_step(d);
            net.add_site(t, origin + delta * cplx(t.x, t.y), false);
        }
    connect_lattice(net);
    return net;
}

Network box_network(int w, int h, double delta, cplx origin) {
    if (w < 3 || h < 3) throw Error("box needs at least one interior vertex");
    Network net;
    net.delta = delta;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            net.sites.push_back({x, y});
            net.pos.push_back(origin + delta * cplx(x, y));
            net.interior.push_back(x > 0 && y > 0 && x < w - 1 && y < h - 1);
            net.out.emplace_back();
        }
    net.rebuild_index();
    connect_lattice(net);
    return net;
}

cplx discrete_laplacian(const Network& net, const std::vector<cplx>& f, int u) {
    if (!net.interior.at(u)) throw Error("Laplacian requested at a boundary vertex");
    double tot = 0;
    cplx s = 0;
    for (auto [v, r] : net.out[u]) {
        s += r * (f[v] - f[u]);
        tot += r;
    }
    return s / tot;
}

struct HarmonicSolver::Impl {
    std::vector<int> unknown;  // network vertex -> row, -1 for boundary
    std::vector<int> vertex;   // row -> network vertex
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

HarmonicSolver::HarmonicSolver(const Network& net, double mass) : net_(net), mass_(mass), impl_(new Impl) {
    auto& I = *impl_;
    I.unknown.assign(net.size(), -1);
    for (int i = 0; i < net.size(); ++i)
        if (net.interior[i]) {
            I.unknown[i] = int(I.vertex.size());
            I.vertex.push_back(i);
        }
    const int n = int(I.vertex.size());
    if (n == 0) throw Error("domain has an empty interior");
    std::vector<Eigen::Triplet<double>> trip;
    for (int r = 0; r < n; ++r) {
        int x = I.vertex[r];
        double tot = 0;
        for (auto [y, w] : net.out[x]) tot += w;
        trip.emplace_back(r, r, 1.0);
        for (auto [y, w] : net.out[x])
            if (I.unknown[y] >= 0) trip.emplace_back(r, I.unknown[y], -mass * w / tot);
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    I.lu.compute(A);
    if (I.lu.info() != Eigen::Success) throw Error("harmonic system is singular");
}

HarmonicSolver::~HarmonicSolver() = default;

std::vector<cplx> HarmonicSolver::solve(const std::vector<cplx>& g, const std::vector<cplx>& source) const {
    const auto& I = *impl_;
    const int n = int(I.vertex.size());
    if (int(g.size()) != net_.size()) throw Error("boundary data do not match the network");
    Eigen::MatrixXd b(n, 2);
    for (int r = 0; r < n; ++r) {
        int x = I.vertex[r];
        double tot = 0;
        for (auto [y, w] : net_.out[x]) tot += w;
        cplx v = source.empty() ? cplx(0) : source[x];
        for (auto [y, w] : net_.out[x])
            if (I.unknown[y] < 0) v += mass_ * w / tot * g[y];
        b(r, 0) = v.real();
        b(r, 1) = v.imag();
    }
    Eigen::MatrixXd sol = I.lu.solve(b);
    std::vector<cplx> h(g);
    for (int r = 0; r < n; ++r) h[I.vertex[r]] = cplx(sol(r, 0), sol(r, 1));
    return h;
}

double HarmonicSolver::residual(const std::vector<cplx>& h, const std::vector<cplx>& source) const {
    double worst = 0;
    for (int x : impl_->vertex) {
        double tot = 0;
        cplx m = 0;
        for (auto [y, w] : net_.out[x]) {
            tot += w;
            m += w * h[y];
        }
        cplx s = source.empty() ? cplx(0) : source[x];
        worst = std::max(worst, std::abs(h[x] - mass_ * m / tot - s));
    }
    return worst;
}

std::vector<cplx> solve_dirichlet(const Network& net, const std::vector<cplx>& g) {
    return HarmonicSolver(net).solve(g);
}

std::vector<double> harmonic_measure(const Network& net, int y) {
    if (y < 0 || y >= net.size() || net.interior[y]) throw Error("harmonic measure needs a boundary vertex");
    std::vector<cplx> g(net.size(), 0.0);
    g[y] = 1.0;
    auto h = HarmonicSolver(net).solve(g);
    std::vector<double> r(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) r[i] = h[i].real();
    return r;
}

std::vector<double> green_function(const Network& net, int y) {
    if (y < 0 || y >= net.size() || !net.interior[y]) throw Error("Green function needs an interior vertex");
    std::vector<cplx> g(net.size(), 0.0), s(net.size(), 0.0);
    s[y] = -1.0;
    auto h = HarmonicSolver(net).solve(g, s);
    std::vector<double> r(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) r[i] = h[i].real();
    return r;
}

std::vector<double> massive_green_function(const Network& net, int y, double m) {
    if (y < 0 || y >= net.size() || !net.interior[y]) throw Error("Green function needs an interior vertex");
    if (!(m > 0 && m <= 1)) throw Error("mass parameter must lie in (0,1]");
    Network pinned = net;
    pinned.interior[y] = 0;
    std::vector<cplx> g(net.size(), 0.0);
    g[y] = 1.0;
    auto h = HarmonicSolver(pinned, m).solve(g);
    std::vector<double> r(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) r[i] = h[i].real();
    return r;
}

ModifiedWalk black_walk(const Domain& D, double rho) {
    if (D.variant != Variant::FK) throw Error("modified walks need an FK domain");
    ModifiedWalk w;
    auto& net = w.net;
    net.delta = D.delta * kSqrt2;
    const int nv = int(D.vertices.size());
    for (int i = 0; i < nv; ++i) {
        net.sites.push_back(D.vertices[i]);
        net.pos.push_back(D.vertex_pos(i));
        net.interior.push_back(!D.wired[i]);
        net.out.emplace_back();
        w.boundary_value.push_back(D.wired[i] ? 1.0 : 0.0);
        w.domain_index.push_back(i);
    }
    net.rebuild_index();
    for (int i = 0; i < nv; ++i) {
        if (D.wired[i]) continue;
        for (int d = 0; d < 4; ++d) {
            Site t = D.vertices[i] + lattice_step(d);
            int j = D.vertex_at(t);
            if (j >= 0) {
                net.out[i].push_back({j, 1.0});
                continue;
            }
            if (!D.free_arc[i]) throw Error("interior vertex without four neighbours");
            int k = net.add_site(t, D.embed(2 * t.x, 2 * t.y), false);
            if (k >= int(w.boundary_value.size())) {
                w.boundary_value.push_back(0.0);
                w.domain_index.push_back(-1);
            }
            net.out[i].push_back({k, rho});
        }
    }
    return w;
}

ModifiedWalk white_walk(const Domain& D, double rho) {
    if (D.variant != Variant::FK) throw Error("modified walks need an FK domain");
    ModifiedWalk w;
    auto& net = w.net;
    net.delta = D.delta * kSqrt2;
    const int nf = int(D.faces.size());
    for (int f = 0; f < nf; ++f) {
        net.sites.push_back(D.faces[f].cell);
        net.pos.push_back(D.face_pos(f));
        net.interior.push_back(!D.outer_face[f]);
        net.out.emplace_back();
        w.boundary_value.push_back(0.0);
        w.domain_index.push_back(f);
    }
    net.rebuild_index();
    for (int f = 0; f < nf; ++f) {
        if (D.outer_face[f]) continue;
        for (int d = 0; d < 4; ++d) {
            Site c = D.faces[f].cell + lattice_step(d);
            int g = D.face_at(c);
            if (g >= 0) {
                net.out[f].push_back({g, 1.0});
                continue;
            }
            int k = net.add_site(c, D.embed(2 * c.x + 1, 2 * c.y + 1), false);
            if (k >= int(w.boundary_value.size())) {
                w.boundary_value.push_back(1.0);
                w.domain_index.push_back(-1);
            }
            net.out[f].push_back({k, rho});
        }
    }
    return w;
}

std::vector<double> modified_harmonic_measure(const ModifiedWalk& w) {
    std::vector<cplx> g(w.boundary_value.begin(), w.boundary_value.end());
    auto h = HarmonicSolver(w.net).solve(g);
    std::vector<double> r(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) r[i] = h[i].real();
    return r;
}

cplx cauchy_riemann_gap(const std::array<cplx, 4>& z, const std::array<cplx, 4>& f) {
    return 0.5 * std::abs(z[0] - z[2]) * ((f[0] - f[2]) / (z[0] - z[2]) - (f[1] - f[3]) / (z[1] - z[3]));
}

cplx dbar_at_face(const Domain& D, const std::vector<cplx>& f, int fc) {
    Site c = D.faces.at(fc).cell;
    int s = D.vertex_at(c), e = D.vertex_at(c + Site{1, 0}), w = D.vertex_at(c + Site{0, 1}),
        n = D.vertex_at(c + Site{1, 1});
    if (s < 0 || e < 0 || w < 0 || n < 0) throw Error("incomplete stencil around face");
    return dbar(f[e], f[n], f[w], f[s]);
}

SHolomorphicReport check_s_holomorphic(const Domain& D, const std::vector<cplx>& f, double tol) {
    if (f.size() != D.medial.size()) throw Error("field does not match the medial vertices");
    SHolomorphicReport rep;
    for (int e = 0; e < int(D.medial_edges.size()); ++e) {
        const auto& me = D.medial_edges[e];
        if (!me.active) continue;
        cplx u = line_of_dir(me.dir);
        double gap = std::abs(project(f[me.from], u) - project(f[me.to], u));
        rep.max_gap = std::max(rep.max_gap, gap);
        if (gap >= tol) rep.violating.push_back(e);
    }
    rep.pass = rep.violating.empty();
    return rep;
}

namespace {

HField integrate_increments(const Domain& D, const std::vector<double>& inc, int base, double base_value) {
    const int nv = int(D.vertices.size()), nf = int(D.faces.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> val(nv + nf, nan);
    std::vector<std::vector<std::pair<int, double>>> adj(nv + nf);
    for (int e = 0; e < int(D.medial_edges.size()); ++e) {
        const auto& me = D.medial_edges[e];
        if (!me.active) continue;
        adj[me.black].push_back({nv + me.white, -inc[e]});
        adj[nv + me.white].push_back({me.black, inc[e]});
    }
    if (base < 0 || base >= nv) throw Error("base point is not a domain vertex");
    val[base] = base_value;
    std::deque<int> q{base};
    while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        for (auto [y, d] : adj[x])
            if (std::isnan(val[y])) {
                val[y] = val[x] + d;
                q.push_back(y);
            }
    }
    HField H;
    H.black.assign(val.begin(), val.begin() + nv);
    H.white.assign(val.begin() + nv, val.end());
    for (int e = 0; e < int(D.medial_edges.size()); ++e) {
        const auto& me = D.medial_edges[e];
        if (!me.active) continue;
        double gap = std::abs(H.black[me.black] - H.white[me.white] - inc[e]);
        if (!std::isnan(gap)) H.inconsistency = std::max(H.inconsistency, gap);
    }
    return H;
}

}  // namespace

HField integrate_H(const Domain& D, const std::vector<cplx>& f, int base, double scale, double base_value) {
    if (f.size() != D.medial.size()) throw Error("field does not match the medial vertices");
    std::vector<double> inc(D.medial_edges.size(), 0.0);
    for (int e = 0; e < int(D.medial_edges.size()); ++e) {
        const auto& me = D.medial_edges[e];
        inc[e] = scale * std::norm(project(f[me.from], line_of_dir(me.dir)));
    }
    return integrate_increments(D, inc, base, base_value);
}

HField integrate_H_edges(const Domain& D, const std::vector<cplx>& fe, int base, double scale, double base_value) {
    if (fe.size() != D.medial_edges.size()) throw Error("field does not match the medial edges");
    std::vector<double> inc(fe.size());
    for (std::size_t e = 0; e < fe.size(); ++e) inc[e] = scale * std::norm(fe[e]);
    return integrate_increments(D, inc, base, base_value);
}

HField least_squares_H(const Domain& D, const std::vector<cplx>& fe, int base, double scale, double base_value) {
    if (fe.size() != D.medial_edges.size()) throw Error("field does not match the medial edges");
    const int nv = int(D.vertices.size()), nf = int(D.faces.size());
    if (base < 0 || base >= nv) throw Error("base vertex out of range");
    // unknowns: black vertices then white faces; base is eliminated
    const int n = nv + nf;
    std::vector<double> diag(n, 0.0), rhs(n, 0.0);
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<char> touched(n, 0);
    for (std::size_t e = 0; e < fe.size(); ++e) {
        const auto& me = D.medial_edges[e];
        if (!me.active || me.black < 0 || me.white < 0) continue;
        const int b = me.black, w = nv + me.white;
        const double inc = scale * std::norm(fe[e]);
        touched[b] = touched[w] = 1;
        diag[b] += 1;
        diag[w] += 1;
        rhs[b] += inc;
        rhs[w] -= inc;
        trip.emplace_back(b, w, -1.0);
        trip.emplace_back(w, b, -1.0);
    }
    std::vector<int> col(n, -1);
    int m = 0;
    for (int i = 0; i < n; ++i)
        if (touched[i] && i != base) col[i] = m++;
    Eigen::SparseMatrix<double> A(m, m);
    Eigen::VectorXd r(m);
    std::vector<Eigen::Triplet<double>> t2;
    for (int i = 0; i < n; ++i)
        if (col[i] >= 0) {
            t2.emplace_back(col[i], col[i], diag[i]);
            r[col[i]] = rhs[i];
        }
    for (const auto& t : trip) {
        int i = t.row(), j = t.col();
        if (col[i] < 0) continue;
        if (j == base) r[col[i]] += base_value;
        else if (col[j] >= 0) t2.emplace_back(col[i], col[j], t.value());
    }
    A.setFromTriplets(t2.begin(), t2.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success) throw Error("least-squares H: factorization failed");
    Eigen::VectorXd x = solver.solve(r);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    HField H;
    H.black.assign(nv, nan);
    H.white.assign(nf, nan);
    H.black[base] = base_value;
    for (int i = 0; i < n; ++i) {
        if (col[i] < 0) continue;
        (i < nv ? H.black[i] : H.white[i - nv]) = x[col[i]];
    }
    for (std::size_t e = 0; e < fe.size(); ++e) {
        const auto& me = D.medial_edges[e];
        if (!me.active || me.black < 0 || me.white < 0) continue;
        double d = H.black[me.black] - H.white[me.white] - scale * std::norm(fe[e]);
        H.inconsistency = std::max(H.inconsistency, std::abs(d));
    }
    return H;
}

double black_laplacian(const Domain& D, const HField& H, int v) {
    double s = 0;
    for (int d = 0; d < 4; ++d) {
        int w = D.vertex_at(D.vertices[v] + lattice_step(d));
        if (w < 0 || std::isnan(H.black[w])) return std::numeric_limits<double>::quiet_NaN();
        s += H.black[w] - H.black[v];
    }
    return 0.25 * s;
}

double white_laplacian(const Domain& D, const HField& H, int f) {
    double s = 0;
    for (int d = 0; d < 4; ++d) {
        int g = D.face_at(D.faces[f].cell + lattice_step(d));
        if (g < 0 || std::isnan(H.white[g])) return std::numeric_limits<double>::quiet_NaN();
        s += H.white[g] - H.white[f];
    }
    return 0.25 * s;
}

}  // namespace ifk
