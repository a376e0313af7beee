#include "ifk/harness.hpp"

#include <fftw3.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "ifk/discrete_analysis.hpp"

namespace ifk {

namespace {

void require_interior(cplx z) {
    if (!(std::abs(z) < 1.0)) throw Error("conformal target: z must lie inside the unit disk");
}

// sqrt((d - c)(d + c)) with Im >= 0; on the real axis the sign follows Re d.
// Factored to avoid cancellation near the slit tip.
cplx slit_sqrt(cplx d, cplx c) {
    cplx s = std::sqrt(d - c) * std::sqrt(d + c);
    if (s.imag() < 0) s = -s;
    if (std::abs(s.imag()) <= 1e-15 * std::abs(s) && s.real() * d.real() < 0) s = -s;
    return s;
}

struct LinearFit {
    double a = 0, b = 0, chi2 = 0;
};

// minimizes sum w (y - a - b x)^2
LinearFit weighted_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
    double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        S += w[i];
        Sx += w[i] * x[i];
        Sy += w[i] * y[i];
        Sxx += w[i] * x[i] * x[i];
        Sxy += w[i] * x[i] * y[i];
    }
    double det = S * Sxx - Sx * Sx;
    if (std::abs(det) < 1e-300) throw Error("degenerate fit");
    LinearFit f;
    f.b = (S * Sxy - Sx * Sy) / det;
    f.a = (Sy - f.b * Sx) / S;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - f.a - f.b * x[i];
        f.chi2 += w[i] * r * r;
    }
    return f;
}

}  // namespace

cplx strip_map(cplx z) {
    require_interior(z);
    return std::log((1.0 + z) / (1.0 - z)) / kPi + cplx(0, 0.5);
}

cplx strip_map_derivative(cplx z) {
    require_interior(z);
    return 2.0 / (kPi * (1.0 - z * z));
}

cplx spin_target(cplx z) {
    require_interior(z);
    return 2.0 / (1.0 + z);
}

cplx conformal_target(const std::string& kind, cplx z) {
    if (kind == "sqrt_phi_prime") return std::sqrt(strip_map_derivative(z));
    if (kind == "im_phi") return strip_map(z).imag();
    if (kind == "sqrt_psi_prime_ratio") return spin_target(z);
    throw Error("unknown conformal target: " + kind);
}

CorrelationLengthResult correlation_length(double beta, double x, double y) {
    if (!(beta > 0)) throw Error("correlation length needs beta > 0");
    if (beta >= beta_critical()) throw Error("correlation length needs beta < beta_c");
    if (x == 0 && y == 0) throw Error("correlation length needs a nonzero direction");
    const double sh = std::sinh(2 * beta);
    const double rhs = sh + 1 / sh;
    auto f = [&](double s) { return std::sqrt(1 + s * s * x * x) + std::sqrt(1 + s * s * y * y) - rhs; };
    double lo = 1e-12, hi = 1e12;
    if (f(lo) > 0 || f(hi) < 0) throw Error("correlation length: root not bracketed");
    for (int it = 0; it < 400 && hi - lo > 1e-12 * std::max(1.0, lo); ++it) {
        double mid = 0.5 * (lo + hi);
        (f(mid) < 0 ? lo : hi) = mid;
    }
    CorrelationLengthResult r;
    r.beta = beta;
    r.x = x;
    r.y = y;
    r.s = 0.5 * (lo + hi);
    r.tau = x * std::asinh(r.s * x) + y * std::asinh(r.s * y);
    return r;
}

MassiveDecayFit massive_green_decay(double beta, int n_lo, int n_hi) {
    if (n_lo < 1 || n_hi <= n_lo + 2) throw Error("massive decay: bad fit window");
    const double sh = std::sinh(2 * beta);
    const double m = 2.0 / (sh + 1 / sh);
    const int half = 4 * n_hi;
    const int side = 2 * half + 1;
    Network net = box_network(side, side, 1.0, cplx(-half, -half));
    const int y = net.find(Site{half, half});
    auto G = massive_green_function(net, y, m);
    std::vector<double> xs, ys, ws;
    for (int n = n_lo; n <= n_hi; ++n) {
        int v = net.find(Site{half + n, half});
        xs.push_back(n);
        ys.push_back(std::log(G[v]) + 0.5 * std::log(double(n)));
        ws.push_back(1.0);
    }
    auto fit = weighted_fit(xs, ys, ws);
    MassiveDecayFit out;
    out.beta = beta;
    out.mass = m;
    out.rate = -fit.b;
    out.tau = correlation_length(beta, 1, 0).tau;
    out.box = side;
    out.n_lo = n_lo;
    out.n_hi = n_hi;
    return out;
}

LoewnerTrace zip_curve(const std::vector<cplx>& curve, double t_stop) {
    LoewnerTrace tr;
    double t = 0;
    for (std::size_t k = 0; k < curve.size() && t < t_stop; ++k) {
        cplx w = curve[k];
        for (std::size_t j = 0; j < k; ++j) {
            cplx d = w - tr.xi[j];
            w = tr.xi[j] + slit_sqrt(d, cplx(0, tr.height[j]));
        }
        if (w.imag() < -1e-9 * std::max(1.0, std::abs(w))) tr.crossing = true;
        double h = std::max(w.imag(), 0.0);
        double dt = h * h / 4;
        t += dt;
        tr.curve.push_back(curve[k]);
        tr.dt.push_back(dt);
        tr.xi.push_back(w.real());
        tr.height.push_back(h);
        tr.t.push_back(t);
        tr.W.push_back(w.real());
    }
    return tr;
}

std::vector<cplx> unzip_curve(const LoewnerTrace& tr) {
    std::vector<cplx> out;
    out.reserve(tr.xi.size());
    for (std::size_t k = 0; k < tr.xi.size(); ++k) {
        cplx w(tr.xi[k], tr.height[k]);
        for (std::size_t j = k; j-- > 0;) {
            cplx d = w - tr.xi[j];
            w = tr.xi[j] + slit_sqrt(d, tr.height[j]);
        }
        out.push_back(w);
    }
    return out;
}

RoundTrip zipper_roundtrip(const std::vector<cplx>& curve, double t_stop, double min_height) {
    RoundTrip rt;
    if (curve.empty()) return rt;
    auto tr = zip_curve(curve, t_stop);
    auto back = unzip_curve(tr);
    double diam = 0;
    for (std::size_t i = 0; i < back.size(); ++i) diam = std::max(diam, std::abs(curve[i]));
    for (std::size_t i = 0; i < back.size(); ++i) {
        if (tr.height[i] < min_height * std::max(1.0, diam)) {
            ++rt.unresolved;
            continue;
        }
        rt.error = std::max(rt.error, std::abs(back[i] - curve[i]) / std::max(diam, 1e-300));
        ++rt.checked;
    }
    return rt;
}

cplx disk_to_halfplane(cplx z, cplx a, cplx b) {
    cplx ah = a / std::abs(a), bh = b / std::abs(b);
    if (std::abs(ah - bh) < 1e-12) throw Error("marked points coincide");
    auto T = [&](cplx w) { return (w - ah) / (w - bh); };
    // a third boundary point fixes the image line
    cplx mid = ah + bh;
    cplx c = std::abs(mid) > 1e-9 ? -mid / std::abs(mid) : ah * cplx(0, 1);
    cplx tc = T(c);
    cplx lam = std::conj(tc) / std::abs(tc);
    if ((lam * T(0)).imag() < 0) lam = -lam;
    return lam * T(z);
}

std::vector<cplx> curve_to_halfplane(const std::vector<cplx>& disk_curve, cplx a, cplx b) {
    std::vector<cplx> raw;
    for (cplx z : disk_curve)
        if (std::abs(z) < 1.0 - 1e-9) raw.push_back(disk_to_halfplane(z, a, b));
    if (raw.empty()) return {};
    double x0 = raw.front().real();
    for (cplx& w : raw) w -= x0;
    const double floor_im = 1e-12;
    std::vector<cplx> out;
    for (cplx w : raw) {
        if (w.imag() < floor_im) w.imag(floor_im);
        if (!out.empty() && std::abs(w - out.back()) < 1e-12) continue;
        out.push_back(w);
    }
    return out;
}

namespace {

// W(t) by linear interpolation, NaN beyond the trace
double driving_at(const LoewnerTrace& tr, double t) {
    if (tr.t.empty() || t > tr.t.back()) return std::nan("");
    if (t <= tr.t.front()) return tr.W.front() * (tr.t.front() > 0 ? t / tr.t.front() : 1.0);
    auto it = std::lower_bound(tr.t.begin(), tr.t.end(), t);
    std::size_t k = std::size_t(it - tr.t.begin());
    double t0 = tr.t[k - 1], t1 = tr.t[k];
    double u = t1 > t0 ? (t - t0) / (t1 - t0) : 1.0;
    return tr.W[k - 1] + u * (tr.W[k] - tr.W[k - 1]);
}

// Var[W(t + s) - W(t)] pooled over start times t on the grid, for lags s = k * step
void lag_variance(const std::vector<std::vector<double>>& W, const std::vector<int>& pick, int nlag,
                  std::vector<double>& var) {
    const int ng = int(W.front().size());
    var.assign(nlag, 0.0);
    for (int k = 1; k <= nlag; ++k) {
        double s = 0, s2 = 0;
        long cnt = 0;
        for (int c : pick)
            for (int i = 0; i + k < ng; ++i) {
                double d = W[c][i + k] - W[c][i];
                s += d;
                s2 += d * d;
                ++cnt;
            }
        var[k - 1] = s2 / cnt - (s / cnt) * (s / cnt);
    }
}

double kappa_from(const std::vector<std::vector<double>>& W, const std::vector<int>& pick,
                  const std::vector<double>& lags, std::vector<double>* var_out) {
    std::vector<double> var, ws(lags.size(), 1.0);
    lag_variance(W, pick, int(lags.size()), var);
    if (var_out) *var_out = var;
    return weighted_fit(lags, var, ws).b;
}

}  // namespace

KappaEstimate estimate_kappa(const std::vector<LoewnerTrace>& traces, double t_lo, double t_hi, int ngrid,
                             std::uint64_t seed, int bootstrap) {
    if (!(t_hi > t_lo) || t_lo < 0 || ngrid < 5) throw Error("kappa: bad time window");
    KappaEstimate K;
    const double step = (t_hi - t_lo) / (ngrid - 1);
    std::vector<double> grid;
    for (int i = 0; i < ngrid; ++i) grid.push_back(t_lo + step * i);
    std::vector<std::vector<double>> W;
    for (const auto& tr : traces) {
        bool ok = !tr.crossing && !tr.t.empty() && tr.t.back() >= t_hi;
        if (!ok) {
            ++K.discarded;
            continue;
        }
        std::vector<double> row;
        for (double t : grid) row.push_back(driving_at(tr, t));
        W.push_back(std::move(row));
    }
    K.used = int(W.size());
    if (K.used < 3) throw Error("kappa: too few usable interfaces");
    const int nlag = (ngrid - 1) / 2;
    for (int k = 1; k <= nlag; ++k) K.tgrid.push_back(step * k);
    std::vector<int> all(K.used);
    std::iota(all.begin(), all.end(), 0);
    K.kappa = kappa_from(W, all, K.tgrid, &K.variance);
    Rng rng(seed);
    std::vector<double> boot;
    std::vector<int> pick(K.used);
    for (int b = 0; b < bootstrap; ++b) {
        for (int& k : pick) k = int(rng.below(std::uint64_t(K.used)));
        boot.push_back(kappa_from(W, pick, K.tgrid, nullptr));
    }
    if (!boot.empty()) {
        std::sort(boot.begin(), boot.end());
        K.lo = boot[std::size_t(0.025 * (boot.size() - 1))];
        K.hi = boot[std::size_t(0.975 * (boot.size() - 1))];
    } else {
        K.lo = K.hi = K.kappa;
    }
    return K;
}

std::vector<std::vector<cplx>> fk_interfaces(int L, int count, std::uint64_t seed, int burn_in, int sweeps_between) {
    if (L < 8) throw Error("interfaces need L >= 8");
    const double delta = kSqrt2 / L;
    Domain D = build_domain(ShapeSpec::disk(1.0), delta, Variant::FK, Anchor::at(-1.0), Anchor::at(1.0));
    auto dg = dobrushin_graph(D);
    const double p = FKParams::self_dual(2.0);
    FKSampler S(dg.g, FKParams{p, 2.0}, dg.xi, dg.fixed, seed);
    for (int i = 0; i < burn_in; ++i) S.swendsen_wang_sweep();
    std::vector<std::vector<cplx>> out;
    for (int c = 0; c < count; ++c) {
        for (int i = 0; i < sweeps_between; ++i) S.swendsen_wang_sweep();
        auto path = exploration_path(D, domain_state(dg, S.open()));
        // edge midpoints: each medial edge is used once, vertices may be visited twice
        std::vector<cplx> pts;
        for (int e : path) pts.push_back(D.edge_pos(e));
        out.push_back(std::move(pts));
    }
    return out;
}

std::vector<std::vector<cplx>> spin_interfaces(int L, int count, std::uint64_t seed, int burn_in,
                                               int sweeps_between) {
    if (L < 8) throw Error("interfaces need L >= 8");
    const int R = L / 2;
    std::unordered_map<std::uint64_t, int> idx;
    Graph g;
    std::vector<Site> site;
    auto inside = [&](int x, int y) { return double(x) * x + double(y) * y < double(R) * R; };
    for (int y = -R - 1; y <= R + 1; ++y)
        for (int x = -R - 1; x <= R + 1; ++x) {
            bool in = inside(x, y);
            bool ring = !in && (inside(x + 1, y) || inside(x - 1, y) || inside(x, y + 1) || inside(x, y - 1));
            if (!in && !ring) continue;
            idx[pack(x, y)] = g.add_vertex(cplx(x, y));
            site.push_back({x, y});
        }
    SpinBC bc(g.n, 0);
    for (int i = 0; i < g.n; ++i)
        if (!inside(site[i].x, site[i].y)) bc[i] = site[i].y >= 0 ? 1 : -1;
    for (int i = 0; i < g.n; ++i)
        for (Site d : {Site{1, 0}, Site{0, 1}}) {
            auto it = idx.find(pack(site[i].x + d.x, site[i].y + d.y));
            if (it == idx.end()) continue;
            if (bc[i] != 0 && bc[it->second] != 0) continue;
            g.add_edge(i, it->second);
        }
    SpinSampler S(g, beta_critical(), bc, seed);
    S.randomize();
    auto sweep = [&] { S.swendsen_wang_sweep(); };
    for (int i = 0; i < burn_in; ++i) sweep();

    std::vector<std::vector<cplx>> out;
    for (int c = 0; c < count; ++c) {
        for (int i = 0; i < sweeps_between; ++i) sweep();
        const auto& s = S.spins();
        auto spin = [&](int x, int y) -> int {
            auto it = idx.find(pack(x, y));
            if (it != idx.end()) return s[it->second];
            return y >= 0 ? 1 : -1;
        };
        // dual vertices at (x + 1/2, y + 1/2), stored as the lower-left site (x, y);
        // an edge in direction d is on the interface when + is on its left
        auto usable = [&](Site c0, int d) {
            Site a, b;  // left and right sites of the dual step
            switch (d) {
                case 0: a = {c0.x + 1, c0.y + 1}; b = {c0.x + 1, c0.y}; break;
                case 1: a = {c0.x, c0.y + 1}; b = {c0.x + 1, c0.y + 1}; break;
                case 2: a = {c0.x, c0.y}; b = {c0.x, c0.y + 1}; break;
                default: a = {c0.x + 1, c0.y}; b = {c0.x, c0.y}; break;
            }
            return spin(a.x, a.y) > 0 && spin(b.x, b.y) < 0;
        };
        Site cur{-R - 2, -1};
        int dir = 0;
        // dual edge midpoints: dual vertices may be visited twice
        std::vector<cplx> pts;
        std::unordered_map<std::uint64_t, int> used;
        const int cap = 16 * (2 * R + 4) * (2 * R + 4);
        while (cur.x <= R + 1 && int(pts.size()) < cap) {
            int next = -1;
            for (int tn : {1, 0, 3}) {
                int d = (dir + tn) % 4;
                std::uint64_t key = pack(cur.x, cur.y) * 4 + std::uint64_t(d);
                if (usable(cur, d) && !used.count(key)) {
                    next = d;
                    used[key] = 1;
                    break;
                }
            }
            if (next < 0) throw Error("spin interface tracing got stuck");
            Site prev = cur;
            cur = cur + lattice_step(next);
            dir = next;
            pts.push_back(cplx(0.5 * (prev.x + cur.x) + 0.5, 0.5 * (prev.y + cur.y) + 0.5) / double(R));
        }
        out.push_back(std::move(pts));
    }
    return out;
}

namespace {

CrossingEstimate binomial(int n, double p, std::size_t hits, std::size_t samples) {
    CrossingEstimate c;
    c.n = n;
    c.p = p;
    c.samples = samples;
    c.prob = double(hits) / double(samples);
    c.stderr_ = std::sqrt(std::max(c.prob * (1 - c.prob), 1.0 / samples) / samples);
    return c;
}

}  // namespace

CrossingEstimate rsw_crossing(int n, double p, std::size_t samples, std::uint64_t seed, int burn_in,
                              int sweeps_between) {
    if (n < 4) throw Error("rsw crossing needs n >= 4");
    if (samples == 0) throw Error("sample count must be positive");
    const int w = 4 * n + 1, h = n + 1;
    Graph g = grid_graph(w, h);
    FKSampler S(g, FKParams{p, 2.0}, free_wiring(g.n), {}, seed);
    for (int i = 0; i < burn_in; ++i) S.swendsen_wang_sweep();
    UnionFind uf(g.n + 2);
    const int left = g.n, right = g.n + 1;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < samples; ++k) {
        for (int i = 0; i < sweeps_between; ++i) S.swendsen_wang_sweep();
        uf.reset(g.n + 2);
        const auto& open = S.open();
        for (std::size_t e = 0; e < g.edges.size(); ++e)
            if (open[e]) uf.unite(g.edges[e][0], g.edges[e][1]);
        for (int y = 0; y < h; ++y) {
            uf.unite(left, y * w);
            uf.unite(right, w - 1 + y * w);
        }
        hits += uf.find(left) == uf.find(right);
    }
    return binomial(n, p, hits, samples);
}

CrossingEstimate annulus_crossing(int n, double p, std::size_t samples, std::uint64_t seed, int burn_in,
                                  int sweeps_between) {
    if (n < 4) throw Error("annulus crossing needs n >= 4");
    if (samples == 0) throw Error("sample count must be positive");
    // S_{n,2n}: box of radius 2n minus the open box of radius n
    const int N = 2 * n;
    const int side = 2 * N + 1;
    Graph g;
    std::vector<int> id(std::size_t(side) * side, -1);
    auto in_annulus = [&](int x, int y) { return std::max(std::abs(x), std::abs(y)) >= n; };
    for (int y = -N; y <= N; ++y)
        for (int x = -N; x <= N; ++x)
            if (in_annulus(x, y)) id[(y + N) * side + (x + N)] = g.add_vertex(cplx(x, y));
    for (int y = -N; y <= N; ++y)
        for (int x = -N; x <= N; ++x) {
            int i = id[(y + N) * side + (x + N)];
            if (i < 0) continue;
            if (x < N && id[(y + N) * side + (x + 1 + N)] >= 0) g.add_edge(i, id[(y + N) * side + (x + 1 + N)]);
            if (y < N && id[(y + 1 + N) * side + (x + N)] >= 0) g.add_edge(i, id[(y + 1 + N) * side + (x + N)]);
        }
    Wiring xi = free_wiring(g.n);
    for (int y = -N; y <= N; ++y)
        for (int x = -N; x <= N; ++x) {
            int i = id[(y + N) * side + (x + N)];
            if (i < 0) continue;
            int r = std::max(std::abs(x), std::abs(y));
            if (r == N || r == n) xi[i] = 0;
        }
    FKSampler S(g, FKParams{p, 2.0}, xi, {}, seed);
    for (int i = 0; i < burn_in; ++i) S.swendsen_wang_sweep();
    UnionFind uf(g.n + 2);
    const int outer = g.n, inner = g.n + 1;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < samples; ++k) {
        for (int i = 0; i < sweeps_between; ++i) S.swendsen_wang_sweep();
        uf.reset(g.n + 2);
        const auto& open = S.open();
        for (std::size_t e = 0; e < g.edges.size(); ++e)
            if (open[e]) uf.unite(g.edges[e][0], g.edges[e][1]);
        // the boundaries are wired together in the weight, not in the event
        for (int y = -N; y <= N; ++y)
            for (int x = -N; x <= N; ++x) {
                int i = id[(y + N) * side + (x + N)];
                if (i < 0) continue;
                int r = std::max(std::abs(x), std::abs(y));
                if (r == N) uf.unite(outer, i);
                if (r == n) uf.unite(inner, i);
            }
        hits += uf.find(outer) == uf.find(inner);
    }
    return binomial(n, p, hits, samples);
}

TwoPointProfile torus_two_point(int L, double beta, std::size_t measurements, std::uint64_t seed, int burn_in,
                                int steps_between) {
    if (L < 8) throw Error("torus two-point needs L >= 8");
    if (measurements < 20) throw Error("need at least 20 measurements");
    Graph g = torus_graph(L, L);
    SpinSampler S(g, beta, free_bc(g.n), seed);
    S.randomize();
    for (int i = 0; i < burn_in; ++i) S.wolff_step();

    const int half = L / 2;
    const int nc = L * (L / 2 + 1);
    std::vector<double> field(std::size_t(L) * L);
    fftw_complex* spec = fftw_alloc_complex(std::size_t(nc));
    fftw_plan fwd = fftw_plan_dft_r2c_2d(L, L, field.data(), spec, FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft_c2r_2d(L, L, spec, field.data(), FFTW_ESTIMATE);

    const int nbatch = 20;
    const std::size_t per = measurements / nbatch;
    std::vector<std::vector<double>> batch(nbatch, std::vector<double>(half + 1, 0.0));
    std::vector<signed char> before;
    for (int b = 0; b < nbatch; ++b) {
        for (std::size_t k = 0; k < per; ++k) {
            for (int i = 0; i + 1 < steps_between; ++i) S.wolff_step();
            before = S.spins();
            int size = S.wolff_step();
            const auto& after = S.spins();
            for (int i = 0; i < g.n; ++i) field[i] = before[i] != after[i] ? 1.0 : 0.0;
            fftw_execute(fwd);
            for (int i = 0; i < nc; ++i) {
                spec[i][0] = spec[i][0] * spec[i][0] + spec[i][1] * spec[i][1];
                spec[i][1] = 0;
            }
            fftw_execute(bwd);
            // field now holds N * sum_x 1_C(x) 1_C(x + r); improved estimator A(r) / |C|
            const double norm = 1.0 / (double(g.n) * size);
            for (int r = 0; r <= half; ++r)
                batch[b][r] += 0.5 * (field[r] + field[std::size_t(r) * L]) * norm;
        }
        for (double& v : batch[b]) v /= double(per);
    }
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(spec);

    TwoPointProfile P;
    P.L = L;
    P.beta = beta;
    P.measurements = per * nbatch;
    for (int r = 0; r <= half; ++r) {
        double s = 0, s2 = 0;
        for (int b = 0; b < nbatch; ++b) {
            s += batch[b][r];
            s2 += batch[b][r] * batch[b][r];
        }
        double mean = s / nbatch;
        P.r.push_back(r);
        P.g.push_back(mean);
        P.err.push_back(std::sqrt(std::max(0.0, s2 / nbatch - mean * mean) / (nbatch - 1)));
    }
    P.batches = std::move(batch);
    return P;
}

ExponentFit fit_exponent(const TwoPointProfile& prof, double rmin, double rmax) {
    std::vector<double> lr, r, lg, w;
    for (std::size_t i = 0; i < prof.r.size(); ++i) {
        if (prof.r[i] < rmin || prof.r[i] > rmax) continue;
        if (!(prof.g[i] > 0)) continue;
        double sl = prof.err[i] / prof.g[i];
        r.push_back(prof.r[i]);
        lr.push_back(std::log(prof.r[i]));
        lg.push_back(std::log(prof.g[i]));
        w.push_back(1.0 / std::max(sl * sl, 1e-12));
    }
    if (r.size() < 3) throw Error("exponent fit: fewer than 3 usable distances");
    auto pw = weighted_fit(lr, lg, w);
    auto ex = weighted_fit(r, lg, w);
    ExponentFit F;
    F.eta = -pw.b;
    F.rate = -ex.b;
    F.aic_power = pw.chi2 + 4;
    F.aic_exp = ex.chi2 + 4;
    F.points = int(r.size());
    // jackknife over the batches
    const std::size_t nb = prof.batches.size();
    if (nb >= 2) {
        std::vector<double> etas;
        for (std::size_t drop = 0; drop < nb; ++drop) {
            std::vector<double> x, y, ones;
            for (std::size_t i = 0; i < prof.r.size(); ++i) {
                if (prof.r[i] < rmin || prof.r[i] > rmax) continue;
                double s = 0;
                for (std::size_t b = 0; b < nb; ++b)
                    if (b != drop) s += prof.batches[b][i];
                s /= double(nb - 1);
                if (!(s > 0)) continue;
                x.push_back(std::log(prof.r[i]));
                y.push_back(std::log(s));
                ones.push_back(1.0);
            }
            if (x.size() >= 3) etas.push_back(-weighted_fit(x, y, ones).b);
        }
        if (etas.size() >= 2) {
            double m = std::accumulate(etas.begin(), etas.end(), 0.0) / etas.size();
            double v = 0;
            for (double e : etas) v += (e - m) * (e - m);
            F.eta_err = std::sqrt(v * (etas.size() - 1) / etas.size());
        }
    }
    return F;
}

double finite_size_ratio_eta(const TwoPointProfile& large, const TwoPointProfile& small, double rmin, double rmax) {
    if (large.L != 2 * small.L) throw Error("ratio estimator needs sizes L and L/2");
    double s = 0;
    int n = 0;
    for (std::size_t i = 0; i < large.r.size(); ++i) {
        int r = int(large.r[i]);
        if (r < rmin || r > rmax || r % 2) continue;
        std::size_t j = std::size_t(r / 2);
        if (j >= small.g.size() || !(large.g[i] > 0) || !(small.g[j] > 0)) continue;
        s += -std::log2(large.g[i] / small.g[j]);
        ++n;
    }
    if (n == 0) throw Error("ratio estimator: no usable distances");
    return s / n;
}

namespace {

Chi2Result chi2_against(const std::vector<double>& prob, const std::vector<double>& counts, std::size_t n) {
    Chi2Result r;
    r.samples = n;
    double pool_e = 0, pool_o = 0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        double e = prob[i] * double(n);
        if (e < 5) {
            pool_e += e;
            pool_o += counts[i];
            continue;
        }
        r.expected.push_back(e);
        r.observed.push_back(counts[i]);
    }
    if (pool_e > 0) {
        r.expected.push_back(pool_e);
        r.observed.push_back(pool_o);
    }
    for (std::size_t i = 0; i < r.expected.size(); ++i)
        r.statistic += std::pow(r.observed[i] - r.expected[i], 2) / r.expected[i];
    r.dof = int(r.expected.size()) - 1;
    if (r.dof < 1) throw Error("chi-square test needs at least two cells");
    r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
    return r;
}

}  // namespace

Chi2Result spin_sampler_chi2(const Graph& g, double beta, SpinSamplerKind kind, std::size_t samples,
                             std::uint64_t seed, int thinning) {
    if (g.n > 16) throw Error("chi-square sampler test needs at most 16 spins");
    auto law = exact_spin_distribution(g, beta, free_bc(g.n));
    SpinSampler S(g, beta, free_bc(g.n), seed);
    S.randomize();
    for (int i = 0; i < 100; ++i) S.sweep(kind);
    std::vector<double> counts(law.prob.size(), 0.0);
    for (std::size_t k = 0; k < samples; ++k) {
        for (int t = 0; t < thinning; ++t) S.sweep(kind);
        std::size_t state = 0;
        for (std::size_t j = 0; j < law.free_vertices.size(); ++j)
            if (S.spins()[law.free_vertices[j]] > 0) state |= std::size_t(1) << j;
        counts[state] += 1;
    }
    auto r = chi2_against(law.prob, counts, samples);
    r.sampler = kind == SpinSamplerKind::Metropolis ? "metropolis" : kind == SpinSamplerKind::Wolff ? "wolff" : "swendsen_wang";
    return r;
}

Chi2Result fk_sampler_chi2(const Graph& g, const FKParams& par, FKSamplerKind kind, std::size_t samples,
                           std::uint64_t seed, int thinning) {
    if (g.edges.size() > 16) throw Error("chi-square sampler test needs at most 16 edges");
    auto law = exact_fk_distribution(g, par, free_wiring(g.n));
    FKSampler S(g, par, free_wiring(g.n), {}, seed);
    for (int i = 0; i < 100; ++i) S.sweep(kind);
    std::vector<double> counts(law.prob.size(), 0.0);
    for (std::size_t k = 0; k < samples; ++k) {
        for (int t = 0; t < thinning; ++t) S.sweep(kind);
        std::size_t state = 0;
        for (std::size_t j = 0; j < law.random_edges.size(); ++j)
            if (S.open()[law.random_edges[j]]) state |= std::size_t(1) << j;
        counts[state] += 1;
    }
    auto r = chi2_against(law.prob, counts, samples);
    r.sampler = kind == FKSamplerKind::HeatBath ? "heat_bath" : "swendsen_wang";
    return r;
}

EnergySlope energy_density_slope(const std::vector<double>& deltas, std::size_t samples, std::uint64_t seed) {
    if (deltas.size() < 2) throw Error("slope fit needs at least two meshes");
    EnergySlope out;
    std::vector<double> x, y, w;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        auto e = energy_density_estimate(1.0, deltas[k], samples, seed + 104729ULL * k);
        out.points.push_back(e);
        out.deltas.push_back(deltas[k]);
        x.push_back(deltas[k]);
        y.push_back(e.mean);
        w.push_back(1.0 / std::max(e.stderr_ * e.stderr_, 1e-16));
    }
    auto f = weighted_fit(x, y, w);
    out.slope = f.b;
    out.intercept = f.a;
    double S = 0, Sx = 0, Sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        S += w[i];
        Sx += w[i] * x[i];
        Sxx += w[i] * x[i] * x[i];
    }
    out.slope_err = std::sqrt(S / (S * Sxx - Sx * Sx));
    return out;
}

namespace {

int nearest_medial(const Domain& D, cplx z, bool need_full) {
    int best = -1;
    double bd = 1e300;
    for (int m = 0; m < int(D.medial.size()); ++m) {
        if (need_full && !D.is_full(m)) continue;
        double d = std::abs(D.medial_pos(m) - z);
        if (d < bd) {
            bd = d;
            best = m;
        }
    }
    if (best < 0) throw Error("probe outside the discretization");
    return best;
}

}  // namespace

ConvergenceTable fk_observable_convergence(const std::vector<double>& deltas, const std::vector<cplx>& probes,
                                           std::size_t samples, std::uint64_t seed, double h_radius) {
    if (deltas.empty()) throw Error("empty delta list");
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1])) throw Error("delta list must be decreasing");
    const int replicas = 4;
    if (samples < std::size_t(replicas) * 50) throw Error("need at least 200 samples per delta");
    ConvergenceTable T;
    const double p = FKParams::self_dual(2.0);
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        const double delta = deltas[k];
        Domain D = build_domain(ShapeSpec::disk(1.0), delta, Variant::FK, Anchor::at(-1.0), Anchor::at(1.0));
        int base = -1;
        for (int v = 0; v < int(D.vertices.size()) && base < 0; ++v)
            if (D.wired[v]) base = v;
        std::vector<int> probe_m;
        for (cplx z : probes) {
            require_interior(z);
            probe_m.push_back(nearest_medial(D, z, true));
        }
        std::vector<int> hv, hf;
        for (int v = 0; v < int(D.vertices.size()); ++v)
            if (std::abs(D.vertex_pos(v)) <= h_radius) hv.push_back(v);
        for (int f = 0; f < int(D.faces.size()); ++f)
            if (std::abs(D.face_pos(f)) <= h_radius) hf.push_back(f);

        // independent replicas give the noise of every derived quantity
        const double norm = 1.0 / std::sqrt(2 * delta);
        std::vector<std::vector<cplx>> val(replicas);
        std::vector<std::vector<double>> hval(replicas);
        std::vector<cplx> edge_sum(D.medial_edges.size(), 0.0);
        for (int r = 0; r < replicas; ++r) {
            auto F = fk_observable_mc(D, p, 2.0, samples / replicas, seed + 1000003ULL * k + 7919ULL * r);
            for (std::size_t e = 0; e < edge_sum.size(); ++e) edge_sum[e] += F.edge[e] / double(replicas);
            for (int m : probe_m) val[r].push_back(F.vertex[m] * norm);
            auto H = least_squares_H(D, F.edge, base, 1.0, 1.0);
            for (int v : hv) hval[r].push_back(H.black[v]);
            for (int f : hf) hval[r].push_back(H.white[f]);
        }
        auto vertex = fk_vertex_values(D, edge_sum);
        double worst = 0, noise = 0;
        for (std::size_t i = 0; i < probes.size(); ++i) {
            const int m = probe_m[i];
            ProbeRow row;
            row.delta = delta;
            row.z = probes[i];
            row.value = vertex[m] * norm;
            row.target = conformal_target("sqrt_phi_prime", D.medial_pos(m));
            row.error = std::abs(row.value - row.target);
            double v2 = 0;
            for (int r = 0; r < replicas; ++r) v2 += std::norm(val[r][i] - row.value);
            row.noise = std::sqrt(v2 / (replicas - 1) / replicas);
            worst = std::max(worst, row.error);
            noise = std::max(noise, row.noise);
            T.rows.push_back(row);
        }
        T.deltas.push_back(delta);
        T.max_error.push_back(worst);
        T.max_noise.push_back(noise);

        auto H = least_squares_H(D, edge_sum, base, 1.0, 1.0);
        std::vector<double> hmean, htarget;
        for (int v : hv) {
            hmean.push_back(H.black[v]);
            htarget.push_back(strip_map(D.vertex_pos(v)).imag());
        }
        for (int f : hf) {
            hmean.push_back(H.white[f]);
            htarget.push_back(strip_map(D.face_pos(f)).imag());
        }
        double herr = 0, hnoise = 0;
        for (std::size_t i = 0; i < hmean.size(); ++i) {
            herr = std::max(herr, std::abs(hmean[i] - htarget[i]));
            double v2 = 0;
            for (int r = 0; r < replicas; ++r) v2 += std::pow(hval[r][i] - hmean[i], 2);
            hnoise = std::max(hnoise, std::sqrt(v2 / (replicas - 1) / replicas));
        }
        T.h_error.push_back(herr);
        T.h_noise.push_back(hnoise);
    }
    return T;
}

ConvergenceTable spin_observable_convergence(const std::vector<double>& deltas, const std::vector<cplx>& probes) {
    if (deltas.empty()) throw Error("empty delta list");
    ConvergenceTable T;
    for (double delta : deltas) {
        Domain D = build_domain(ShapeSpec::disk(1.0), delta, Variant::Spin, Anchor::at(-1.0), Anchor::at(1.0));
        auto F = spin_observable_exact(D);
        double worst = 0;
        for (cplx z : probes) {
            int m = z == cplx(1.0) ? D.b : nearest_medial(D, z, false);
            ProbeRow row;
            row.delta = delta;
            row.z = z;
            row.value = F.vertex[m];
            cplx zm = D.medial_pos(m);
            row.target = m == D.b ? cplx(1.0) : spin_target(zm);
            row.error = std::abs(row.value - row.target);
            worst = std::max(worst, row.error);
            T.rows.push_back(row);
        }
        T.deltas.push_back(delta);
        T.max_error.push_back(worst);
        T.max_noise.push_back(0);
    }
    return T;
}

}  // namespace ifk
