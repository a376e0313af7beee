#include "ifk/identities.hpp"

#include <algorithm>
#include <cmath>

#include "ifk/discrete_analysis.hpp"
#include "ifk/observables.hpp"

namespace ifk {

bool IdentityCheck::pass() const {
    if (info) return true;
    if (std::isnan(value)) return false;
    return control ? value > bound : value < bound;
}

namespace {

IdentityCheck row(int group, std::string name, double value, double bound, bool control = false) {
    IdentityCheck c;
    c.group = group;
    c.name = std::move(name);
    c.value = value;
    c.bound = bound;
    c.control = control;
    return c;
}

IdentityCheck info_row(int group, std::string name, double value) {
    auto c = row(group, std::move(name), value, 0);
    c.info = true;
    return c;
}

struct NamedDomain {
    std::string name;
    Domain D;
};

std::vector<NamedDomain> fk_fixtures() {
    auto rect = [](int w, int h, const char* a, const char* b) {
        return NamedDomain{std::to_string(w) + "x" + std::to_string(h) + "_" + a + "_" + b,
                           build_domain(ShapeSpec::rectangle(w, h), 1, Variant::FK, Anchor::named(a),
                                        Anchor::named(b))};
    };
    return {rect(2, 2, "NE", "SE"), rect(2, 3, "NW", "SE"), rect(4, 4, "NW", "SE"), rect(3, 4, "NE", "SW")};
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

}  // namespace

std::vector<IdentityCheck> kw_duality_checks() {
    std::vector<IdentityCheck> out;
    for (int n : {2, 3})
        for (double b : {0.3, beta_critical(), 0.7})
            out.push_back(row(1, "kw_residual_" + std::to_string(n) + "x" + std::to_string(n) + "_beta" + fmt(b),
                              kw_duality_residual(n, n, b), 1e-10));
    out.push_back(row(1, "kw_shifted_beta_star_3x3", kw_duality_residual(3, 3, 0.4, 0.01), 1e-3, true));
    return out;
}

std::vector<IdentityCheck> high_temperature_checks() {
    std::vector<IdentityCheck> out;
    std::vector<std::pair<std::string, Graph>> fixtures = {
        {"path5", path_graph(5)},     {"cycle6", cycle_graph(6)},   {"k4", complete_graph(4)},
        {"k5", complete_graph(5)},    {"grid2x3", grid_graph(2, 3)}, {"grid3x3", grid_graph(3, 3)},
        {"grid2x4", grid_graph(2, 4)}};
    for (auto& [name, g] : fixtures) {
        double zmax = 0, cmax = 0;
        for (double b : {0.2, beta_critical(), 0.9}) {
            double z0 = partition_enumerate(g, b, free_bc(g.n));
            zmax = std::max(zmax, std::abs(ht_partition(g, b) / z0 - 1));
            int far = g.n - 1;
            double c0 = exact_correlation(g, b, free_bc(g.n), 0, far);
            cmax = std::max(cmax, std::abs(ht_correlation(g, b, 0, far) / c0 - 1));
        }
        out.push_back(row(2, "ht_partition_" + name, zmax, 1e-12));
        out.push_back(row(2, "ht_correlation_" + name, cmax, 1e-12));
    }
    double emax = 0;
    for (double b : {0.1, 0.5, 1.0, 2.0})
        emax = std::max(emax, std::abs(ht_correlation(path_graph(2), b, 0, 1) - std::tanh(b)));
    out.push_back(row(2, "single_edge_correlation_minus_tanh", emax, 1e-15));
    return out;
}

std::vector<IdentityCheck> loop_weight_checks() {
    std::vector<IdentityCheck> out;
    for (auto& [name, D] : fk_fixtures()) {
        if (D.num_vars() > 16) continue;
        auto dg = dobrushin_graph(D);
        const int n = D.num_vars();
        for (double p : {FKParams::self_dual(2), 0.35}) {
            FKParams par{p, 2};
            double ref = -1, dev = 0;
            int euler_bad = 0;
            for (std::uint32_t st = 0; st < (1u << n); ++st) {
                std::vector<char> s(n);
                for (int i = 0; i < n; ++i) s[i] = (st >> i) & 1;
                auto lc = loop_representation(D, s);
                double w = fk_weight(dg.g, edge_states(dg, s), par, dg.xi);
                double r = w / (std::pow(par.x(), lc.open) * std::pow(kSqrt2, lc.loops));
                if (ref < 0) ref = r;
                dev = std::max(dev, std::abs(r / ref - 1));
                if (lc.loops + 1 != dobrushin_primal_clusters(D, s) + dobrushin_dual_clusters(D, s) - 1) ++euler_bad;
            }
            out.push_back(row(3, "loop_weight_ratio_" + name + "_p" + fmt(p), dev, 1e-12));
            if (p == FKParams::self_dual(2)) out.push_back(row(3, "euler_violations_" + name, euler_bad, 0.5));
        }
    }
    return out;
}

std::vector<IdentityCheck> observable_relation_checks() {
    std::vector<IdentityCheck> out;
    const double pc = FKParams::self_dual(2);
    for (auto& [name, D] : fk_fixtures()) {
        auto F = fk_observable_exact(D, pc, 2);
        double online = 0;
        for (std::size_t e = 0; e < F.edge.size(); ++e) {
            if (!D.medial_edges[e].active) continue;
            online = std::max(online, std::abs((F.edge[e] / line_of_dir(D.medial_edges[e].dir)).imag()));
        }
        out.push_back(row(4, "edge_off_line_" + name, online, 1e-12));
        out.push_back(row(4, "s_holomorphic_gap_" + name, check_s_holomorphic(D, F.vertex, 1e-12).max_gap, 1e-12));
        for (double p : {0.3, 0.6}) {
            auto G = fk_observable_exact(D, p, 2);
            auto r = massive_residual(D, G, p);
            out.push_back(row(4, "massive_relation_" + name + "_p" + fmt(p), r.relation, 1e-10));
            if (r.laplacian_vertices > 0) {
                out.push_back(row(4, "massive_laplacian_" + name + "_p" + fmt(p), r.laplacian, 1e-10));
                out.push_back(info_row(4, "literal_massive_laplacian_" + name + "_p" + fmt(p), r.literal));
            }
            if (p == 0.3) out.push_back(row(4, "massive_relation_shifted_alpha_" + name,
                                            massive_residual(D, G, p, 0.1).relation, 1e-3, true));
        }
    }
    // the spin observable lives on lines rotated by e^{i pi/8}
    for (double delta : {1.0 / 3, 1.0 / 4}) {
        auto S = build_domain(ShapeSpec::disk(1.0), delta, Variant::Spin, Anchor::at(-1.0), Anchor::at(1.0));
        auto Fs = spin_observable_exact(S);
        std::vector<cplx> rotated(Fs.vertex.size());
        for (std::size_t m = 0; m < rotated.size(); ++m) rotated[m] = Fs.vertex[m] * std::polar(1.0, -kPi / 8);
        out.push_back(row(4, "spin_s_holomorphic_gap_disk_delta" + fmt(delta),
                          check_s_holomorphic(S, rotated, 1e-12).max_gap, 1e-12));
    }
    return out;
}

std::vector<IdentityCheck> parafermion_checks() {
    std::vector<IdentityCheck> out;
    for (auto& [name, D] : fk_fixtures()) {
        for (double q : {1.0, 2.0, 3.0}) {
            double p = FKParams::self_dual(q);
            out.push_back(row(5, "parafermion_" + name + "_q" + fmt(q),
                              parafermionic_residual(D, fk_observable_exact(D, p, q)), 1e-10));
            out.push_back(row(5, "parafermion_shifted_sigma_" + name + "_q" + fmt(q),
                              parafermionic_residual(D, fk_observable_exact(D, p, q, parafermion_spin(q) + 0.1)),
                              1e-3, true));
        }
    }
    return out;
}

std::vector<IdentityCheck> martingale_checks() {
    std::vector<IdentityCheck> out;
    const double pc = FKParams::self_dual(2);
    for (auto& [name, D] : fk_fixtures()) {
        if (D.num_vars() > 16) continue;
        auto F = fk_observable_exact(D, pc, 2);
        int m1 = fk_first_variable(D);
        auto dg = dobrushin_graph(D);
        auto dist = exact_fk_distribution(dg.g, FKParams{pc, 2}, dg.xi, dg.fixed);
        std::vector<cplx> acc(F.edge.size(), 0.0);
        for (int s = 0; s < 2; ++s) {
            double ps = 0;
            for (std::uint32_t st = 0; st < dist.prob.size(); ++st)
                if (dist.config(st, dg.fixed)[D.medial[m1].edge] == s) ps += dist.prob[st];
            auto Fs = fk_observable_exact(fk_slit_domain(D, s), pc, 2);
            for (std::size_t e = 0; e < acc.size(); ++e) acc[e] += ps * Fs.edge[e];
        }
        auto slit = fk_slit_domain(D, false);
        double gap = 0;
        for (std::size_t e = 0; e < acc.size(); ++e)
            if (slit.medial_edges[e].active) gap = std::max(gap, std::abs(acc[e] - F.edge[e]));
        out.push_back(row(6, "fk_martingale_" + name, gap, 1e-12));
    }
    for (int w : {2, 3}) {
        auto S = build_domain(ShapeSpec::rectangle(w, 2), 1, Variant::Spin, Anchor::named("NW"), Anchor::named("SE"));
        auto F = spin_observable_exact(S);
        std::vector<cplx> acc(S.medial.size(), 0.0);
        double total = 0;
        for (auto& st : spin_first_steps(S)) {
            total += st.probability;
            auto G = spin_observable_from(S, st.slit);
            for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += st.probability * G.vertex[m];
        }
        const int va = S.medial[S.a].p0;
        double gap = 0;
        for (std::size_t m = 0; m < acc.size(); ++m) {
            const auto& mv = S.medial[m];
            if (int(m) == S.a || mv.p0 == va || mv.p1 == va) continue;
            gap = std::max(gap, std::abs(acc[m] - F.vertex[m]));
        }
        std::string name = std::to_string(w) + "x2";
        out.push_back(row(6, "spin_martingale_" + name, gap, 1e-12));
        out.push_back(row(6, "spin_first_step_total_" + name, std::abs(total - 1), 1e-12));
    }
    return out;
}

std::vector<IdentityCheck> h_field_checks() {
    std::vector<IdentityCheck> out;
    const double pc = FKParams::self_dual(2);
    for (auto& [name, D] : fk_fixtures()) {
        auto F = fk_observable_exact(D, pc, 2);
        int base = int(std::find(D.wired.begin(), D.wired.end(), 1) - D.wired.begin());
        auto H = integrate_H_edges(D, F.edge, base, 1.0);
        double wired = 0, outer = 0, sub = 0, sup = 0;
        for (int i = 0; i < int(D.vertices.size()); ++i) {
            if (D.wired[i]) wired = std::max(wired, std::abs(H.black[i] - 1));
            double l = black_laplacian(D, H, i);
            if (!std::isnan(l)) sub = std::max(sub, -l);
        }
        for (int f = 0; f < int(D.faces.size()); ++f) {
            if (D.outer_face[f]) outer = std::max(outer, std::abs(H.white[f]));
            double l = white_laplacian(D, H, f);
            if (!std::isnan(l)) sup = std::max(sup, l);
        }
        out.push_back(row(7, "h_path_dependence_" + name, H.inconsistency, 1e-9));
        out.push_back(row(7, "h_black_on_wired_arc_minus_1_" + name, wired, 1e-12));
        out.push_back(row(7, "h_white_on_dual_arc_" + name, outer, 1e-12));
        out.push_back(row(7, "h_black_negative_laplacian_" + name, sub, 1e-12));
        out.push_back(row(7, "h_white_positive_laplacian_" + name, sup, 1e-12));
    }
    return out;
}

std::vector<IdentityCheck> representation_checks() {
    std::vector<IdentityCheck> out;
    auto net = box_network(7, 6);
    Rng rng(12345);
    std::vector<cplx> f(net.size());
    for (auto& v : f) v = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);

    std::vector<cplx> riesz(net.size(), 0.0), hm(net.size(), 0.0);
    auto g = solve_dirichlet(net, f);
    for (int y : net.boundary_vertices()) {
        auto H = harmonic_measure(net, y);
        for (int x = 0; x < net.size(); ++x) {
            riesz[x] += f[y] * H[x];
            hm[x] += g[y] * H[x];
        }
    }
    for (int y : net.interior_vertices()) {
        auto G = green_function(net, y);
        cplx lap = discrete_laplacian(net, f, y);
        for (int x = 0; x < net.size(); ++x) riesz[x] += lap * G[x];
    }
    double rerr = 0, herr = 0;
    for (int x : net.interior_vertices()) {
        rerr = std::max(rerr, std::abs(riesz[x] - f[x]));
        herr = std::max(herr, std::abs(hm[x] - g[x]));
    }
    out.push_back(row(8, "riesz_reconstruction_7x6", rerr, 1e-9));
    out.push_back(row(8, "harmonic_measure_reconstruction_7x6", herr, 1e-9));

    auto one = box_network(3, 3);
    int y = one.interior_vertices().at(0);
    out.push_back(row(8, "green_diagonal_plus_1_single_vertex", std::abs(green_function(one, y)[y] + 1), 1e-15));
    double quarter = 0;
    for (int b : one.boundary_vertices()) {
        double h = harmonic_measure(one, b)[y];
        bool nb = std::abs(std::abs(one.pos[b] - one.pos[y]) - 1) < 1e-12;
        quarter = std::max(quarter, std::abs(h - (nb ? 0.25 : 0.0)));
    }
    out.push_back(row(8, "one_step_exit_measure", quarter, 1e-15));
    return out;
}

std::vector<IdentityCheck> all_identity_checks() {
    std::vector<IdentityCheck> out;
    for (auto fn : {kw_duality_checks, high_temperature_checks, loop_weight_checks, observable_relation_checks,
                    parafermion_checks, martingale_checks, h_field_checks, representation_checks}) {
        auto part = fn();
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

std::string identity_group_name(int group) {
    static const char* names[] = {"",
                                  "Kramers-Wannier duality",
                                  "high-temperature expansion",
                                  "loop weights and Euler relation",
                                  "s-holomorphicity and off-critical relations",
                                  "parafermionic relation",
                                  "martingale identities",
                                  "H field",
                                  "Riesz and harmonic-measure representations"};
    return group >= 1 && group <= 8 ? names[group] : "unknown";
}

}  // namespace ifk
