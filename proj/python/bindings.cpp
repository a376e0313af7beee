#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ifk/harness.hpp"
#include "ifk/identities.hpp"

namespace py = pybind11;
using namespace ifk;

namespace {

Domain make_domain(const std::string& shape, double size_x, double size_y, double delta, const std::string& variant,
                   py::object a, py::object b) {
    ShapeSpec spec = shape == "disk" ? ShapeSpec::disk(size_x)
                   : shape == "rectangle" ? ShapeSpec::rectangle(int(size_x), int(size_y))
                   : throw Error("unknown shape '" + shape + "' (rectangle, disk)");
    auto anchor = [](py::object o) {
        if (py::isinstance<py::str>(o)) return Anchor::named(o.cast<std::string>());
        return Anchor::at(o.cast<cplx>());
    };
    Variant v = variant == "spin" ? Variant::Spin : variant == "fk" ? Variant::FK
                                                  : throw Error("unknown variant '" + variant + "' (spin, fk)");
    return build_domain(spec, delta, v, anchor(a), anchor(b));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Ising and FK-Ising models: exact identities, samplers and observables";
    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    m.def("beta_critical", &beta_critical);
    m.def("p_self_dual", &FKParams::self_dual, py::arg("q") = 2.0);
    m.def("dual_beta", &dual_beta);

    py::class_<Graph>(m, "Graph")
        .def(py::init<>())
        .def_readonly("n", &Graph::n)
        .def_readonly("edges", &Graph::edges)
        .def("add_vertex", [](Graph& g) { return g.add_vertex(); })
        .def("add_edge", &Graph::add_edge);
    m.def("grid_graph", &grid_graph, py::arg("w"), py::arg("h"), py::arg("spacing") = 1.0);
    m.def("torus_graph", &torus_graph);
    m.def("path_graph", &path_graph);
    m.def("cycle_graph", &cycle_graph);
    m.def("complete_graph", &complete_graph);

    m.def("partition_function",
          [](const Graph& g, double beta, std::vector<int> plus) {
              return partition_enumerate(g, beta, plus.empty() ? free_bc(g.n) : fixed_bc(g.n, plus, +1));
          },
          py::arg("graph"), py::arg("beta"), py::arg("plus_vertices") = std::vector<int>{});
    m.def("ht_partition", &ht_partition);
    m.def("ht_correlation", &ht_correlation);
    m.def("exact_correlation",
          [](const Graph& g, double beta, int x, int y) { return exact_correlation(g, beta, free_bc(g.n), x, y); });
    m.def("kw_duality_residual", &kw_duality_residual, py::arg("w"), py::arg("h"), py::arg("beta"),
          py::arg("beta_star_shift") = 0.0);

    m.def("fk_weight",
          [](const Graph& g, std::vector<char> open, double p, double q) {
              return fk_weight(g, open, FKParams{p, q}, free_wiring(g.n));
          });
    m.def("fk_distribution",
          [](const Graph& g, double p, double q) { return exact_fk_distribution(g, FKParams{p, q}, free_wiring(g.n)).prob; });

    py::class_<Domain>(m, "Domain")
        .def_readonly("delta", &Domain::delta)
        .def_property_readonly("num_vertices", [](const Domain& D) { return D.vertices.size(); })
        .def_property_readonly("num_vars", &Domain::num_vars)
        .def_property_readonly("hash", &Domain::hash)
        .def_property_readonly("a", [](const Domain& D) { return D.medial_pos(D.a); })
        .def_property_readonly("b", [](const Domain& D) { return D.medial_pos(D.b); })
        .def("medial_positions", [](const Domain& D) {
            std::vector<cplx> z;
            for (int i = 0; i < int(D.medial.size()); ++i) z.push_back(D.medial_pos(i));
            return z;
        });
    m.def("build_domain", &make_domain, py::arg("shape"), py::arg("size_x"), py::arg("size_y") = 0.0,
          py::arg("delta") = 1.0, py::arg("variant") = "fk", py::arg("a") = "NW", py::arg("b") = "SE");

    m.def("line_of", &line_of);
    m.def("fk_observable",
          [](const Domain& D, double p, double q) {
              auto F = fk_observable_exact(D, p, q);
              return py::make_tuple(F.edge, F.vertex);
          },
          py::arg("domain"), py::arg("p"), py::arg("q") = 2.0);
    m.def("spin_observable", [](const Domain& D) { return spin_observable_exact(D).vertex; });
    m.def("parafermion_spin", &parafermion_spin);
    m.def("strip_decay_rate", &strip_decay_rate);
    m.def("massive_alpha", &massive_alpha);

    m.def("conformal_target", &conformal_target);
    m.def("correlation_length", [](double beta, double x, double y) { return correlation_length(beta, x, y).tau; });
    m.def("driving_function",
          [](const std::vector<cplx>& curve, double t_stop) {
              auto tr = zip_curve(curve, t_stop);
              return py::make_tuple(tr.t, tr.W);
          },
          py::arg("curve"), py::arg("t_stop") = 1e300);
    m.def("rsw_crossing",
          [](int n, double p, std::size_t samples, std::uint64_t seed) {
              auto c = rsw_crossing(n, p, samples, seed);
              return py::make_tuple(c.prob, c.stderr_);
          });
    m.def("energy_density",
          [](double delta, std::size_t samples, std::uint64_t seed) {
              auto e = energy_density_estimate(1.0, delta, samples, seed);
              return py::make_tuple(e.mean, e.stderr_);
          });
    m.def("identity_checks", [] {
        py::list out;
        for (const auto& c : all_identity_checks())
            out.append(py::dict(py::arg("group") = c.group, py::arg("name") = c.name, py::arg("value") = c.value,
                                py::arg("bound") = c.bound, py::arg("control") = c.control, py::arg("info") = c.info,
                                py::arg("pass") = c.pass()));
        return out;
    });
}
