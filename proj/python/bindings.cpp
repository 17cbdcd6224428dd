#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "graphcurv/builtins.hpp"
#include "graphcurv/errors.hpp"
#include "graphcurv/identities.hpp"
#include "graphcurv/integrals.hpp"
#include "graphcurv/report.hpp"

namespace py = pybind11;
using namespace graphcurv;

namespace {

ResidualReport dispatch_check(const GraphMap& g, const std::string& name,
                              const std::vector<double>& x, double step,
                              double eps) {
    if (name == "simons_identity") return check_simons_identity(g, x, step);
    if (name == "jacobi") return check_jacobi(g, x, step);
    PointGeometry pg = build_point_geometry(g, x, 4);
    if (name == "gauss") return check_gauss(pg);
    if (name == "codazzi") return check_codazzi(pg);
    if (name == "ricci") return check_ricci(pg);
    if (name == "simons_inequality") return check_simons_inequality(pg, eps);
    if (name == "subsolution") return check_subsolution(pg);
    throw std::invalid_argument("unknown check '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() =
        "Numerical verification toolkit for graph immersions with "
        "prescribed mean curvature";

    py::register_exception<ParseError>(m, "ExpressionParseError",
                                       PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<HypothesisError>(m, "HypothesisViolation",
                                            PyExc_RuntimeError);

    py::class_<GraphMap>(m, "GraphMap")
        .def_readonly("n", &GraphMap::n)
        .def_readonly("k", &GraphMap::k)
        .def_property_readonly("psi", [](const GraphMap& g) {
            std::vector<std::string> out;
            for (const auto& c : g.components) out.push_back(to_string(*c));
            return out;
        });

    m.def("load_graph", &resolve_graph,
          "Load a graph from a file path, inline JSON, or builtin:NAME",
          py::arg("spec"));
    m.def("scale_graph", &scale_graph, py::arg("graph"), py::arg("factor"));
    m.def("builtin_names", []() { return builtin_names(); });

    m.def(
        "parse_expression",
        [](const std::string& text, int n) { return to_string(*parse(text, n)); },
        py::arg("text"), py::arg("n"));
    m.def(
        "eval_expression",
        [](const std::string& text, const std::vector<double>& x) {
            return eval_value(*parse(text, static_cast<int>(x.size())), x);
        },
        py::arg("text"), py::arg("x"));

    m.def(
        "point_geometry_json",
        [](const GraphMap& g, const std::vector<double>& x, int depth) {
            return to_json(build_point_geometry(g, x, depth));
        },
        py::arg("graph"), py::arg("x"), py::arg("depth") = 4);

    m.def(
        "check_json",
        [](const GraphMap& g, const std::string& name,
           const std::vector<double>& x, double step, double eps) {
            return to_json(dispatch_check(g, name, x, step, eps));
        },
        py::arg("graph"), py::arg("name"), py::arg("x"),
        py::arg("step") = 1e-3, py::arg("eps") = 1.0);

    m.def(
        "flatness_json",
        [](const GraphMap& g,
           const std::vector<std::array<double, 2>>& box, int per_axis) {
            return to_json(check_flatness(g, grid_points(box, per_axis)));
        },
        py::arg("graph"), py::arg("box"), py::arg("per_axis") = 5);

    m.def(
        "stability_json",
        [](const GraphMap& g, const std::vector<double>& center, double rho,
           int s, int cells, int gauss, int jobs) {
            TestFunction phi{center, rho, s};
            QuadratureGrid grid{phi.support_box(), cells, gauss};
            return to_json(check_stability(g, phi, grid, jobs));
        },
        py::arg("graph"), py::arg("center"), py::arg("rho"), py::arg("s") = 3,
        py::arg("cells") = 8, py::arg("gauss") = 4, py::arg("jobs") = 1);

    m.def(
        "integral_estimate_json",
        [](const GraphMap& g, double p, const std::vector<double>& center,
           double rho, int s, int cells, int gauss, int jobs) {
            TestFunction phi{center, rho, s};
            QuadratureGrid grid{phi.support_box(), cells, gauss};
            return to_json(check_integral_estimate(g, p, phi, grid, jobs));
        },
        py::arg("graph"), py::arg("p"), py::arg("center"), py::arg("rho"),
        py::arg("s") = 3, py::arg("cells") = 8, py::arg("gauss") = 4,
        py::arg("jobs") = 1);

    m.def(
        "area_ratio",
        [](const GraphMap& g, const std::vector<double>& center, double R,
           int cells, int gauss, int subdiv) {
            AreaRatio ar = area_ratio(g, center, R, cells, gauss, subdiv);
            return std::make_pair(ar.lower, ar.upper);
        },
        py::arg("graph"), py::arg("center"), py::arg("R"),
        py::arg("cells") = 8, py::arg("gauss") = 3, py::arg("subdiv") = 6);

    m.def(
        "sup_sweep_json",
        [](const GraphMap& g, const std::vector<double>& center,
           const std::vector<double>& radii, int cells, int gauss, int jobs) {
            return to_json(sup_sweep(g, center, radii, cells, gauss, jobs));
        },
        py::arg("graph"), py::arg("center"), py::arg("radii"),
        py::arg("cells") = 8, py::arg("gauss") = 4, py::arg("jobs") = 1);

    m.def(
        "sup_sweep_csv",
        [](const GraphMap& g, const std::vector<double>& center,
           const std::vector<double>& radii, int cells, int gauss, int jobs) {
            return sweep_to_csv(sup_sweep(g, center, radii, cells, gauss, jobs));
        },
        py::arg("graph"), py::arg("center"), py::arg("radii"),
        py::arg("cells") = 8, py::arg("gauss") = 4, py::arg("jobs") = 1);

    m.def(
        "mean_value_json",
        [](const GraphMap& g, const std::vector<double>& center, double R,
           double p, int cells, int gauss, int jobs) {
            return to_json(mean_value_data(g, center, R, p, cells, gauss, jobs));
        },
        py::arg("graph"), py::arg("center"), py::arg("R"), py::arg("p"),
        py::arg("cells") = 8, py::arg("gauss") = 4, py::arg("jobs") = 1);
}
