#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "canex/expansion.hpp"
#include "canex/graph.hpp"
#include "canex/integrals.hpp"
#include "canex/oracle.hpp"
#include "canex/polymer.hpp"

namespace py = pybind11;
using namespace canex;

namespace {

std::vector<std::string> graph_list(const std::string& kind, int n) {
    std::vector<std::string> out;
    auto visit = [&](const LabeledGraph& g) {
        const bool keep = kind == "graphs" || (kind == "connected" && is_connected(g)) ||
                          (kind == "two-connected" && is_two_connected(g));
        if (keep) out.push_back(g.to_string());
    };
    if (kind == "trees")
        for_each_tree(n, [&](const LabeledGraph& g) { out.push_back(g.to_string()); });
    else if (kind == "graphs" || kind == "connected" || kind == "two-connected")
        for_each_graph(n, visit);
    else
        throw DomainError("kind must be graphs, connected, two-connected or trees");
    return out;
}

// Rationals cross the boundary as "p/q" strings; the Python side turns them into Fractions.
std::string ursell_text(const std::vector<std::pair<std::size_t, int>>& entries, std::size_t polymers,
                        const std::vector<std::pair<std::size_t, std::size_t>>& incompatible) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < polymers; ++i) names.push_back("p" + std::to_string(i));
    return to_string(ursell_coefficient(MultiIndex(entries), PolymerSpace(names, incompatible)));
}

}  // namespace

PYBIND11_MODULE(_canex, m) {
    m.doc() = "Canonical cluster expansion core";

    // Translators run newest first, so the subclasses registered after the base take precedence.
    const auto base = py::register_exception<Error>(m, "CanexError");
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<SizeLimitError>(m, "SizeLimitError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

    m.def("graphs", &graph_list, py::arg("kind"), py::arg("n"));
    m.def("count_connected", &count_connected);
    m.def("count_two_connected", &count_two_connected);
    m.def("ursell_coefficient_text", &ursell_text, py::arg("entries"), py::arg("polymers"), py::arg("incompatible"));
    m.def(
        "restricted_cluster_sum_text",
        [](const std::string& graph, int M) { return to_string(restricted_cluster_sum(LabeledGraph::parse(graph), M)); },
        py::arg("graph"), py::arg("M"));

    py::class_<PairPotential>(m, "PairPotential")
        .def_static("zero", &PairPotential::zero)
        .def_static("hard_core", &PairPotential::hard_core, py::arg("sigma"))
        .def_static("square_well", &PairPotential::square_well, py::arg("sigma"), py::arg("epsilon"),
                    py::arg("lam"))
        .def_static("gaussian", &PairPotential::gaussian, py::arg("epsilon"), py::arg("alpha"))
        .def_static("from_params", &PairPotential::from_params, py::arg("kind"), py::arg("params"))
        .def("energy", &PairPotential::energy)
        .def("mayer_f", &PairPotential::mayer_f, py::arg("beta"), py::arg("r"))
        .def_property_readonly("name", &PairPotential::name)
        .def("__repr__", &PairPotential::name);

    py::class_<BoxGeometry>(m, "BoxGeometry")
        .def(py::init<int, double>(), py::arg("d"), py::arg("L"))
        .def_readonly("d", &BoxGeometry::d)
        .def_readonly("L", &BoxGeometry::L)
        .def_property_readonly("volume", &BoxGeometry::volume);

    py::class_<IntegrationOptions>(m, "IntegrationOptions")
        .def(py::init<>())
        .def_property(
            "method", [](const IntegrationOptions& o) { return to_string(o.method); },
            [](IntegrationOptions& o, const std::string& s) { o.method = parse_method(s); })
        .def_readwrite("samples", &IntegrationOptions::samples)
        .def_readwrite("seed", &IntegrationOptions::seed)
        .def_readwrite("workers", &IntegrationOptions::workers);

    py::class_<IntegralResult>(m, "IntegralResult")
        .def_readonly("value", &IntegralResult::value)
        .def_readonly("error", &IntegralResult::error)
        .def_readonly("samples", &IntegralResult::samples)
        .def_readonly("seed", &IntegralResult::seed)
        .def("record", &IntegralResult::record);

    py::class_<ExpansionParams>(m, "ExpansionParams")
        .def(py::init<>())
        .def_readwrite("N", &ExpansionParams::N)
        .def_readwrite("box", &ExpansionParams::box)
        .def_readwrite("beta", &ExpansionParams::beta)
        .def_readwrite("potential", &ExpansionParams::potential)
        .def_readwrite("lattice_cutoff", &ExpansionParams::lattice_cutoff)
        .def_readwrite("n_max", &ExpansionParams::n_max)
        .def_readwrite("M", &ExpansionParams::M)
        .def_readwrite("a", &ExpansionParams::a)
        .def_readwrite("c", &ExpansionParams::c)
        .def_readwrite("integration", &ExpansionParams::integration)
        .def("validate", &ExpansionParams::validate)
        .def("describe", &ExpansionParams::describe);

    py::class_<SeriesRow>(m, "SeriesRow")
        .def_readonly("n", &SeriesRow::n)
        .def_readonly("P", &SeriesRow::P)
        .def_readonly("P_vanishes", &SeriesRow::P_vanishes)
        .def_readonly("B", &SeriesRow::B)
        .def_readonly("B_error", &SeriesRow::B_error)
        .def_readonly("F", &SeriesRow::F)
        .def_readonly("F_error", &SeriesRow::F_error)
        .def_readonly("truncation_bound", &SeriesRow::truncation_bound)
        .def_readonly("decay_bound", &SeriesRow::decay_bound);

    py::class_<SeriesReport>(m, "SeriesReport")
        .def_readonly("rows", &SeriesReport::rows)
        .def_readonly("uncertified", &SeriesReport::uncertified)
        .def_readonly("log_Z_per_volume", &SeriesReport::log_Z_per_volume)
        .def_readonly("ideal_term", &SeriesReport::ideal_term)
        .def_readonly("series_sum", &SeriesReport::series_sum)
        .def_property_readonly("certificate", [](const SeriesReport& r) { return r.certificate.source(); })
        .def("to_csv", &SeriesReport::to_csv)
        .def("to_records", &SeriesReport::to_records);

    m.def("log_Z_canonical", &log_Z_canonical, py::arg("params"), py::call_guard<py::gil_scoped_release>());
    m.def("beta_n", &beta_n, py::arg("n"), py::arg("potential"), py::arg("beta"), py::arg("d"),
          py::arg("options") = IntegrationOptions{}, py::arg("domain_radius") = 0.0,
          py::call_guard<py::gil_scoped_release>());
    m.def("virial_coefficients", &virial_coefficients, py::arg("beta_coeffs"));
    m.def("virial_pressure", &virial_pressure, py::arg("rho"), py::arg("beta_coeffs"), py::arg("m_max"));
    m.def("free_energy_density", &free_energy_density, py::arg("rho"), py::arg("beta_coeffs"), py::arg("m_max"));
    m.def("p_factor", [](int N, double volume, int n) { return p_factor(N, volume, n).value; });

    m.def("tonks_exact_Z", [](int N, double L, double sigma) { return tonks_exact_Z(N, L, sigma).log_value; },
          py::arg("N"), py::arg("L"), py::arg("sigma"), "log Z of hard rods on a ring");
    m.def(
        "brute_force_Z",
        [](int N, const BoxGeometry& box, const PairPotential& v, double beta) {
            return brute_force_Z(N, box, v, beta).value;
        },
        py::arg("N"), py::arg("box"), py::arg("potential"), py::arg("beta"), py::call_guard<py::gil_scoped_release>());
}
