/**
 * @file netkin_py.cpp
 * @brief Python bindings for the netkin core: network parsing, scenario
 * presets, the simulation runner and the coupling/eigenstructure utilities.
 */

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "netkin/coupling.hpp"
#include "netkin/netio.hpp"
#include "netkin/scenarios.hpp"

namespace py = pybind11;
using namespace netkin;

namespace {

std::vector<std::vector<double>> mat_to_list(const Mat& m) {
    std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

Mat list_to_mat(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("matrix must be nonempty");
    Mat m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw std::invalid_argument("matrix rows must have equal length");
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

}  // namespace

PYBIND11_MODULE(_netkin, m) {
    m.doc() = "Chemotaxis cell-density models on networks of 1-D edges";

    py::enum_<ModelKind>(m, "ModelKind")
        .value("kinetic", ModelKind::Kinetic)
        .value("halfmoment", ModelKind::HalfMoment)
        .value("cattaneo", ModelKind::Cattaneo)
        .value("ks", ModelKind::KellerSegel);
    m.def("model_from_name", &model_from_name, py::arg("name"));
    m.def("model_name", &model_name, py::arg("kind"));

    py::class_<EdgeRecord>(m, "Edge")
        .def_readonly("id", &EdgeRecord::id)
        .def_readonly("from_node", &EdgeRecord::from)
        .def_readonly("to_node", &EdgeRecord::to)
        .def_readonly("length", &EdgeRecord::length)
        .def_readonly("cells", &EdgeRecord::cells);

    py::class_<Network>(m, "Network")
        .def_property_readonly("node_count", &Network::node_count)
        .def_property_readonly("edge_count", &Network::edge_count)
        .def("edge", &Network::edge, py::arg("id"), py::return_value_policy::reference_internal)
        .def("degree", [](const Network& n, int node) { return n.node(node).degree(); },
             py::arg("node"));
    m.def("parse_network", &parse_network, py::arg("text"));
    m.def("serialize_network", &serialize_network, py::arg("net"));
    m.def("large_network_json", [] { return large_network_json(); });

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("lambda_", &ModelParams::lambda)
        .def_readwrite("alpha", &ModelParams::alpha)
        .def_readwrite("D", &ModelParams::D)
        .def_readwrite("gamma_rho", &ModelParams::gamma_rho)
        .def_readwrite("gamma_m", &ModelParams::gamma_m)
        .def_readwrite("epsilon", &ModelParams::epsilon)
        .def_readwrite("phi", &ModelParams::phi)
        .def("validate", &ModelParams::validate)
        .def("phi_for", &ModelParams::phi_for, py::arg("kind"));

    py::enum_<CattaneoVariant>(m, "CattaneoVariant")
        .value("kinetic_derived", CattaneoVariant::KineticDerived)
        .value("alpha_transmission", CattaneoVariant::AlphaTransmission)
        .value("density_continuity", CattaneoVariant::DensityContinuity);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def_readonly("name", &ScenarioConfig::name)
        .def_readonly("net", &ScenarioConfig::net)
        .def_readwrite("model", &ScenarioConfig::model)
        .def_readwrite("params", &ScenarioConfig::params)
        .def_readwrite("n_velocity", &ScenarioConfig::n_velocity)
        .def_readwrite("t_end", &ScenarioConfig::t_end)
        .def_readwrite("snapshot_count", &ScenarioConfig::snapshot_count)
        .def_property(
            "cattaneo_variant",
            [](const ScenarioConfig& c) { return c.options.cattaneo_variant; },
            [](ScenarioConfig& c, CattaneoVariant v) { c.options.cattaneo_variant = v; })
        .def_property(
            "workers", [](const ScenarioConfig& c) { return c.options.workers; },
            [](ScenarioConfig& c, int w) { c.options.workers = w; });
    m.def("preset_interval_riemann", &preset_interval_riemann);
    m.def("preset_tripod", &preset_tripod);
    m.def("preset_large_network", &preset_large_network);
    m.def(
        "config_from_json",
        [](const std::string& text) { return io::parse_config(text).scenario; },
        py::arg("text"), "Build a scenario from a run-configuration document");
    m.def(
        "set_dx",
        [](ScenarioConfig& cfg, double dx) { io::override_dx(cfg, dx); },
        py::arg("config"), py::arg("dx"), "Rebuild per-edge cell counts as round(length/dx)");

    py::class_<EdgeSnapshot>(m, "EdgeSnapshot")
        .def_readonly("rho", &EdgeSnapshot::rho)
        .def_readonly("q", &EdgeSnapshot::q)
        .def_readonly("rho_hat", &EdgeSnapshot::rho_hat)
        .def_readonly("q_hat", &EdgeSnapshot::q_hat)
        .def_readonly("m", &EdgeSnapshot::m);
    py::class_<Snapshot>(m, "Snapshot")
        .def_readonly("t", &Snapshot::t)
        .def_readonly("edges", &Snapshot::edges);
    py::class_<RunDiagnostics>(m, "RunDiagnostics")
        .def_readonly("model", &RunDiagnostics::model)
        .def_readonly("dt", &RunDiagnostics::dt)
        .def_readonly("steps", &RunDiagnostics::steps)
        .def_readonly("times", &RunDiagnostics::times)
        .def_readonly("mass", &RunDiagnostics::mass)
        .def_readonly("snapshots", &RunDiagnostics::snapshots)
        .def_readonly("min_parity", &RunDiagnostics::min_parity)
        .def_readonly("wall_seconds", &RunDiagnostics::wall_seconds);
    m.def("run", &run, py::arg("config"), py::call_guard<py::gil_scoped_release>());

    m.def("total_mass", py::overload_cast<const Snapshot&, const Network&>(&total_mass),
          py::arg("snapshot"), py::arg("net"));
    m.def("l1_distance",
          py::overload_cast<const std::vector<double>&, const std::vector<double>&, double>(
              &l1_distance),
          py::arg("a"), py::arg("b"), py::arg("dx"));
    m.def("l1_density_distance", &l1_density_distance, py::arg("a"), py::arg("b"), py::arg("net"));

    m.def(
        "kinetic_coupling_matrix",
        [](int degree) { return mat_to_list(kinetic_coupling_matrix(degree).a); },
        py::arg("degree"));
    m.def(
        "eigendecompose",
        [](const std::vector<std::vector<double>>& rows) {
            const auto sys = eigendecompose(list_to_mat(rows));
            return py::make_tuple(sys.lambda, mat_to_list(sys.right), mat_to_list(sys.left));
        },
        py::arg("matrix"), "Eigenvalues (ascending), right and left eigenvector matrices");
    m.def(
        "halfmoment_transport_matrix",
        [](double phi) { return mat_to_list(halfmoment_transport_matrix(phi)); },
        py::arg("phi"));
    m.def(
        "solve_node_keller_segel",
        [](const std::vector<double>& rho, const std::vector<double>& mbar,
           const std::vector<double>& dx, double lambda, double alpha) {
            const auto sol = solve_node_keller_segel(rho, mbar, dx, lambda, alpha);
            return py::make_tuple(sol.value, sol.fluxes);
        },
        py::arg("first_cell_rho"), py::arg("mbar_node"), py::arg("dx"), py::arg("lambda_"),
        py::arg("alpha"));
    m.def(
        "solve_node_chemo",
        [](const std::vector<double>& mvals, const std::vector<double>& dx, double D) {
            const auto sol = solve_node_chemo(mvals, dx, D);
            return py::make_tuple(sol.value, sol.fluxes);
        },
        py::arg("first_cell_m"), py::arg("dx"), py::arg("D"));

    m.attr("__version__") = "0.1.0";
}
