#pragma once

#include <map>
#include <string>
#include <vector>

#include "netkin/simulation.hpp"

namespace netkin {

/// Everything needed to reproduce one run.
struct ScenarioConfig {
    std::string name;
    Network net;
    ModelKind model = ModelKind::Cattaneo;
    ModelParams params;
    int n_velocity = 50;
    double t_end = 0.0;
    int snapshot_count = 50;
    std::vector<EdgeInit> init;
    std::map<int, BoundaryCondition> boundaries;
    SimulationOptions options;

    explicit ScenarioConfig(Network network) : net(std::move(network)) {}
};

/// Riemann problem on the interval [0,2]: rho0 = 1 on [0,1] and 0 on [1,2],
/// no chemoattractant, closed ends. dx = 0.005, T = 0.2, N_v = 50.
ScenarioConfig preset_interval_riemann();

/// Junction with three outgoing unit edges, rho0 = (1, 2, 3), closed far
/// ends. dx = 0.02, T = 0.3.
ScenarioConfig preset_tripod();

/// Reconstruction of the 31-edge / 23-node network: edge lengths 0.5, 1,
/// sqrt(2) with 15/30/42 cells, junction degrees up to five, isotropic
/// Dirichlet inflow (density 1) at the eleven open ends, initial density 1
/// on the boundary edges. N_v = 20, T = 5 by default.
ScenarioConfig preset_large_network();

/// The topology document behind preset_large_network (JSON; also shipped
/// as data/large_network.json).
const std::string& large_network_json();

struct EdgeSnapshot {
    std::vector<double> rho, q, rho_hat, q_hat, m;
};

struct Snapshot {
    double t = 0.0;
    std::vector<EdgeSnapshot> edges;
};

struct RunDiagnostics {
    ModelKind model = ModelKind::Cattaneo;
    double dt = 0.0;
    long steps = 0;
    double wall_seconds = 0.0;
    std::vector<double> times;  // strictly increasing, includes 0 and t_end
    std::vector<double> mass;   // total cell mass at `times`
    std::vector<Snapshot> snapshots;
    double min_parity = 0.0;    // kinetic: min of f± over the whole run
};

/// Time loop with snapshot/mass recording at `snapshot_count` evenly spaced
/// times. Deterministic given the config; throws SolverAbort on NaN/Inf.
RunDiagnostics run(const ScenarioConfig& config);

double total_mass(const Snapshot& snap, const Network& net);

/// L1 distance sum_i |a_i - b_i| dx of two cell fields on the same grid.
double l1_distance(const std::vector<double>& a, const std::vector<double>& b, double dx);

/// Network-wide L1 distance of the densities of two snapshots on the same
/// network discretization.
double l1_density_distance(const Snapshot& a, const Snapshot& b, const Network& net);

}  // namespace netkin
