#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netkin/coupling.hpp"
#include "netkin/graph.hpp"
#include "netkin/models.hpp"

namespace netkin {

/// Behavior of a degree-1 node. Neumann closes the end (zero flux, parity
/// reflection); DirichletDensity prescribes the isotropic inflow state of
/// density `rho` (kinetic f+ = rho/2, and the data derived from it for the
/// moment models).
struct BoundaryCondition {
    enum class Kind { Neumann, DirichletDensity };
    Kind kind = Kind::Neumann;
    double rho = 0.0;
};

/// Piecewise-constant initial cell density on one edge, in the edge's local
/// coordinate: values[k] on (breaks[k-1], breaks[k]).
struct EdgeInit {
    std::vector<double> breaks;
    std::vector<double> values{0.0};
    double m0 = 0.0;

    double density_at(double x) const;
    static EdgeInit constant(double rho0, double m0 = 0.0);
};

struct SimulationOptions {
    double cfl_safety = 0.9;
    int workers = 1;  // NETKIN_THREADS caps this at the CLI
    CattaneoVariant cattaneo_variant = CattaneoVariant::KineticDerived;
    /// Uniform alpha_ij for the AlphaTransmission variant.
    double alpha_transmission_weight = 1.0;
    /// Apply the limit transform to the Cattaneo/half-moment node systems
    /// below this eps (conditioning of the raw blocks degrades like 1/eps).
    double precondition_eps_threshold = 1e-3;
};

/// Raised when the time loop detects non-finite state.
struct SolverAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One model integrated on one network. Per time step: chemoattractant node
/// solve and explicit step, flux-limited gradient, hyperbolic node solves,
/// upwind transport, implicit relaxation. Deterministic for a fixed config
/// regardless of worker count.
class Simulation {
public:
    Simulation(Network net, ModelKind model, ModelParams params, int n_velocity,
               std::vector<EdgeInit> init, std::map<int, BoundaryCondition> boundaries,
               SimulationOptions opts = {});
    ~Simulation();

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    double dt() const { return dt_; }
    double time() const { return time_; }
    long steps() const { return steps_; }
    ModelKind model() const { return model_; }
    const Network& network() const { return net_; }
    const EdgeGrid& grid(int edge) const { return grids_[edge]; }

    /// Integrate to t_target (the last step is clipped to land exactly).
    void advance(double t_target);

    double total_mass() const;
    /// Running minimum of the parities f± over all cells/velocities/steps
    /// (kinetic model only; +infinity otherwise).
    double min_parity() const { return min_parity_; }

    std::vector<double> density(int edge) const;
    std::vector<double> flow(int edge) const;
    std::vector<double> rho_hat(int edge) const;
    std::vector<double> q_hat(int edge) const;
    const std::vector<double>& chemo(int edge) const;

private:
    struct EdgeData;
    struct NodeData;

    void step(double dt);
    void refresh_density();
    void chemo_node_pass(bool for_gradient);
    void hyperbolic_node_pass();
    void relax_ghost_pass();
    void ks_node_pass();
    void transport_edges(double dt);
    void relax_edges(double dt);
    void check_finite();
    void parallel_edges(const std::function<void(int)>& fn);

    Network net_;
    ModelKind model_;
    ModelParams params_;
    SimulationOptions opts_;
    VelocityGrid vgrid_;
    double phi_ = 0.0;
    double dt_ = 0.0;
    double time_ = 0.0;
    long steps_ = 0;
    double min_parity_;

    std::vector<EdgeGrid> grids_;
    std::vector<std::unique_ptr<EdgeData>> edges_;
    std::vector<std::unique_ptr<NodeData>> nodes_;
    std::vector<LinearHyperbolicSystem> kin_systems_;  // per velocity
    std::optional<LinearHyperbolicSystem> moment_system_;
};

}  // namespace netkin
