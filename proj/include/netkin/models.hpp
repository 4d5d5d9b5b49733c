#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netkin/hyperbolic.hpp"

namespace netkin {

enum class ModelKind { Kinetic, HalfMoment, Cattaneo, KellerSegel };

std::string model_name(ModelKind kind);
ModelKind model_from_name(const std::string& name);

/// Model constants shared by every edge of a run.
///
/// `phi` is the relaxation speed of the split scheme; when unset each model
/// uses its equilibrium-matched default (kinetic alpha^2/lambda^2,
/// Cattaneo alpha^2/(3 lambda^2), half-moment alpha^2/(6 lambda^2)).
struct ModelParams {
    double lambda = 1.0;     // turnaround rate, > 0
    double alpha = 1.0;      // chemotactic sensitivity, >= 0
    double D = 1.0;          // chemoattractant diffusivity, > 0
    double gamma_rho = 1.0;  // chemoattractant production, >= 0
    double gamma_m = 0.1;    // chemoattractant decay, >= 0
    double epsilon = 1.0;    // diffusive scaling parameter, in (0, lambda/alpha]
    std::optional<double> phi;

    /// Throws std::invalid_argument if any constant is out of range
    /// (in particular epsilon > lambda/alpha).
    void validate() const;

    /// Effective relaxation speed for `kind`; validates the admissible
    /// range kinetic [0, 1/eps^2], Cattaneo [0, 1/(3 eps^2)],
    /// half-moment [0, 1/(6 eps^2)] when `phi` is overridden.
    double phi_for(ModelKind kind) const;
};

/// Midpoint discretization of the positive half velocity space (0,1):
/// v_k = (k + 1/2)/N, weight dv = 1/N. Full-range moments over [-1,1]
/// carry the parity factor 2.
struct VelocityGrid {
    int count = 0;
    double dv = 0.0;
    std::vector<double> v;

    explicit VelocityGrid(int n);
};

/// Even/odd parities per velocity cell and space cell; row k of `r`/`j`
/// is contiguous in space. `j` carries the 1/eps scaling.
struct KineticEdgeState {
    int nv = 0, nx = 0;
    std::vector<double> r, j;

    KineticEdgeState() = default;
    KineticEdgeState(int nv_, int nx_) : nv(nv_), nx(nx_), r(static_cast<std::size_t>(nv_) * nx_, 0.0), j(r) {}

    double& r_at(int k, int i) { return r[static_cast<std::size_t>(k) * nx + i]; }
    double& j_at(int k, int i) { return j[static_cast<std::size_t>(k) * nx + i]; }
    double r_at(int k, int i) const { return r[static_cast<std::size_t>(k) * nx + i]; }
    double j_at(int k, int i) const { return j[static_cast<std::size_t>(k) * nx + i]; }
};

struct P1EdgeState {
    std::vector<double> rho, q;

    P1EdgeState() = default;
    explicit P1EdgeState(int nx) : rho(nx, 0.0), q(nx, 0.0) {}
};

/// Transformed half-moment unknowns; the half-range moments are
/// recoverable as rho_pm = (rho ± eps rho_hat)/2, q_pm = (eps q ± q_hat)/2.
struct HalfMomentEdgeState {
    std::vector<double> rho, q, rho_hat, q_hat;

    HalfMomentEdgeState() = default;
    explicit HalfMomentEdgeState(int nx) : rho(nx, 0.0), q(nx, 0.0), rho_hat(nx, 0.0), q_hat(nx, 0.0) {}
};

struct KSEdgeState {
    std::vector<double> rho;

    KSEdgeState() = default;
    explicit KSEdgeState(int nx) : rho(nx, 0.0) {}
};

struct ChemoEdgeState {
    std::vector<double> m;

    ChemoEdgeState() = default;
    explicit ChemoEdgeState(int nx) : m(nx, 0.0) {}
};

// ---------------------------------------------------------------------------
// Parity transforms and transport matrices
// ---------------------------------------------------------------------------

/// (f+, f-) -> (r, j) with r = (f+ + f-)/2, j = (f+ - f-)/(2 eps).
std::pair<double, double> even_odd(double f_plus, double f_minus, double eps);
/// Inverse map: f± = r ± eps j.
std::pair<double, double> even_odd_inverse(double r, double j, double eps);

/// Per-velocity kinetic transport matrix [[0, v], [phi v, 0]] on (r, j).
Mat kinetic_transport_matrix(double v, double phi);
/// Cattaneo/P1 transport matrix [[0, 1], [phi, 0]] on (rho, q).
Mat p1_transport_matrix(double phi);
/// Half-moment transport matrix on (rho, q, rho_hat, q_hat).
Mat halfmoment_transport_matrix(double phi);

// ---------------------------------------------------------------------------
// Moments, gradients, initial data
// ---------------------------------------------------------------------------

/// rho_i = 2 dv sum_k r[k][i], q_i = 2 dv sum_k v_k j[k][i].
void moments_kinetic(const KineticEdgeState& state, const VelocityGrid& vgrid,
                     std::span<double> rho, std::span<double> q);

/// Flux-limited gradient g/sqrt(1+g^2) of m, central in the interior.
/// Ghost values (when given) close the stencil at the edge ends; otherwise
/// one-sided differences are used there. |result| < 1 always.
std::vector<double> flux_limited_gradient(std::span<const double> m, double dx,
                                          std::optional<double> left_ghost = std::nullopt,
                                          std::optional<double> right_ghost = std::nullopt);

KineticEdgeState kinetic_from_density(std::span<const double> rho0, const VelocityGrid& vgrid);
P1EdgeState p1_from_density(std::span<const double> rho0);
HalfMomentEdgeState halfmoment_from_density(std::span<const double> rho0);
KSEdgeState ks_from_density(std::span<const double> rho0);

// ---------------------------------------------------------------------------
// Split steps. Transports advance the advective part with ghost states at
// the edge ends; relaxations solve the stiff sources with backward Euler and
// leave the cell densities unchanged.
// ---------------------------------------------------------------------------

/// Ghost states for one edge: physical variables just outside each end.
struct KineticGhosts {
    std::vector<double> left_r, left_j, right_r, right_j;  // per velocity
};

void kinetic_transport(KineticEdgeState& state,
                       const std::vector<LinearHyperbolicSystem>& per_velocity_sys,
                       double dt, double dx, const KineticGhosts& ghosts);

/// Backward-Euler relaxation of (r, j). `mbar` is the flux-limited
/// chemoattractant gradient per cell; ghost r values (one per velocity,
/// pre-relaxation) close the central difference of the post-update r at the
/// edge ends. Empty ghost spans fall back to one-sided differences.
void kinetic_relax(KineticEdgeState& state, std::span<const double> mbar,
                   const ModelParams& params, const VelocityGrid& vgrid, double dt,
                   double dx, std::span<const double> left_ghost_r = {},
                   std::span<const double> right_ghost_r = {});

void p1_transport(P1EdgeState& state, const LinearHyperbolicSystem& sys, double dt,
                  double dx, std::span<const double> left_ghost,
                  std::span<const double> right_ghost);

void p1_relax(P1EdgeState& state, std::span<const double> mbar, const ModelParams& params,
              double dt, double dx, std::optional<double> left_ghost_rho = std::nullopt,
              std::optional<double> right_ghost_rho = std::nullopt);

void hm_transport(HalfMomentEdgeState& state, const LinearHyperbolicSystem& sys, double dt,
                  double dx, std::span<const double> left_ghost,
                  std::span<const double> right_ghost);

/// Half-moment ghost data needed by the relaxation stencils.
struct HmRelaxGhost {
    double rho = 0.0, q_hat = 0.0;
};

void hm_relax(HalfMomentEdgeState& state, std::span<const double> mbar,
              const ModelParams& params, double dt, double dx,
              std::optional<HmRelaxGhost> left = std::nullopt,
              std::optional<HmRelaxGhost> right = std::nullopt);

/// Conservative Keller-Segel update. Interior faces use central gradients
/// and arithmetic averages; the end faces take the prescribed fluxes
/// F = (1/(3 lambda)) d_x rho - (alpha/(3 lambda)) mbar rho (zero at walls,
/// node or Dirichlet fluxes otherwise).
void keller_segel_step(KSEdgeState& state, std::span<const double> mbar,
                       const ModelParams& params, double dt, double dx, double left_face_flux,
                       double right_face_flux);

/// Forward central step for the chemoattractant; ghost values close the
/// Laplacian at the ends.
void chemo_step(ChemoEdgeState& state, std::span<const double> rho, const ModelParams& params,
                double dt, double dx, double left_ghost_m, double right_ghost_m);

}  // namespace netkin
