#pragma once

#include <span>
#include <utility>
#include <vector>

#include "netkin/hyperbolic.hpp"
#include "netkin/linalg.hpp"

namespace netkin {

/// Node mixing matrix A of the coupling relation f+ = A f-.
/// Invariants (validated): entries >= 0, zero diagonal, column sums 1
/// (mass conservation) and row sums 1 (density continuity in the limit).
struct CouplingMatrix {
    Mat a;

    int order() const { return static_cast<int>(a.rows()); }
    void validate() const;
};

/// The equal-treatment choice a_ij = 1/(N-1) off the diagonal; N >= 2.
CouplingMatrix kinetic_coupling_matrix(int degree);

enum class CattaneoVariant { KineticDerived, AlphaTransmission, DensityContinuity };

// ---------------------------------------------------------------------------
// Linear node conditions and the generic characteristic solve
// ---------------------------------------------------------------------------

/// Linear conditions on the stacked boundary states [U_1; ...; U_N]
/// (dim-n vectors in the local all-outgoing frame): coeff * U = rhs.
struct NodeConditions {
    Mat coeff;
    std::vector<double> rhs;
};

/// Solves node conditions by characteristic decomposition: per edge the
/// outgoing-wave content (negative speeds) is taken from the interior trace
/// and the ingoing-wave strengths are the unknowns. The condition count must
/// equal (positive speeds) x (edges); the solve matrix is factored once.
class CharacteristicNodeSolver {
public:
    CharacteristicNodeSolver(const LinearHyperbolicSystem& sys, NodeConditions conds, int degree);

    int degree() const { return degree_; }
    int dim() const { return sys_.dim; }

    /// traces: one dim-n state per edge -> boundary states per edge.
    std::vector<std::vector<double>> solve(const std::vector<std::vector<double>>& traces) const;

private:
    LinearHyperbolicSystem sys_;
    NodeConditions conds_;
    int degree_ = 0;
    std::vector<int> pos_, neg_;
    std::vector<double> row_scale_;
    LuFactor lu_;
};

// ---------------------------------------------------------------------------
// Per-model condition builders
// ---------------------------------------------------------------------------

/// Cattaneo node conditions on (rho, q) per edge.
///  - KineticDerived: (I - A) rho + (3/2) eps (I + A) q = 0
///  - AlphaTransmission: q_i / (sqrt(3) eps) = sum_j alpha_ij (rho_j - rho_i)
///  - DensityContinuity: rho_i = rho_j and sum q_i = 0
/// `alpha_ij` (AlphaTransmission only) must be nonnegative with
/// sum_i (alpha_ij - alpha_ji) = 0. With `precondition` the KineticDerived
/// block is rebalanced by the limit transform, which keeps the solution set
/// and removes the eps-degeneracy of the raw rows.
NodeConditions cattaneo_conditions(const CouplingMatrix& A, double eps, CattaneoVariant variant,
                                   const Mat* alpha_ij = nullptr, bool precondition = false);

/// Half-moment node conditions on (rho, q, rho_hat, q_hat) per edge:
/// (I - A) rho + eps (I + A) rho_hat = 0 and (I - A) q_hat + eps (I + A) q = 0.
NodeConditions halfmoment_conditions(const CouplingMatrix& A, double eps,
                                     bool precondition = false);

// ---------------------------------------------------------------------------
// Kinetic node solve (explicit characteristic system)
// ---------------------------------------------------------------------------

/// Node solve of f+ = A f- in parity variables, one velocity at a time.
/// With characteristic variables w± = j ± sqrt(phi) r the unknown ingoing
/// strengths solve ((1/(2 sqrt(phi)) + eps/2) I - (1/(2 sqrt(phi)) - eps/2) A) w+
/// = rhs(w-); the matrix is strictly diagonally dominant for eps, phi > 0
/// and shared by every velocity, so it is factored once.
///
/// With `precondition` the summed row is replaced by its eps-free limit
/// sum w+ = -sum w- (the mass balance), which keeps the system well
/// conditioned for small eps.
class KineticNodeSolver {
public:
    KineticNodeSolver(const CouplingMatrix& A, double eps, double phi,
                      bool precondition = false);

    int degree() const { return degree_; }

    /// Boundary parities per edge from interior traces (local frame).
    void solve(std::span<const double> r_trace, std::span<const double> j_trace,
               std::span<double> r_out, std::span<double> j_out) const;

private:
    int degree_ = 0;
    bool precondition_ = false;
    double sqrt_phi_ = 0.0;
    double c_plus_ = 0.0, c_minus_ = 0.0;
    Mat a_;
    LuFactor lu_;
};

// ---------------------------------------------------------------------------
// Parabolic node solves (Keller-Segel density and chemoattractant)
// ---------------------------------------------------------------------------

struct ScalarNodeSolution {
    double value = 0.0;                // shared node value
    std::vector<double> fluxes;        // per edge, positive = into the edge
};

/// Shared node density rho* with sum of discrete fluxes zero:
/// q_i = -(1/(3 lambda)) (rho_i1 - rho*) / (dx_i/2)
///       + (alpha/(3 lambda)) mbar_i (rho* + rho_i1)/2.
ScalarNodeSolution solve_node_keller_segel(std::span<const double> first_cell_rho,
                                           std::span<const double> mbar_node,
                                           std::span<const double> dx, double lambda,
                                           double alpha);

/// Continuity + Kirchhoff balance for the chemoattractant:
/// m* makes sum_i D (m_i1 - m*) / (dx_i/2) vanish.
ScalarNodeSolution solve_node_chemo(std::span<const double> first_cell_m,
                                    std::span<const double> dx, double D);

// ---------------------------------------------------------------------------
// eps -> 0 limit transformation of the coupling systems
// ---------------------------------------------------------------------------

/// One pair of condition blocks affine in eps:
/// (p0x + eps p1x) x + (p0y + eps p1y) y = 0.
struct LimitPair {
    Mat p0x, p1x, p0y, p1y;

    /// Rows over the stacked vector [x; y] at a concrete eps.
    Mat evaluate(double eps) const;
};

/// T = identity with the last row replaced by all ones.
Mat limit_T(int n);

/// Cattaneo pair: x = rho, y = q.
LimitPair cattaneo_condition_pair(int degree);
/// Half-moment pairs: {x = rho, y = rho_hat} and {x = q_hat, y = q}.
std::pair<LimitPair, LimitPair> halfmoment_condition_pairs(int degree);

/// Left-multiplies both blocks by T and divides the resulting zero row by
/// eps, so the system stays equivalent for eps > 0 and is nondegenerate at
/// eps = 0 (where it states continuity of x and a Kirchhoff sum for y).
LimitPair epsilon_limit_transform(const LimitPair& in);

/// Convenience: transformed system evaluated at eps.
Mat epsilon_limit_check(const LimitPair& conditions, double eps);

}  // namespace netkin
