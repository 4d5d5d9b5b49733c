#pragma once

#include <span>
#include <vector>

#include "netkin/linalg.hpp"

namespace netkin {

/// Uniform cell partition of a single edge.
struct EdgeGrid {
    int cells = 0;
    double dx = 0.0;

    EdgeGrid() = default;
    EdgeGrid(double length, int n) : cells(n), dx(length / n) {}

    double center(int i) const { return (i + 0.5) * dx; }
};

/// Constant-coefficient linear hyperbolic system u_t + M u_x = 0 together
/// with its cached real eigendecomposition. Eigenvalues are sorted
/// ascending; `right` holds right eigenvectors as columns and `left` the
/// matching rows of right^{-1}, so right * left == I and
/// right * diag(lambda) * left == M (both to 1e-12, enforced on build).
struct LinearHyperbolicSystem {
    int dim = 0;
    Mat matrix;
    std::vector<double> lambda;
    Mat right;
    Mat left;

    double max_abs_speed() const {
        double m = 0.0;
        for (double l : lambda) m = std::max(m, std::abs(l));
        return m;
    }
};

/// Decompose a transport matrix into real characteristic fields.
/// Supports the model matrices used here (any 1x1/2x2, and 3x3/4x4 with
/// real spectrum). Throws std::runtime_error if the spectrum is complex
/// or the eigenvector basis is defective.
LinearHyperbolicSystem eigendecompose(const Mat& transport);

/// One explicit first-order upwind step for `sys` on `state`, an
/// array of `cells` contiguous dim-vectors. `left_ghost`/`right_ghost`
/// supply the boundary-neighbor states in physical variables.
/// Requires dt * max|lambda| / dx <= 1.
void upwind_step(std::span<double> state, const LinearHyperbolicSystem& sys,
                 double dt, double dx, std::span<const double> left_ghost,
                 std::span<const double> right_ghost);

/// CFL time step: safety * min over edges of min(dx / max|lambda|,
/// dx^2 / (2 max D)). Hyperbolic systems and parabolic coefficients each
/// apply to every grid. Throws on empty grids or no speed constraint at all.
double cfl_dt(const std::vector<const LinearHyperbolicSystem*>& systems,
              const std::vector<EdgeGrid>& grids,
              const std::vector<double>& parabolic_coeffs, double safety);

}  // namespace netkin
