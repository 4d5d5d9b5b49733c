#include "netkin/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace netkin {

namespace {

// Coefficients c of det(xI - M) = x^n + c[n-1] x^{n-1} + ... + c[0],
// via the Faddeev-LeVerrier recurrence:
//   B_0 = I;  a_k = -tr(M B_{k-1}) / k,  B_k = M B_{k-1} + a_k I.
std::vector<double> characteristic_poly(const Mat& m) {
    const std::size_t n = m.rows();
    std::vector<double> c(n, 0.0);
    Mat b = Mat::identity(n);
    std::vector<double> a(n + 1, 0.0);
    a[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        Mat mb = m * b;
        double tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += mb(i, i);
        a[k] = -tr / static_cast<double>(k);
        b = mb;
        for (std::size_t i = 0; i < n; ++i) b(i, i) += a[k];
    }
    for (std::size_t k = 0; k < n; ++k) c[k] = a[n - k];
    return c;
}

double poly_eval(const std::vector<double>& c, double x) {
    double p = 1.0;
    for (std::size_t k = c.size(); k-- > 0;) p = p * x + c[k];
    return p;
}

double poly_deriv_eval(const std::vector<double>& c, double x) {
    const std::size_t n = c.size();
    double p = static_cast<double>(n);
    for (std::size_t k = n; k-- > 1;) p = p * x + static_cast<double>(k) * c[k];
    return p;
}

void newton_polish(const std::vector<double>& c, double& x) {
    for (int it = 0; it < 4; ++it) {
        const double f = poly_eval(c, x);
        const double df = poly_deriv_eval(c, x);
        if (df == 0.0) return;
        const double step = f / df;
        if (!std::isfinite(step)) return;
        x -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) return;
    }
}

[[noreturn]] void spectrum_error(const char* what) {
    throw std::runtime_error(std::string("eigendecompose: ") + what);
}

std::vector<double> solve_quadratic(double b, double c) {
    const double disc = b * b - 4.0 * c;
    const double scale = std::max({1.0, b * b, std::abs(c)});
    if (disc < -1e-12 * scale) spectrum_error("complex eigenvalues (quadratic)");
    const double s = std::sqrt(std::max(disc, 0.0));
    // Numerically stable pairing.
    const double q = -0.5 * (b + (b >= 0 ? s : -s));
    std::vector<double> r{q, (q != 0.0) ? c / q : -b - q};
    return r;
}

// Real roots of x^3 + a x^2 + b x + c (all three must be real).
std::vector<double> solve_cubic(double a, double b, double c) {
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double off = -a / 3.0;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    const double scale = std::max({1.0, std::abs(p), std::abs(q)});
    std::vector<double> roots;
    if (disc > 1e-12 * scale * scale) spectrum_error("complex eigenvalues (cubic)");
    if (p >= -1e-300) {
        // Triple/garbage-degenerate case: p ~ 0 and q ~ 0.
        roots.assign(3, off + std::cbrt(-q));
        return roots;
    }
    const double m = 2.0 * std::sqrt(-p / 3.0);
    double arg = 3.0 * q / (p * m);
    arg = std::clamp(arg, -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k)
        roots.push_back(off + m * std::cos(theta - 2.0 * M_PI * k / 3.0));
    return roots;
}

// Real roots of x^4 + a x^3 + b x^2 + c x + d (all four must be real).
std::vector<double> solve_quartic(double a, double b, double c, double d) {
    // Depress: x = y - a/4.
    const double off = -a / 4.0;
    const double a2 = a * a;
    const double p = b - 3.0 * a2 / 8.0;
    const double q = c - a * b / 2.0 + a2 * a / 8.0;
    const double r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;
    const double scale = std::max({1.0, std::abs(p), std::abs(q), std::abs(r)});

    std::vector<double> roots;
    if (std::abs(q) <= 1e-13 * scale) {
        // Biquadratic y^4 + p y^2 + r = 0.
        const auto y2 = solve_quadratic(p, r);
        for (double v : y2) {
            if (v < -1e-12 * scale) spectrum_error("complex eigenvalues (biquadratic)");
            const double y = std::sqrt(std::max(v, 0.0));
            roots.push_back(off + y);
            roots.push_back(off - y);
        }
        return roots;
    }
    // Ferrari: resolvent cubic z^3 - p z^2 - 4 r z + (4 p r - q^2) = 0,
    // pick a real root with z >= p so both factor quadratics are real.
    const auto zs = solve_cubic(-p, -4.0 * r, 4.0 * p * r - q * q);
    double z = zs[0];
    for (double v : zs) z = std::max(z, v);
    const double s2 = z - p;
    if (s2 < -1e-12 * scale) spectrum_error("complex eigenvalues (quartic)");
    const double s = std::sqrt(std::max(s2, 0.0));
    if (s == 0.0) spectrum_error("degenerate quartic resolvent");
    const double t = 0.5 * (z - q / s);
    const double u = 0.5 * (z + q / s);
    for (double root : solve_quadratic(-s, t)) roots.push_back(off + root);
    for (double root : solve_quadratic(s, u)) roots.push_back(off + root);
    return roots;
}

// Basis of the (near-)nullspace of a, by full-pivot elimination.
std::vector<std::vector<double>> nullspace(Mat a) {
    const std::size_t n = a.rows();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    const double tol = 1e-8 * std::max(scale, 1.0);

    std::vector<std::size_t> col_of_pivot;   // pivot column per elimination row
    std::vector<bool> col_used(n, false);
    std::vector<std::size_t> row_perm(n);
    for (std::size_t i = 0; i < n; ++i) row_perm[i] = i;

    std::size_t rank = 0;
    for (; rank < n; ++rank) {
        // Largest entry over unused rows/cols.
        double best = 0.0;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = rank; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (col_used[j]) continue;
                const double v = std::abs(a(row_perm[i], j));
                if (v > best) { best = v; bi = i; bj = j; }
            }
        if (best <= tol) break;
        std::swap(row_perm[rank], row_perm[bi]);
        col_used[bj] = true;
        col_of_pivot.push_back(bj);
        const std::size_t pr = row_perm[rank];
        for (std::size_t i = rank + 1; i < n; ++i) {
            const std::size_t ri = row_perm[i];
            const double f = a(ri, bj) / a(pr, bj);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) a(ri, j) -= f * a(pr, j);
            a(ri, bj) = 0.0;
        }
    }

    std::vector<std::vector<double>> basis;
    for (std::size_t fc = 0; fc < n; ++fc) {
        if (col_used[fc]) continue;
        std::vector<double> v(n, 0.0);
        v[fc] = 1.0;
        for (std::size_t k = rank; k-- > 0;) {
            const std::size_t ri = row_perm[k];
            const std::size_t pc = col_of_pivot[k];
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != pc) s += a(ri, j) * v[j];
            v[pc] = -s / a(ri, pc);
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
        for (double x : v) {
            if (std::abs(x) > 1e-8) {
                if (x < 0.0)
                    for (double& y : v) y = -y;
                break;
            }
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace

LinearHyperbolicSystem eigendecompose(const Mat& transport) {
    const std::size_t n = transport.rows();
    if (n == 0 || n != transport.cols() || n > 4)
        throw std::invalid_argument("eigendecompose: expected square matrix of dim 1..4");

    const auto c = characteristic_poly(transport);
    std::vector<double> roots;
    switch (n) {
        case 1: roots = {-c[0]}; break;
        case 2: roots = solve_quadratic(c[1], c[0]); break;
        case 3: roots = solve_cubic(c[2], c[1], c[0]); break;
        default: roots = solve_quartic(c[3], c[2], c[1], c[0]); break;
    }
    for (double& r : roots) {
        if (!std::isfinite(r)) spectrum_error("non-finite eigenvalue");
        newton_polish(c, r);
    }
    std::sort(roots.begin(), roots.end());

    double lam_scale = 1.0;
    for (double r : roots) lam_scale = std::max(lam_scale, std::abs(r));
    const double group_tol = 1e-8 * lam_scale;

    LinearHyperbolicSystem sys;
    sys.dim = static_cast<int>(n);
    sys.matrix = transport;
    sys.right = Mat(n, n);

    std::size_t col = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && roots[j] - roots[i] <= group_tol) ++j;
        const std::size_t mult = j - i;
        double lam = 0.0;
        for (std::size_t k = i; k < j; ++k) lam += roots[k];
        lam /= static_cast<double>(mult);

        Mat shifted = transport;
        for (std::size_t d = 0; d < n; ++d) shifted(d, d) -= lam;
        auto basis = nullspace(shifted);
        if (basis.size() < mult) spectrum_error("defective eigenspace");
        basis.resize(mult);
        std::sort(basis.begin(), basis.end());
        for (const auto& v : basis) {
            sys.lambda.push_back(lam);
            for (std::size_t d = 0; d < n; ++d) sys.right(d, col) = v[d];
            ++col;
        }
        i = j;
    }

    try {
        sys.left = inverse(sys.right);
    } catch (const std::exception&) {
        spectrum_error("defective eigenvector basis");
    }

    // Enforce the advertised invariants.
    double norm = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) norm = std::max(norm, std::abs(transport(i, j)));
    Mat recon(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += sys.right(i, k) * sys.lambda[k] * sys.left(k, j);
            recon(i, j) = s;
        }
    const Mat rl = sys.right * sys.left;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(recon(i, j) - transport(i, j)) > 1e-12 * norm)
                spectrum_error("reconstruction residual too large");
            const double id = (i == j) ? 1.0 : 0.0;
            if (std::abs(rl(i, j) - id) > 1e-12) spectrum_error("left/right basis not biorthonormal");
        }
    return sys;
}

void upwind_step(std::span<double> state, const LinearHyperbolicSystem& sys,
                 double dt, double dx, std::span<const double> left_ghost,
                 std::span<const double> right_ghost) {
    const int n = sys.dim;
    const std::size_t cells = state.size() / static_cast<std::size_t>(n);
    if (state.size() != cells * static_cast<std::size_t>(n) ||
        left_ghost.size() != static_cast<std::size_t>(n) ||
        right_ghost.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("upwind_step: size mismatch");
    const double max_speed = sys.max_abs_speed();
    if (dt * max_speed / dx > 1.0 + 1e-12)
        throw std::runtime_error("upwind_step: CFL violation");

    thread_local std::vector<double> w, flux;
    w.assign(static_cast<std::size_t>(n) * (cells + 2), 0.0);
    flux.assign(cells + 1, 0.0);

    // Characteristic variables, ghost cells at i=0 and i=cells+1.
    for (int k = 0; k < n; ++k) {
        double* wk = w.data() + static_cast<std::size_t>(k) * (cells + 2);
        double s = 0.0;
        for (int d = 0; d < n; ++d) s += sys.left(k, d) * left_ghost[d];
        wk[0] = s;
        s = 0.0;
        for (int d = 0; d < n; ++d) s += sys.left(k, d) * right_ghost[d];
        wk[cells + 1] = s;
        for (std::size_t i = 0; i < cells; ++i) {
            s = 0.0;
            for (int d = 0; d < n; ++d) s += sys.left(k, d) * state[i * n + d];
            wk[i + 1] = s;
        }
    }

    // Flux-form update applied as physical-variable increments
    // U += sum_k dw_k R_k, so constant regions stay bit-identical and cell
    // sums of each characteristic change only through the boundary fluxes.
    const double nu = dt / dx;
    for (int k = 0; k < n; ++k) {
        const double lam = sys.lambda[k];
        if (lam == 0.0) continue;
        double* wk = w.data() + static_cast<std::size_t>(k) * (cells + 2);
        if (lam > 0.0) {
            for (std::size_t f = 0; f <= cells; ++f) flux[f] = lam * wk[f];
        } else {
            for (std::size_t f = 0; f <= cells; ++f) flux[f] = lam * wk[f + 1];
        }
        for (std::size_t i = 0; i < cells; ++i) {
            const double dw = -nu * (flux[i + 1] - flux[i]);
            if (dw == 0.0) continue;
            for (int d = 0; d < n; ++d) state[i * n + d] += dw * sys.right(d, k);
        }
    }
}

double cfl_dt(const std::vector<const LinearHyperbolicSystem*>& systems,
              const std::vector<EdgeGrid>& grids,
              const std::vector<double>& parabolic_coeffs, double safety) {
    if (grids.empty()) throw std::invalid_argument("cfl_dt: no grids");
    if (systems.empty() && parabolic_coeffs.empty())
        throw std::invalid_argument("cfl_dt: no speed constraints");
    if (!(safety > 0.0) || safety > 1.0)
        throw std::invalid_argument("cfl_dt: safety must be in (0,1]");

    double max_speed = 0.0;
    for (const auto* s : systems) max_speed = std::max(max_speed, s->max_abs_speed());
    double max_diff = 0.0;
    for (double d : parabolic_coeffs) max_diff = std::max(max_diff, d);

    double dt = std::numeric_limits<double>::infinity();
    for (const auto& g : grids) {
        if (max_speed > 0.0) dt = std::min(dt, g.dx / max_speed);
        if (max_diff > 0.0) dt = std::min(dt, g.dx * g.dx / (2.0 * max_diff));
    }
    if (!std::isfinite(dt)) throw std::invalid_argument("cfl_dt: unconstrained time step");
    return safety * dt;
}

}  // namespace netkin
