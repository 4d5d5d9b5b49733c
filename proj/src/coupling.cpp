#include "netkin/coupling.hpp"

#include <cmath>
#include <stdexcept>

namespace netkin {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("coupling: " + msg); }

Mat eye_minus(const Mat& a, double sign) {
    const std::size_t n = a.rows();
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = (i == j ? 1.0 : 0.0) + sign * a(i, j);
    return m;
}

}  // namespace

void CouplingMatrix::validate() const {
    const int n = order();
    if (n < 2) fail("coupling matrix needs order >= 2");
    if (a.cols() != a.rows()) fail("coupling matrix must be square");
    const double tol = 1e-12;
    for (int j = 0; j < n; ++j) {
        double col = 0.0, row = 0.0;
        for (int i = 0; i < n; ++i) {
            if (a(i, j) < -tol) fail("coupling matrix entries must be nonnegative");
            col += a(i, j);
            row += a(j, i);
        }
        if (std::abs(col - 1.0) > 1e-12) fail("coupling matrix columns must sum to 1");
        if (std::abs(row - 1.0) > 1e-12) fail("coupling matrix rows must sum to 1");
        if (std::abs(a(j, j)) > tol) fail("coupling matrix diagonal must be zero");
    }
}

CouplingMatrix kinetic_coupling_matrix(int degree) {
    if (degree < 2) throw std::invalid_argument("kinetic_coupling_matrix: degree must be >= 2");
    CouplingMatrix cm;
    cm.a = Mat(degree, degree);
    const double off = 1.0 / (degree - 1);
    for (int i = 0; i < degree; ++i)
        for (int j = 0; j < degree; ++j) cm.a(i, j) = (i == j) ? 0.0 : off;
    cm.validate();
    return cm;
}

// ---------------------------------------------------------------------------
// Generic characteristic solve
// ---------------------------------------------------------------------------

CharacteristicNodeSolver::CharacteristicNodeSolver(const LinearHyperbolicSystem& sys,
                                                   NodeConditions conds, int degree)
    : sys_(sys), conds_(std::move(conds)), degree_(degree) {
    for (int k = 0; k < sys_.dim; ++k) {
        if (sys_.lambda[k] > 0.0)
            pos_.push_back(k);
        else if (sys_.lambda[k] < 0.0)
            neg_.push_back(k);
        else
            fail("node solve requires nonzero wave speeds (phi > 0)");
    }
    const std::size_t unknowns = pos_.size() * static_cast<std::size_t>(degree_);
    if (conds_.coeff.rows() != unknowns || conds_.rhs.size() != unknowns)
        fail("node condition count must match ingoing characteristics");
    if (conds_.coeff.cols() != static_cast<std::size_t>(degree_) * sys_.dim)
        fail("node condition width must match stacked states");

    Mat g(unknowns, unknowns);
    for (std::size_t row = 0; row < unknowns; ++row)
        for (int i = 0; i < degree_; ++i)
            for (std::size_t p = 0; p < pos_.size(); ++p) {
                double s = 0.0;
                for (int d = 0; d < sys_.dim; ++d)
                    s += conds_.coeff(row, static_cast<std::size_t>(i) * sys_.dim + d) *
                         sys_.right(d, pos_[p]);
                g(row, static_cast<std::size_t>(i) * pos_.size() + p) = s;
            }
    // Equilibrate rows so conditions of very different scale (for example
    // the 1/(sqrt(3) eps) transmission rows) pivot cleanly.
    row_scale_.assign(unknowns, 1.0);
    for (std::size_t row = 0; row < unknowns; ++row) {
        double m = 0.0;
        for (std::size_t col = 0; col < unknowns; ++col) m = std::max(m, std::abs(g(row, col)));
        if (m > 0.0) {
            row_scale_[row] = 1.0 / m;
            for (std::size_t col = 0; col < unknowns; ++col) g(row, col) *= row_scale_[row];
        }
    }
    lu_ = LuFactor(std::move(g));  // throws on singular conditions
}

std::vector<std::vector<double>> CharacteristicNodeSolver::solve(
    const std::vector<std::vector<double>>& traces) const {
    const int n = sys_.dim;
    if (static_cast<int>(traces.size()) != degree_) fail("trace count mismatch");

    // Outgoing-wave (negative speed) content of each trace.
    std::vector<std::vector<double>> incoming(degree_, std::vector<double>(n, 0.0));
    for (int i = 0; i < degree_; ++i) {
        if (static_cast<int>(traces[i].size()) != n) fail("trace dimension mismatch");
        for (int k : neg_) {
            double w = 0.0;
            for (int d = 0; d < n; ++d) w += sys_.left(k, d) * traces[i][d];
            for (int d = 0; d < n; ++d) incoming[i][d] += w * sys_.right(d, k);
        }
    }

    const std::size_t unknowns = pos_.size() * static_cast<std::size_t>(degree_);
    std::vector<double> b(unknowns);
    for (std::size_t row = 0; row < unknowns; ++row) {
        double s = conds_.rhs[row];
        for (int i = 0; i < degree_; ++i)
            for (int d = 0; d < n; ++d)
                s -= conds_.coeff(row, static_cast<std::size_t>(i) * n + d) * incoming[i][d];
        b[row] = s * row_scale_[row];
    }
    const auto sigma = lu_.solve(b);

    auto out = incoming;
    for (int i = 0; i < degree_; ++i)
        for (std::size_t p = 0; p < pos_.size(); ++p) {
            const double s = sigma[static_cast<std::size_t>(i) * pos_.size() + p];
            for (int d = 0; d < n; ++d) out[i][d] += s * sys_.right(d, pos_[p]);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Condition builders
// ---------------------------------------------------------------------------

NodeConditions cattaneo_conditions(const CouplingMatrix& A, double eps, CattaneoVariant variant,
                                   const Mat* alpha_ij, bool precondition) {
    A.validate();
    const int n = A.order();
    NodeConditions c;
    c.coeff = Mat(n, static_cast<std::size_t>(2) * n);
    c.rhs.assign(n, 0.0);

    switch (variant) {
        case CattaneoVariant::KineticDerived: {
            LimitPair pair = cattaneo_condition_pair(n);
            if (precondition) pair = epsilon_limit_transform(pair);
            const Mat rows = pair.evaluate(eps);
            for (int r = 0; r < n; ++r)
                for (int j = 0; j < n; ++j) {
                    c.coeff(r, 2 * j) = rows(r, j);
                    c.coeff(r, 2 * j + 1) = rows(r, n + j);
                }
            break;
        }
        case CattaneoVariant::AlphaTransmission: {
            if (alpha_ij == nullptr) fail("AlphaTransmission needs parameters alpha_ij");
            if (alpha_ij->rows() != static_cast<std::size_t>(n) ||
                alpha_ij->cols() != static_cast<std::size_t>(n))
                fail("alpha_ij must be N x N");
            for (int i = 0; i < n; ++i) {
                double balance = 0.0;
                for (int j = 0; j < n; ++j) {
                    if ((*alpha_ij)(i, j) < 0.0) fail("alpha_ij must be nonnegative");
                    balance += (*alpha_ij)(i, j) - (*alpha_ij)(j, i);
                }
                if (std::abs(balance) > 1e-10) fail("alpha_ij must satisfy sum_i (a_ij - a_ji) = 0");
            }
            const double s = 1.0 / (std::sqrt(3.0) * eps);
            for (int i = 0; i < n; ++i) {
                c.coeff(i, 2 * i + 1) = s;
                double diag = 0.0;
                for (int j = 0; j < n; ++j) {
                    if (j == i) continue;
                    c.coeff(i, 2 * j) = -(*alpha_ij)(i, j);
                    diag += (*alpha_ij)(i, j);
                }
                c.coeff(i, 2 * i) = diag;
            }
            break;
        }
        case CattaneoVariant::DensityContinuity: {
            for (int r = 0; r + 1 < n; ++r) {
                c.coeff(r, 2 * r) = 1.0;
                c.coeff(r, 2 * (r + 1)) = -1.0;
            }
            for (int j = 0; j < n; ++j) c.coeff(n - 1, 2 * j + 1) = 1.0;
            break;
        }
    }
    return c;
}

NodeConditions halfmoment_conditions(const CouplingMatrix& A, double eps, bool precondition) {
    A.validate();
    const int n = A.order();
    auto [pr, pq] = halfmoment_condition_pairs(n);
    if (precondition) {
        pr = epsilon_limit_transform(pr);
        pq = epsilon_limit_transform(pq);
    }
    const Mat rows_r = pr.evaluate(eps);   // over [rho; rho_hat]
    const Mat rows_q = pq.evaluate(eps);   // over [q_hat; q]

    NodeConditions c;
    c.coeff = Mat(static_cast<std::size_t>(2) * n, static_cast<std::size_t>(4) * n);
    c.rhs.assign(static_cast<std::size_t>(2) * n, 0.0);
    // State layout per edge: (rho, q, rho_hat, q_hat).
    for (int r = 0; r < n; ++r)
        for (int j = 0; j < n; ++j) {
            c.coeff(r, 4 * j + 0) = rows_r(r, j);
            c.coeff(r, 4 * j + 2) = rows_r(r, n + j);
            c.coeff(n + r, 4 * j + 3) = rows_q(r, j);
            c.coeff(n + r, 4 * j + 1) = rows_q(r, n + j);
        }
    return c;
}

// ---------------------------------------------------------------------------
// Kinetic node solve
// ---------------------------------------------------------------------------

KineticNodeSolver::KineticNodeSolver(const CouplingMatrix& A, double eps, double phi,
                                     bool precondition)
    : degree_(A.order()), precondition_(precondition), a_(A.a) {
    A.validate();
    if (!(eps > 0.0) || !(phi > 0.0)) fail("kinetic node solve needs eps > 0 and phi > 0");
    sqrt_phi_ = std::sqrt(phi);
    c_plus_ = 0.5 / sqrt_phi_ + 0.5 * eps;
    c_minus_ = 0.5 / sqrt_phi_ - 0.5 * eps;
    // |c_minus| < c_plus, so the system below is strictly diagonally dominant.
    Mat g(degree_, degree_);
    for (int i = 0; i < degree_; ++i)
        for (int j = 0; j < degree_; ++j)
            g(i, j) = (i == j ? c_plus_ : 0.0) - c_minus_ * a_(i, j);
    if (precondition_) {
        // Summing all rows gives eps (sum w+ + sum w-) = 0; dividing by eps
        // turns the last row into the exact mass balance.
        for (int j = 0; j < degree_; ++j) g(degree_ - 1, j) = 1.0;
    }
    lu_ = LuFactor(std::move(g));
}

void KineticNodeSolver::solve(std::span<const double> r_trace, std::span<const double> j_trace,
                              std::span<double> r_out, std::span<double> j_out) const {
    const int n = degree_;
    thread_local std::vector<double> wm, rhs;
    wm.assign(n, 0.0);
    rhs.assign(n, 0.0);
    for (int i = 0; i < n; ++i) wm[i] = j_trace[i] - sqrt_phi_ * r_trace[i];
    for (int i = 0; i < n; ++i) {
        double aw = 0.0;
        for (int j = 0; j < n; ++j) aw += a_(i, j) * wm[j];
        rhs[i] = c_minus_ * wm[i] - c_plus_ * aw;
    }
    if (precondition_) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += wm[i];
        rhs[n - 1] = -s;
    }
    const auto wp = lu_.solve(rhs);
    const double inv2s = 0.5 / sqrt_phi_;
    for (int i = 0; i < n; ++i) {
        r_out[i] = (wp[i] - wm[i]) * inv2s;
        j_out[i] = 0.5 * (wp[i] + wm[i]);
    }
}

// ---------------------------------------------------------------------------
// Parabolic node solves
// ---------------------------------------------------------------------------

ScalarNodeSolution solve_node_keller_segel(std::span<const double> first_cell_rho,
                                           std::span<const double> mbar_node,
                                           std::span<const double> dx, double lambda,
                                           double alpha) {
    const std::size_t n = first_cell_rho.size();
    if (n == 0 || mbar_node.size() != n || dx.size() != n)
        fail("keller-segel node solve: size mismatch");
    const double diff = 1.0 / (3.0 * lambda);
    const double drift = alpha / (3.0 * lambda);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = diff / (0.5 * dx[i]);
        const double d = drift * mbar_node[i];
        num += (c - 0.5 * d) * first_cell_rho[i];
        den += c + 0.5 * d;
    }
    if (!(den > 0.0)) fail("keller-segel node solve: degenerate conductance");
    ScalarNodeSolution sol;
    sol.value = num / den;
    sol.fluxes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = diff / (0.5 * dx[i]);
        const double d = drift * mbar_node[i];
        sol.fluxes[i] = -c * (first_cell_rho[i] - sol.value) +
                        d * 0.5 * (sol.value + first_cell_rho[i]);
    }
    return sol;
}

ScalarNodeSolution solve_node_chemo(std::span<const double> first_cell_m,
                                    std::span<const double> dx, double D) {
    const std::size_t n = first_cell_m.size();
    if (n == 0 || dx.size() != n) fail("chemo node solve: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = 1.0 / (0.5 * dx[i]);
        num += c * first_cell_m[i];
        den += c;
    }
    ScalarNodeSolution sol;
    sol.value = num / den;
    sol.fluxes.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        sol.fluxes[i] = D * (sol.value - first_cell_m[i]) / (0.5 * dx[i]);
    return sol;
}

// ---------------------------------------------------------------------------
// eps -> 0 limit transformation
// ---------------------------------------------------------------------------

Mat LimitPair::evaluate(double eps) const {
    const std::size_t n = p0x.rows();
    Mat rows(n, 2 * p0x.cols());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p0x.cols(); ++j) {
            rows(i, j) = p0x(i, j) + eps * p1x(i, j);
            rows(i, p0x.cols() + j) = p0y(i, j) + eps * p1y(i, j);
        }
    return rows;
}

Mat limit_T(int n) {
    Mat t = Mat::identity(n);
    for (int j = 0; j < n; ++j) t(n - 1, j) = 1.0;
    return t;
}

LimitPair cattaneo_condition_pair(int degree) {
    const auto A = kinetic_coupling_matrix(degree);
    LimitPair p;
    p.p0x = eye_minus(A.a, -1.0);  // (I - A) rho
    p.p1x = Mat(degree, degree);
    p.p0y = Mat(degree, degree);
    p.p1y = eye_minus(A.a, +1.0);  // eps (3/2)(I + A) q
    for (int i = 0; i < degree; ++i)
        for (int j = 0; j < degree; ++j) p.p1y(i, j) *= 1.5;
    return p;
}

std::pair<LimitPair, LimitPair> halfmoment_condition_pairs(int degree) {
    const auto A = kinetic_coupling_matrix(degree);
    LimitPair pr;
    pr.p0x = eye_minus(A.a, -1.0);  // (I - A) rho
    pr.p1x = Mat(degree, degree);
    pr.p0y = Mat(degree, degree);
    pr.p1y = eye_minus(A.a, +1.0);  // eps (I + A) rho_hat
    LimitPair pq = pr;              // same structure on (q_hat, q)
    return {pr, pq};
}

LimitPair epsilon_limit_transform(const LimitPair& in) {
    const int n = static_cast<int>(in.p0x.rows());
    const Mat t = limit_T(n);
    LimitPair out;
    out.p0x = t * in.p0x;
    out.p1x = t * in.p1x;
    out.p0y = t * in.p0y;
    out.p1y = t * in.p1y;
    for (int j = 0; j < n; ++j)
        if (std::abs(out.p0x(n - 1, j)) > 1e-12 || std::abs(out.p0y(n - 1, j)) > 1e-12)
            fail("limit transform expects vanishing eps^0 column sums");
    // The transformed last row of the eps^0 parts is a zero linear
    // combination (column sums vanish); zero it exactly, then divide the
    // row by eps, turning its eps^1 parts into eps^0 parts.
    for (int j = 0; j < n; ++j) {
        out.p0x(n - 1, j) = out.p1x(n - 1, j);
        out.p1x(n - 1, j) = 0.0;
        out.p0y(n - 1, j) = out.p1y(n - 1, j);
        out.p1y(n - 1, j) = 0.0;
    }
    return out;
}

Mat epsilon_limit_check(const LimitPair& conditions, double eps) {
    return epsilon_limit_transform(conditions).evaluate(eps);
}

}  // namespace netkin
