#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace netkin {

/// Small dense row-major matrix. Everything in this library is at most
/// (2 * node degree) square, so no effort is spent on anything beyond
/// plain loops and partial-pivot LU.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<double>& data() const { return a_; }

    Mat operator*(const Mat& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("Mat: dimension mismatch");
        Mat r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const double aik = (*this)(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += aik * o(k, j);
            }
        return r;
    }

    std::vector<double> operator*(const std::vector<double>& x) const {
        if (cols_ != x.size()) throw std::invalid_argument("Mat: dimension mismatch");
        std::vector<double> y(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

/// Partial-pivot LU factorization of a square matrix; throws on (numerical)
/// singularity. Factors once, backsolves many times.
class LuFactor {
public:
    LuFactor() = default;
    explicit LuFactor(Mat m);

    std::size_t size() const { return n_; }
    /// Solve A x = b.
    std::vector<double> solve(const std::vector<double>& b) const;

private:
    std::size_t n_ = 0;
    Mat lu_;
    std::vector<std::size_t> perm_;
};

/// Convenience one-shot solve.
std::vector<double> lu_solve(const Mat& a, const std::vector<double>& b);

/// Dense inverse via LU; throws on singular input.
Mat inverse(const Mat& a);

inline LuFactor::LuFactor(Mat m) : n_(m.rows()), lu_(std::move(m)), perm_(n_) {
    if (lu_.rows() != lu_.cols()) throw std::invalid_argument("LuFactor: matrix not square");
    for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n_; ++k) {
        std::size_t p = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t i = k + 1; i < n_; ++i) {
            const double v = std::abs(lu_(i, k));
            if (v > best) { best = v; p = i; }
        }
        if (best == 0.0) throw std::runtime_error("LuFactor: singular matrix");
        if (p != k) {
            for (std::size_t j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(p, j));
            std::swap(perm_[k], perm_[p]);
        }
        for (std::size_t i = k + 1; i < n_; ++i) {
            const double f = lu_(i, k) / lu_(k, k);
            lu_(i, k) = f;
            for (std::size_t j = k + 1; j < n_; ++j) lu_(i, j) -= f * lu_(k, j);
        }
    }
}

inline std::vector<double> LuFactor::solve(const std::vector<double>& b) const {
    if (b.size() != n_) throw std::invalid_argument("LuFactor: rhs size mismatch");
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 1; i < n_; ++i) {
        double s = x[i];
        for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t i = n_; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n_; ++j) s -= lu_(i, j) * x[j];
        x[i] = s / lu_(i, i);
    }
    return x;
}

inline std::vector<double> lu_solve(const Mat& a, const std::vector<double>& b) {
    return LuFactor(a).solve(b);
}

inline Mat inverse(const Mat& a) {
    const std::size_t n = a.rows();
    LuFactor lu(a);
    Mat inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const auto col = lu.solve(e);
        e[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

}  // namespace netkin
