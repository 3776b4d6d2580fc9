#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace kzlayout {

/// Column-major dense matrix, enough for the reference least-squares code.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

    std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
    std::span<const double> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

    DenseMatrix transposed() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t j = 0; j < cols_; ++j)
            for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
        return t;
    }

    std::vector<double> multiply(std::span<const double> x) const {
        std::vector<double> y(rows_, 0.0);
        for (std::size_t j = 0; j < cols_; ++j)
            for (std::size_t i = 0; i < rows_; ++i) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    std::vector<double> multiply_transposed(std::span<const double> y) const {
        std::vector<double> x(cols_, 0.0);
        for (std::size_t j = 0; j < cols_; ++j)
            for (std::size_t i = 0; i < rows_; ++i) x[j] += (*this)(i, j) * y[i];
        return x;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return std::sqrt(s);
}

/// Householder QR, optionally with column pivoting. The reflectors are
/// stored below the diagonal of `factors` (with an implicit unit leading
/// entry); R is the upper triangle.
struct HouseholderQR {
    DenseMatrix factors;
    std::vector<double> tau;
    std::vector<std::size_t> perm;  // column k of R corresponds to column perm[k] of A
    std::size_t rank = 0;

    /// b <- Q^T b
    void apply_qt(std::span<double> b) const {
        const std::size_t steps = tau.size();
        for (std::size_t k = 0; k < steps; ++k) {
            if (tau[k] == 0.0) continue;
            double dot = b[k];
            for (std::size_t i = k + 1; i < factors.rows(); ++i) dot += factors(i, k) * b[i];
            dot *= tau[k];
            b[k] -= dot;
            for (std::size_t i = k + 1; i < factors.rows(); ++i) b[i] -= dot * factors(i, k);
        }
    }
};

inline HouseholderQR householder_qr(DenseMatrix a, bool pivoting, double rank_rtol = 1e-11) {
    const std::size_t m = a.rows(), n = a.cols();
    const std::size_t steps = std::min(m, n);
    HouseholderQR qr;
    qr.tau.assign(steps, 0.0);
    qr.perm.resize(n);
    for (std::size_t j = 0; j < n; ++j) qr.perm[j] = j;

    double first_diag = 0.0;
    qr.rank = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        if (pivoting) {
            std::size_t best = k;
            double best_norm = -1.0;
            for (std::size_t j = k; j < n; ++j) {
                double s = 0.0;
                for (std::size_t i = k; i < m; ++i) s += a(i, j) * a(i, j);
                if (s > best_norm) best_norm = s, best = j;
            }
            if (best != k) {
                for (std::size_t i = 0; i < m; ++i) std::swap(a(i, k), a(i, best));
                std::swap(qr.perm[k], qr.perm[best]);
            }
        }

        double sigma = 0.0;
        for (std::size_t i = k; i < m; ++i) sigma += a(i, k) * a(i, k);
        const double xnorm = std::sqrt(sigma);
        if (k == 0) first_diag = xnorm;
        if (xnorm == 0.0 || xnorm <= rank_rtol * first_diag) {
            if (pivoting) break;  // remaining columns are numerically zero
            continue;
        }
        ++qr.rank;

        const double alpha = a(k, k) >= 0.0 ? -xnorm : xnorm;
        const double v0 = a(k, k) - alpha;
        for (std::size_t i = k + 1; i < m; ++i) a(i, k) /= v0;
        qr.tau[k] = -v0 / alpha;
        a(k, k) = alpha;

        for (std::size_t j = k + 1; j < n; ++j) {
            double dot = a(k, j);
            for (std::size_t i = k + 1; i < m; ++i) dot += a(i, k) * a(i, j);
            dot *= qr.tau[k];
            a(k, j) -= dot;
            for (std::size_t i = k + 1; i < m; ++i) a(i, j) -= dot * a(i, k);
        }
    }
    qr.factors = std::move(a);
    return qr;
}

/// Minimum-norm minimizer of ||A x - b||_2 via a complete orthogonal
/// decomposition (pivoted QR of A, then QR of the transposed trapezoid).
inline std::vector<double> least_squares_min_norm(const DenseMatrix& a, std::span<const double> b) {
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<double> x(n, 0.0);
    if (m == 0 || n == 0) return x;

    const auto qr = householder_qr(a, /*pivoting=*/true);
    const std::size_t r = qr.rank;
    if (r == 0) return x;

    std::vector<double> c(b.begin(), b.end());
    qr.apply_qt(c);

    std::vector<double> y(n, 0.0);
    if (r == n) {
        for (std::size_t k = n; k-- > 0;) {
            double s = c[k];
            for (std::size_t j = k + 1; j < n; ++j) s -= qr.factors(k, j) * y[j];
            y[k] = s / qr.factors(k, k);
        }
    } else {
        // [R11 R12]^T = Z [T; 0]; solve T^T w = c, then y = Z [w; 0].
        DenseMatrix trap_t(n, r);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = i; j < n; ++j) trap_t(j, i) = qr.factors(i, j);
        const auto zq = householder_qr(std::move(trap_t), /*pivoting=*/false);
        std::vector<double> w(n, 0.0);
        for (std::size_t k = 0; k < r; ++k) {
            double s = c[k];
            for (std::size_t i = 0; i < k; ++i) s -= zq.factors(i, k) * w[i];
            w[k] = s / zq.factors(k, k);
        }
        // y = Z w = H_0 H_1 ... H_{r-1} w
        for (std::size_t k = r; k-- > 0;) {
            if (zq.tau[k] == 0.0) continue;
            double dot = w[k];
            for (std::size_t i = k + 1; i < n; ++i) dot += zq.factors(i, k) * w[i];
            dot *= zq.tau[k];
            w[k] -= dot;
            for (std::size_t i = k + 1; i < n; ++i) w[i] -= dot * zq.factors(i, k);
        }
        y = std::move(w);
    }

    for (std::size_t k = 0; k < n; ++k) x[qr.perm[k]] = y[k];
    return x;
}

}  // namespace kzlayout
