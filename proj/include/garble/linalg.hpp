#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "garble/errors.hpp"

namespace garble {

using Vector = std::vector<double>;

// Row-major dense matrix. Sizes here are tiny (K regressors, K <= ~21), so
// nothing is blocked or optimized; clarity wins.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    bool operator==(const Matrix& other) const = default;
};

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionError(a.size(), b.size(), "vector length");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline bool is_symmetric(const Matrix& a, double tol = 1e-10) {
    if (a.rows != a.cols) return false;
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = i + 1; j < a.cols; ++j)
            if (std::abs(a(i, j) - a(j, i)) > tol) return false;
    return true;
}

// Cholesky factorization A = L L^T for symmetric positive SEMI-definite A.
// Zero pivots (within `tol` relative to the largest diagonal) produce a zero
// column, so degenerate covariances (e.g. a zero-variance coordinate) factor
// cleanly. A pivot below -tol, or a nonzero column under a zero pivot, throws
// FactorizationError naming the column.
inline Matrix cholesky_psd(const Matrix& a, double tol = 1e-10) {
    if (a.rows != a.cols) throw DimensionError(a.rows, a.cols, "square matrix side");
    if (!is_symmetric(a, tol)) throw FactorizationError(0, "matrix is not symmetric");
    const std::size_t n = a.rows;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i)));
    if (scale == 0.0) scale = 1.0;
    const double cutoff = tol * scale;

    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d < -cutoff) throw FactorizationError(j, "negative pivot (matrix is not positive semi-definite)");
        if (d <= cutoff) {
            // Semi-definite direction: the rest of the column must vanish too.
            for (std::size_t i = j + 1; i < n; ++i) {
                double v = a(i, j);
                for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
                if (std::abs(v) > std::sqrt(cutoff) * std::sqrt(scale))
                    throw FactorizationError(j, "zero pivot with nonzero column (matrix is not positive semi-definite)");
                l(i, j) = 0.0;
            }
            l(j, j) = 0.0;
            continue;
        }
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / l(j, j);
        }
    }
    return l;
}

// Solves A x = b for symmetric positive definite A via Cholesky. Strictly
// positive pivots required; a (near-)zero pivot at column j throws
// FactorizationError(j).
inline Vector solve_spd(const Matrix& a, const Vector& b, double tol = 1e-12) {
    if (a.rows != b.size()) throw DimensionError(a.rows, b.size(), "rhs length");
    const std::size_t n = a.rows;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i)));
    if (scale == 0.0) scale = 1.0;

    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= tol * scale) throw FactorizationError(j, "non-positive pivot");
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / l(j, j);
        }
    }
    // Forward then back substitution.
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * y[k];
        y[i] = v / l(i, i);
    }
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double v = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) v -= l(k, ii) * x[k];
        x[ii] = v / l(ii, ii);
    }
    return x;
}

// x^T A x for symmetric A.
inline double quadratic_form(const Vector& x, const Matrix& a) {
    if (a.rows != x.size() || a.cols != x.size())
        throw DimensionError(x.size(), a.rows, "quadratic form side");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) s += x[i] * a(i, j) * x[j];
    return s;
}

}  // namespace garble
