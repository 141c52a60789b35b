#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace flowmap {

// Dense symmetric positive-definite helpers sized for trainer normal
// equations (a few hundred parameters). Matrices are row-major n x n.

/// In-place Cholesky factorization A = L L^T, lower triangle. Returns false
/// when a pivot is non-positive or non-finite (numerically indefinite).
inline bool cholesky_factor(std::vector<double>& a, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t m = 0; m < j; ++m) d -= a[j * n + m] * a[j * n + m];
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        a[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t m = 0; m < j; ++m) s -= a[i * n + m] * a[j * n + m];
            a[i * n + j] = s / ljj;
        }
    }
    return true;
}

/// Solve L L^T x = b in place given the factor from cholesky_factor.
inline void cholesky_solve(const std::vector<double>& l, std::size_t n, std::vector<double>& b) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t m = 0; m < i; ++m) s -= l[i * n + m] * b[m];
        b[i] = s / l[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t m = i + 1; m < n; ++m) s -= l[m * n + i] * b[m];
        b[i] = s / l[i * n + i];
    }
}

/// trace((L L^T)^-1) = sum of squared entries of L^-1, column by column.
inline double cholesky_inverse_trace(const std::vector<double>& l, std::size_t n) {
    std::vector<double> y(n);
    double trace = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        y[c] = 1.0 / l[c * n + c];
        for (std::size_t i = c + 1; i < n; ++i) {
            double s = 0.0;
            for (std::size_t m = c; m < i; ++m) s -= l[i * n + m] * y[m];
            y[i] = s / l[i * n + i];
        }
        for (std::size_t i = c; i < n; ++i) trace += y[i] * y[i];
    }
    return trace;
}

} // namespace flowmap
