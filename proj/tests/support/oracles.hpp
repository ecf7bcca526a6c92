#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they are used to check.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Dense Gaussian elimination with partial pivoting. Independent check for
/// the library's tridiagonal and 3x3 solvers.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(a[r][k]) > std::abs(a[pivot][k])) pivot = r;
    }
    if (a[pivot][k] == 0.0) throw std::runtime_error("dense_solve: singular matrix");
    std::swap(a[k], a[pivot]);
    std::swap(b[k], b[pivot]);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = a[r][k] / a[k][k];
      for (std::size_t c = k; c < n; ++c) a[r][c] -= f * a[k][c];
      b[r] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double acc = b[k];
    for (std::size_t c = k + 1; c < n; ++c) acc -= a[k][c] * x[c];
    x[k] = acc / a[k][k];
  }
  return x;
}

/// Dense solve of the chain-smoothing system assembled from first principles
/// (unary precisions on the diagonal plus the graph Laplacian).
inline std::vector<double> dense_smooth_solve(const std::vector<double>& gamma,
                                              const std::vector<double>& sigma,
                                              double w) {
  const std::size_t n = gamma.size();
  std::vector<std::vector<double>> h(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i][i] = 1.0 / (sigma[i] * sigma[i]);
    rhs[i] = gamma[i] / (sigma[i] * sigma[i]);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i][i] += 2.0 * w;
    h[i + 1][i + 1] += 2.0 * w;
    h[i][i + 1] -= 2.0 * w;
    h[i + 1][i] -= 2.0 * w;
  }
  return dense_solve(std::move(h), std::move(rhs));
}

/// Central finite difference of a scalar function.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// LDL^T pivots of a symmetric tridiagonal matrix; all positive iff the
/// matrix is positive definite.
inline std::vector<double> ldlt_pivots(const std::vector<double>& diag,
                                       const std::vector<double>& off) {
  std::vector<double> d(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    d[i] = diag[i];
    if (i > 0 && d[i - 1] != 0.0) d[i] -= off[i - 1] * off[i - 1] / d[i - 1];
  }
  return d;
}

/// Relative agreement check with an absolute floor for near-zero references.
inline bool close_rel(double got, double want, double rel, double floor = 1.0) {
  return std::abs(got - want) <= rel * std::max(std::abs(want), floor);
}

}  // namespace oracle
