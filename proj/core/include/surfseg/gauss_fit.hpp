#pragma once

#include <span>
#include <vector>

#include "surfseg/grid.hpp"

namespace surfseg {

/// Coefficients of the log-density quadratic a + b*j + c*j^2 in 0-based row
/// coordinates. A valid Gaussian requires c < 0 (sigma^2 = -1/(2c)).
struct LogQuadraticFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Outcome of fitting one column.
struct FitReport {
  double gamma = 0.0;
  double sigma = 0.0;
  bool fallback_used = false;
  double weighted_residual = 0.0;
};

struct FitOptions {
  /// Samples below tau * max(f) are excluded before taking logarithms.
  double tau = 1e-3;
  /// Fits with c >= -c_min are declared non-Gaussian and routed to fallback.
  double c_min = 1e-12;
  /// Relative pivot threshold for the 3x3 normal-equation solve.
  double pivot_tol = 1e-12;
  /// Fallback sigma as a fraction of the column length.
  double sigma_rel_fallback = 0.1;
};

/// Fits a continuous Gaussian to one column of a probability map by weighted
/// least squares on the log-density: minimizes
///   eps = sum_j f(j)^2 (ln f(j) - (a + b j + c j^2))^2
/// over the samples with f(j) >= tau * max(f). The normal equations are
/// solved by elimination with partial pivoting in a shifted/scaled abscissa
/// (same solution, stable for long columns). gamma = -b/(2c),
/// sigma = sqrt(-1/(2c)); gamma is clamped to [-0.5, n_rows - 0.5].
///
/// Falls back to gamma = argmax, sigma = sigma_rel_fallback * n_rows when the
/// fit is non-Gaussian (c >= -c_min), fewer than 3 samples survive the
/// cutoff, or the normal equations are numerically singular.
FitReport fit_column(std::span<const double> f, const FitOptions& opts = {},
                     LogQuadraticFit* coeffs = nullptr);

/// Gradient of a scalar loss w.r.t. the column samples, given the gradients
/// w.r.t. the fitted (gamma, sigma). Differentiates the closed-form
/// normal-equation solution; fallback or clamped fits contribute zero.
std::vector<double> fit_column_backward(std::span<const double> f,
                                        double d_gamma, double d_sigma,
                                        const FitOptions& opts = {});

struct FieldFitResult {
  GaussianField field;
  std::vector<FitReport> reports;
  /// Column-normalized map actually fed to the per-column fits.
  Grid2 normalized;

  std::vector<int> fallback_flags() const {
    std::vector<int> flags(reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i) {
      flags[i] = reports[i].fallback_used ? 1 : 0;
    }
    return flags;
  }
};

/// Column-normalizes the map and fits every column independently. Columns
/// that cannot be normalized (constant) or fitted use the fallback path and
/// are flagged; the call never aborts on a per-column failure.
FieldFitResult fit_field(const Grid2& p, const FitOptions& opts = {});

/// Chains per-column (d_gamma, d_sigma) back through the fits and the
/// column normalization, producing the gradient w.r.t. the raw map.
Grid2 fit_field_backward(const Grid2& p, const FieldFitResult& fit,
                         std::span<const double> d_gamma,
                         std::span<const double> d_sigma,
                         const FitOptions& opts = {});

}  // namespace surfseg
