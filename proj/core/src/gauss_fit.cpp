#include "surfseg/gauss_fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace surfseg {

namespace {

/// Neumaier-compensated accumulator; fixed-order and accurate to a few ulps
/// independent of the number of terms.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

/// Gaussian elimination with partial pivoting on a 3x3 system. Returns false
/// when a pivot falls below tol relative to the largest input entry.
bool solve3x3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> v,
              std::array<double, 3>& out, double tol) {
  double scale = 0.0;
  for (const auto& row : m) {
    for (double e : row) scale = std::max(scale, std::abs(e));
  }
  if (scale == 0.0) return false;

  std::array<int, 3> perm = {0, 1, 2};
  for (int k = 0; k < 3; ++k) {
    int pivot = k;
    for (int r = k + 1; r < 3; ++r) {
      if (std::abs(m[perm[r]][k]) > std::abs(m[perm[pivot]][k])) pivot = r;
    }
    std::swap(perm[k], perm[pivot]);
    double p = m[perm[k]][k];
    if (std::abs(p) < tol * scale) return false;
    for (int r = k + 1; r < 3; ++r) {
      double factor = m[perm[r]][k] / p;
      for (int c = k; c < 3; ++c) m[perm[r]][c] -= factor * m[perm[k]][c];
      v[perm[r]] -= factor * v[perm[k]];
    }
  }
  for (int k = 2; k >= 0; --k) {
    double acc = v[perm[k]];
    for (int c = k + 1; c < 3; ++c) acc -= m[perm[k]][c] * out[c];
    out[k] = acc / m[perm[k]][k];
  }
  return true;
}

int argmax_index(std::span<const double> f) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(f.size()); ++j) {
    if (f[j] > f[best]) best = j;
  }
  return best;
}

struct ColumnFit {
  bool ok = false;          // normal-equation solve produced a usable Gaussian
  bool clamped = false;     // gamma hit the coordinate bounds
  int center = 0;           // shift applied to the abscissa (argmax row)
  double scale = 1.0;       // abscissa scale
  std::array<double, 3> theta{};  // coefficients in the shifted/scaled basis
  std::vector<int> retained;
  std::vector<double> log_f;      // ln f over retained samples
  double gamma = 0.0;
  double sigma = 0.0;
  double residual = 0.0;
};

/// Shared forward pass. The shifted/scaled abscissa t = (j - center)/scale
/// leaves the minimizer unchanged but keeps the moment matrix well
/// conditioned for columns of any length.
ColumnFit fit_core(std::span<const double> f, const FitOptions& opts) {
  ColumnFit fit;
  const int n = static_cast<int>(f.size());
  if (n == 0) return fit;

  fit.center = argmax_index(f);
  const double fmax = f[fit.center];
  if (!(fmax > 0.0) || !std::isfinite(fmax)) return fit;

  const double cutoff = opts.tau * fmax;
  for (int j = 0; j < n; ++j) {
    if (f[j] >= cutoff && f[j] > 0.0) fit.retained.push_back(j);
  }
  if (static_cast<int>(fit.retained.size()) < 3) return fit;

  double umax = 1.0;
  for (int j : fit.retained) {
    umax = std::max(umax, std::abs(static_cast<double>(j - fit.center)));
  }
  fit.scale = umax;

  CompensatedSum m00, m01, m02, m03, m04, v0, v1, v2;
  fit.log_f.reserve(fit.retained.size());
  for (int j : fit.retained) {
    const double t = (j - fit.center) / fit.scale;
    const double w = f[j] * f[j];
    const double lf = std::log(f[j]);
    fit.log_f.push_back(lf);
    const double t2 = t * t;
    m00.add(w);
    m01.add(w * t);
    m02.add(w * t2);
    m03.add(w * t2 * t);
    m04.add(w * t2 * t2);
    v0.add(w * lf);
    v1.add(w * t * lf);
    v2.add(w * t2 * lf);
  }

  std::array<std::array<double, 3>, 3> m = {{
      {m00.value(), m01.value(), m02.value()},
      {m01.value(), m02.value(), m03.value()},
      {m02.value(), m03.value(), m04.value()},
  }};
  std::array<double, 3> v = {v0.value(), v1.value(), v2.value()};
  if (!solve3x3(m, v, fit.theta, opts.pivot_tol)) return fit;

  // c in row units; the validity threshold applies there.
  const double c_row = fit.theta[2] / (fit.scale * fit.scale);
  if (!(c_row < -opts.c_min)) return fit;

  const double g_scaled = -fit.theta[1] / (2.0 * fit.theta[2]);
  fit.gamma = fit.center + fit.scale * g_scaled;
  fit.sigma = std::sqrt(-1.0 / (2.0 * c_row));
  if (!std::isfinite(fit.gamma) || !std::isfinite(fit.sigma)) return fit;

  const double lo = -0.5;
  const double hi = n - 0.5;
  if (fit.gamma < lo || fit.gamma > hi) {
    fit.gamma = std::clamp(fit.gamma, lo, hi);
    fit.clamped = true;
  }

  CompensatedSum res;
  for (std::size_t k = 0; k < fit.retained.size(); ++k) {
    const int j = fit.retained[k];
    const double t = (j - fit.center) / fit.scale;
    const double q = fit.theta[0] + t * (fit.theta[1] + t * fit.theta[2]);
    const double r = fit.log_f[k] - q;
    res.add(f[j] * f[j] * r * r);
  }
  fit.residual = std::max(0.0, res.value());
  fit.ok = true;
  return fit;
}

FitReport fallback_report(std::span<const double> f, const FitOptions& opts) {
  FitReport rep;
  rep.fallback_used = true;
  rep.gamma = f.empty() ? 0.0 : argmax_index(f);
  rep.sigma = opts.sigma_rel_fallback * static_cast<double>(f.size());
  rep.weighted_residual = 0.0;
  return rep;
}

}  // namespace

FitReport fit_column(std::span<const double> f, const FitOptions& opts,
                     LogQuadraticFit* coeffs) {
  ColumnFit fit = fit_core(f, opts);
  if (!fit.ok) {
    if (coeffs) *coeffs = {};
    return fallback_report(f, opts);
  }
  if (coeffs) {
    // Map the shifted/scaled coefficients back to the raw row basis.
    const double s = fit.scale;
    const double m = fit.center;
    coeffs->c = fit.theta[2] / (s * s);
    coeffs->b = fit.theta[1] / s - 2.0 * fit.theta[2] * m / (s * s);
    coeffs->a = fit.theta[0] - fit.theta[1] * m / s + fit.theta[2] * m * m / (s * s);
  }
  FitReport rep;
  rep.gamma = fit.gamma;
  rep.sigma = fit.sigma;
  rep.fallback_used = false;
  rep.weighted_residual = fit.residual;
  return rep;
}

std::vector<double> fit_column_backward(std::span<const double> f,
                                        double d_gamma, double d_sigma,
                                        const FitOptions& opts) {
  std::vector<double> grad(f.size(), 0.0);
  ColumnFit fit = fit_core(f, opts);
  if (!fit.ok) return grad;
  if (fit.clamped) d_gamma = 0.0;  // gamma pinned at the bound
  if (d_gamma == 0.0 && d_sigma == 0.0) return grad;

  const double s = fit.scale;
  const double b = fit.theta[1];
  const double c = fit.theta[2];
  const double sigma_scaled = std::sqrt(-1.0 / (2.0 * c));
  const double var_scaled = sigma_scaled * sigma_scaled;
  const double g_scaled = -b / (2.0 * c);

  // d(gamma, sigma) / d(theta') in the scaled basis:
  //   gamma = center + s * (-b'/(2c'))   sigma = s * (-2c')^(-1/2)
  std::array<double, 3> g_theta = {
      0.0,
      d_gamma * s * var_scaled,
      d_gamma * s * 2.0 * g_scaled * var_scaled + d_sigma * s * var_scaled * sigma_scaled,
  };

  // Adjoint of theta' = M'^-1 v' : lambda = M'^-1 g_theta (M' symmetric).
  CompensatedSum m00, m01, m02, m03, m04;
  for (std::size_t k = 0; k < fit.retained.size(); ++k) {
    const int j = fit.retained[k];
    const double t = (j - fit.center) / s;
    const double w = f[j] * f[j];
    const double t2 = t * t;
    m00.add(w);
    m01.add(w * t);
    m02.add(w * t2);
    m03.add(w * t2 * t);
    m04.add(w * t2 * t2);
  }
  std::array<std::array<double, 3>, 3> m = {{
      {m00.value(), m01.value(), m02.value()},
      {m01.value(), m02.value(), m03.value()},
      {m02.value(), m03.value(), m04.value()},
  }};
  std::array<double, 3> lambda{};
  if (!solve3x3(m, g_theta, lambda, opts.pivot_tol)) return grad;

  // dL/df_j = (lambda . phi_j) * f_j * (2 ln f_j + 1 - 2 q_j) over retained
  // samples, from differentiating both M' and v' w.r.t. f_j.
  for (std::size_t k = 0; k < fit.retained.size(); ++k) {
    const int j = fit.retained[k];
    const double t = (j - fit.center) / s;
    const double q = fit.theta[0] + t * (fit.theta[1] + t * fit.theta[2]);
    const double lam_phi = lambda[0] + t * (lambda[1] + t * lambda[2]);
    grad[static_cast<std::size_t>(j)] =
        lam_phi * f[j] * (2.0 * fit.log_f[k] + 1.0 - 2.0 * q);
  }
  return grad;
}

FieldFitResult fit_field(const Grid2& p, const FitOptions& opts) {
  validate_probmap(p);
  FieldFitResult out;
  out.normalized = Grid2(p.n_rows, p.n_cols, GridKind::ProbMap);
  out.field.gamma.resize(static_cast<std::size_t>(p.n_cols));
  out.field.sigma.resize(static_cast<std::size_t>(p.n_cols));
  out.reports.resize(static_cast<std::size_t>(p.n_cols));

  std::vector<double> col(static_cast<std::size_t>(p.n_rows));
  for (int i = 0; i < p.n_cols; ++i) {
    double lo = p.at(0, i), hi = p.at(0, i);
    for (int j = 1; j < p.n_rows; ++j) {
      lo = std::min(lo, p.at(j, i));
      hi = std::max(hi, p.at(j, i));
    }
    FitReport rep;
    if (hi == lo) {
      // Constant column: normalization is undefined, flag and fall back.
      for (int j = 0; j < p.n_rows; ++j) out.normalized.at(j, i) = 0.0;
      for (int j = 0; j < p.n_rows; ++j) col[static_cast<std::size_t>(j)] = p.at(j, i);
      rep = fallback_report(col, opts);
    } else {
      const double range = hi - lo;  // same rounding as column_normalize
      for (int j = 0; j < p.n_rows; ++j) {
        col[static_cast<std::size_t>(j)] = (p.at(j, i) - lo) / range;
        out.normalized.at(j, i) = col[static_cast<std::size_t>(j)];
      }
      rep = fit_column(col, opts);
    }
    out.field.gamma[static_cast<std::size_t>(i)] = rep.gamma;
    out.field.sigma[static_cast<std::size_t>(i)] = rep.sigma;
    out.reports[static_cast<std::size_t>(i)] = rep;
  }
  return out;
}

Grid2 fit_field_backward(const Grid2& p, const FieldFitResult& fit,
                         std::span<const double> d_gamma,
                         std::span<const double> d_sigma,
                         const FitOptions& opts) {
  if (static_cast<int>(d_gamma.size()) != p.n_cols ||
      static_cast<int>(d_sigma.size()) != p.n_cols) {
    throw Error(ErrorCode::LengthMismatch, "fit_field_backward: gradient length mismatch");
  }
  Grid2 grad_norm(p.n_rows, p.n_cols, GridKind::Image);
  std::vector<double> col(static_cast<std::size_t>(p.n_rows));
  for (int i = 0; i < p.n_cols; ++i) {
    if (fit.reports[static_cast<std::size_t>(i)].fallback_used) continue;
    for (int j = 0; j < p.n_rows; ++j) {
      col[static_cast<std::size_t>(j)] = fit.normalized.at(j, i);
    }
    std::vector<double> g = fit_column_backward(
        col, d_gamma[static_cast<std::size_t>(i)],
        d_sigma[static_cast<std::size_t>(i)], opts);
    for (int j = 0; j < p.n_rows; ++j) {
      grad_norm.at(j, i) = g[static_cast<std::size_t>(j)];
    }
  }
  return column_normalize_backward(p, fit.normalized, grad_norm);
}

}  // namespace surfseg
