#include "surfseg/loss.hpp"

#include <cmath>

namespace surfseg {

GaussianTargets make_targets(const SurfaceTrace& truth, int n_rows,
                             double sigma_rel) {
  if (!(sigma_rel > 0.0)) {
    throw Error(ErrorCode::BadConfig, "make_targets: sigma_rel must be positive");
  }
  const int n_cols = truth.n_cols();
  if (n_cols == 0) {
    throw Error(ErrorCode::LengthMismatch, "make_targets: empty truth");
  }
  const double sigma = sigma_rel * n_rows;
  GaussianTargets out;
  out.sigma_rel = sigma_rel;
  out.t_map = Grid2(n_rows, n_cols, GridKind::ProbMap);
  for (int i = 0; i < n_cols; ++i) {
    const double t = truth[i];
    if (!(t >= 0.0 && t <= n_rows - 1.0)) {
      throw Error(ErrorCode::TruthOutOfRange,
                  "make_targets: truth out of range at column " + std::to_string(i));
    }
    double sum = 0.0;
    for (int j = 0; j < n_rows; ++j) {
      const double d = (j - t) / sigma;
      const double v = std::exp(-0.5 * d * d);
      out.t_map.at(j, i) = v;
      sum += v;
    }
    const double inv = 1.0 / sum;
    for (int j = 0; j < n_rows; ++j) out.t_map.at(j, i) *= inv;
  }
  return out;
}

KldResult kld_loss(const Grid2& p, const GaussianTargets& targets, double eps_p) {
  const Grid2& t = targets.t_map;
  if (p.n_rows != t.n_rows || p.n_cols != t.n_cols) {
    throw Error(ErrorCode::LengthMismatch, "kld_loss: shape mismatch");
  }
  for (int i = 0; i < p.n_cols; ++i) {
    double sum = 0.0;
    for (int j = 0; j < p.n_rows; ++j) sum += p.at(j, i);
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(ErrorCode::NotADistribution,
                  "kld_loss: column " + std::to_string(i) +
                      " sums to " + std::to_string(sum) + ", expected 1");
    }
  }
  KldResult out;
  out.grad = Grid2(p.n_rows, p.n_cols, GridKind::Image);
  double loss = 0.0;
  for (int i = 0; i < p.n_cols; ++i) {
    for (int j = 0; j < p.n_rows; ++j) {
      const double tij = t.at(j, i);
      if (tij <= 0.0) continue;  // 0 * ln 0 = 0
      const double pij = std::max(p.at(j, i), eps_p);
      loss += tij * (std::log(tij) - std::log(pij));
      out.grad.at(j, i) = -tij / pij;
    }
  }
  out.loss = loss;
  return out;
}

MseResult mse_loss(const SurfaceTrace& x, const SurfaceTrace& t) {
  if (x.n_cols() != t.n_cols()) {
    throw Error(ErrorCode::LengthMismatch, "mse_loss: length mismatch");
  }
  MseResult out;
  out.grad.resize(x.x.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < x.x.size(); ++i) {
    const double d = x.x[i] - t.x[i];
    loss += d * d;
    out.grad[i] = 2.0 * d;
  }
  out.loss = loss;
  return out;
}

}  // namespace surfseg
