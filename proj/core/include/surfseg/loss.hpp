#pragma once

#include <vector>

#include "surfseg/grid.hpp"

namespace surfseg {

/// Per-column discretized, sum-normalized Gaussian centered on the ground
/// truth; the soft training target that replaces one-hot row labels.
struct GaussianTargets {
  Grid2 t_map;
  double sigma_rel = 0.1;
};

/// Builds targets with sigma = sigma_rel * n_rows: column i holds
/// exp(-(j - t_i)^2 / (2 sigma^2)) sampled at integer j and normalized to
/// sum 1. Throws TruthOutOfRange if any position leaves [0, n_rows - 1].
GaussianTargets make_targets(const SurfaceTrace& truth, int n_rows,
                             double sigma_rel);

struct KldResult {
  double loss = 0.0;
  Grid2 grad;  // dLoss/dP
};

/// Sum over columns of D_KL(T_i || P_i) = sum_j T_ij (ln T_ij - ln P_ij),
/// with P floored at eps_p inside the log. Nonnegative; zero iff P = T.
/// Gradient on probabilities is -T_ij / max(P_ij, eps_p).
/// Throws NotADistribution when a column of p does not sum to 1.
KldResult kld_loss(const Grid2& p, const GaussianTargets& targets,
                   double eps_p = 1e-12);

struct MseResult {
  double loss = 0.0;
  std::vector<double> grad;  // dLoss/dx = 2 (x - t)
};

/// Sum of squared surface position errors.
MseResult mse_loss(const SurfaceTrace& x, const SurfaceTrace& t);

}  // namespace surfseg
