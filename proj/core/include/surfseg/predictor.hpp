#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "surfseg/grid.hpp"

namespace surfseg {

/// Trainable per-pixel linear scorer over a local image patch, followed by a
/// per-column softmax. Stands in for a segmentation network: light enough to
/// train on a CPU yet expressive enough to track ridge-like boundaries.
struct LinearPatchScorer {
  int patch_rows = 9;
  int patch_cols = 9;
  double temperature = 1.0;
  /// patch_rows * patch_cols filter taps followed by one bias term.
  std::vector<double> weights;

  LinearPatchScorer() = default;
  LinearPatchScorer(int rows, int cols, double temp = 1.0);

  int n_params() const { return patch_rows * patch_cols + 1; }
  double& bias() { return weights.back(); }
  double bias() const { return weights.back(); }
};

/// Scores every pixel (replicate padding at the borders) and applies a
/// column-wise softmax, so each output column is a distribution over rows.
Grid2 predict(const LinearPatchScorer& model, const Grid2& image);

/// Gradient of a scalar loss w.r.t. the scorer parameters, given the
/// predicted map and dLoss/dP. Fuses the softmax and patch-correlation
/// adjoints; layout matches LinearPatchScorer::weights.
std::vector<double> predict_backward(const LinearPatchScorer& model,
                                     const Grid2& image, const Grid2& probmap,
                                     const Grid2& grad_probmap);

/// Controlled stand-in for a trained network: emits per-column Gaussians
/// around the ground truth, with a seeded fraction of columns displaced by
/// position noise. Used to study the smoothing stage in isolation.
struct OracleNoiseSpec {
  double corrupt_fraction = 0.0;
  double position_noise_std = 0.0;
  double sigma_emit = 2.0;
  std::uint64_t seed = 0;
};

/// Per column: center = truth (+ noise on a seeded subset), then a
/// discretized Gaussian with std sigma_emit, truncated to the grid and
/// normalized to sum 1. Consumes rng_stream::kOracle of spec.seed.
Grid2 oracle_predict(const OracleNoiseSpec& spec, const SurfaceTrace& truth,
                     int n_rows);

void save_scorer(const LinearPatchScorer& model, const std::filesystem::path& path);
LinearPatchScorer load_scorer(const std::filesystem::path& path);

}  // namespace surfseg
