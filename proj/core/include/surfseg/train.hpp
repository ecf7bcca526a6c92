#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "surfseg/adam.hpp"
#include "surfseg/gauss_fit.hpp"
#include "surfseg/predictor.hpp"
#include "surfseg/synth.hpp"

namespace surfseg {

/// One training sample. `probmap` is set for datasets with precomputed unary
/// maps (oracle predictor); otherwise maps come from the scorer.
struct Sample {
  Grid2 image;
  SurfaceTrace truth;
  std::optional<Grid2> probmap;
};

using Dataset = std::vector<Sample>;

/// Loads the samples of one split ("train" | "val" | "test" | "" for all);
/// paths in the manifest are relative to its directory.
Dataset load_dataset(const std::filesystem::path& manifest_path,
                     const std::string& split);

struct TrainConfig {
  double lr_predictor = 1e-5;
  double lr_sb = 1e-2;
  int ep_unet = 10;
  int ep_sb = 10;
  int rounds = 5;
  double sigma_rel = 0.1;   // target relaxation std as fraction of column length
  double w_init = 1e-5;
  std::uint64_t seed = 0;
  int batch_size = 1;
  double tau = 1e-3;        // log-fit sample cutoff

  FitOptions fit_options() const {
    FitOptions o;
    o.tau = tau;
    return o;
  }
};

/// Learnable state: scorer parameters (absent in oracle mode), the
/// log-parameterized smoothness weight (w = exp(log_w) stays positive by
/// construction), Adam moments per parameter group, and schedule counters.
struct TrainState {
  bool has_scorer = false;
  LinearPatchScorer scorer;
  double log_w = 0.0;
  AdamState adam_scorer;
  AdamState adam_log_w{1};
  std::int64_t completed_rounds = 0;
  std::uint64_t rng_seed = 0;

  double smoothness_weight() const;
};

TrainState make_train_state(LinearPatchScorer scorer, const TrainConfig& cfg);
TrainState make_oracle_state(const TrainConfig& cfg);

void save_checkpoint(const TrainState& state, const std::filesystem::path& path);
TrainState load_checkpoint(const std::filesystem::path& path);

struct PretrainResult {
  LinearPatchScorer model;
  std::vector<double> epoch_loss;  // mean KLD per epoch
  bool diverged = false;
};

/// Minimizes the KLD between column-softmax predictions and Gaussian-relaxed
/// targets with Adam. lr = 0 evaluates losses without updating. Samples are
/// visited in dataset order; batches are consecutive chunks, so runs are
/// bitwise reproducible.
PretrainResult pretrain(const LinearPatchScorer& model, const Dataset& data,
                        const TrainConfig& cfg, int epochs, double lr);

struct FinetuneResult {
  TrainState state;
  std::vector<double> predictor_epoch_loss;
  std::vector<double> sb_epoch_loss;
  bool diverged = false;
  std::string message;
};

/// Alternating fine-tune: `rounds` repetitions of (ep_unet epochs updating
/// the scorer on train_set with the smoothing stage applied, then ep_sb
/// epochs updating log_w on val_set with the scorer frozen). Losses are the
/// summed squared surface errors after the full forward pipeline; gradients
/// flow through the solve adjoint and the closed-form fit derivative. On a
/// non-finite loss the schedule aborts and returns the last finite state
/// with `diverged` set.
FinetuneResult alternate_finetune(const Dataset& train_set, const Dataset& val_set,
                                  const TrainState& state, const TrainConfig& cfg);

}  // namespace surfseg
