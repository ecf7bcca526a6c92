#include "surfseg/train.hpp"

#include <cmath>

#include <json.hpp>

#include "payload_io.hpp"
#include "surfseg/csv.hpp"
#include "surfseg/loss.hpp"
#include "surfseg/pipeline.hpp"
#include "surfseg/smoothing.hpp"

namespace surfseg {

double TrainState::smoothness_weight() const { return std::exp(log_w); }

Dataset load_dataset(const std::filesystem::path& manifest_path,
                     const std::string& split) {
  const DatasetManifest manifest = read_manifest(manifest_path);
  const std::filesystem::path dir = manifest_path.parent_path();
  Dataset data;
  for (const ManifestSample& ms : manifest.samples) {
    if (!split.empty() && ms.split != split) continue;
    Sample s;
    s.image = read_grid_csv(dir / ms.image, GridKind::Image);
    s.truth = read_trace_csv(dir / ms.truth);
    if (!ms.probmap.empty()) {
      s.probmap = read_grid_csv(dir / ms.probmap, GridKind::ProbMap);
    }
    data.push_back(std::move(s));
  }
  return data;
}

TrainState make_train_state(LinearPatchScorer scorer, const TrainConfig& cfg) {
  TrainState st;
  st.has_scorer = true;
  st.adam_scorer = AdamState(scorer.weights.size());
  st.scorer = std::move(scorer);
  st.log_w = std::log(cfg.w_init);
  st.rng_seed = cfg.seed;
  return st;
}

TrainState make_oracle_state(const TrainConfig& cfg) {
  TrainState st;
  st.has_scorer = false;
  st.log_w = std::log(cfg.w_init);
  st.rng_seed = cfg.seed;
  return st;
}

void save_checkpoint(const TrainState& state, const std::filesystem::path& path) {
  nlohmann::json model;
  if (state.has_scorer) {
    model = {{"kind", "linear_patch"},
             {"patch_rows", state.scorer.patch_rows},
             {"patch_cols", state.scorer.patch_cols},
             {"temperature", state.scorer.temperature},
             {"n_params", state.scorer.weights.size()}};
  } else {
    model = {{"kind", "oracle"}, {"n_params", 0}};
  }
  std::vector<double> payload;
  payload.reserve(3 * state.scorer.weights.size() + 2);
  payload.insert(payload.end(), state.scorer.weights.begin(), state.scorer.weights.end());
  payload.insert(payload.end(), state.adam_scorer.m.begin(), state.adam_scorer.m.end());
  payload.insert(payload.end(), state.adam_scorer.v.begin(), state.adam_scorer.v.end());
  payload.insert(payload.end(), state.adam_log_w.m.begin(), state.adam_log_w.m.end());
  payload.insert(payload.end(), state.adam_log_w.v.begin(), state.adam_log_w.v.end());

  nlohmann::json header = {
      {"format", "surfseg-checkpoint-v1"},
      {"payload_len", payload.size()},
      {"log_w", state.log_w},
      {"model", model},
      {"adam_scorer_step", state.adam_scorer.step},
      {"adam_log_w_step", state.adam_log_w.step},
      {"completed_rounds", state.completed_rounds},
      {"seed", state.rng_seed},
  };
  detail::write_payload_file(path, header, payload);
}

TrainState load_checkpoint(const std::filesystem::path& path) {
  std::vector<double> payload;
  nlohmann::json header = detail::read_payload_file(path, payload);
  if (header.value("format", "") != "surfseg-checkpoint-v1") {
    throw Error(ErrorCode::IoError, path.string() + ": not a checkpoint file");
  }
  TrainState st;
  const nlohmann::json model = header.value("model", nlohmann::json::object());
  const std::string kind = model.value("kind", "oracle");
  std::size_t n_params = model.value("n_params", std::size_t{0});
  if (kind == "linear_patch") {
    st.has_scorer = true;
    st.scorer = LinearPatchScorer(model.value("patch_rows", 0), model.value("patch_cols", 0),
                                  model.value("temperature", 1.0));
    if (st.scorer.weights.size() != n_params) {
      throw Error(ErrorCode::IoError, path.string() + ": inconsistent parameter count");
    }
  }
  if (payload.size() != 3 * n_params + 2) {
    throw Error(ErrorCode::IoError, path.string() + ": payload length mismatch");
  }
  auto it = payload.begin();
  st.scorer.weights.assign(it, it + n_params);
  it += n_params;
  st.adam_scorer = AdamState(n_params);
  st.adam_scorer.m.assign(it, it + n_params);
  it += n_params;
  st.adam_scorer.v.assign(it, it + n_params);
  it += n_params;
  st.adam_log_w.m.assign(it, it + 1);
  it += 1;
  st.adam_log_w.v.assign(it, it + 1);
  st.log_w = header.value("log_w", 0.0);
  st.adam_scorer.step = header.value("adam_scorer_step", std::int64_t{0});
  st.adam_log_w.step = header.value("adam_log_w_step", std::int64_t{0});
  st.completed_rounds = header.value("completed_rounds", std::int64_t{0});
  st.rng_seed = header.value("seed", std::uint64_t{0});
  return st;
}

namespace {

Grid2 sample_probmap(const TrainState& state, const Sample& s) {
  // A live scorer always wins over stored maps: gradients must match the
  // forward pass that produced them.
  if (state.has_scorer) return predict(state.scorer, s.image);
  if (s.probmap) return *s.probmap;
  throw Error(ErrorCode::BadConfig,
              "sample has no stored probability map and state has no scorer");
}

struct ForwardPass {
  Grid2 probmap;
  FieldFitResult fit;
  SmoothSystem sys;
  SurfaceTrace x;
  MseResult mse;
};

ForwardPass forward_sample(const TrainState& state, const Sample& s,
                           const FitOptions& opts) {
  ForwardPass fp;
  fp.probmap = sample_probmap(state, s);
  fp.fit = fit_field(fp.probmap, opts);
  fp.sys = assemble(fp.fit.field, state.smoothness_weight());
  fp.x = solve(fp.sys);
  fp.mse = mse_loss(fp.x, s.truth);
  return fp;
}

}  // namespace

PretrainResult pretrain(const LinearPatchScorer& model, const Dataset& data,
                        const TrainConfig& cfg, int epochs, double lr) {
  if (data.empty()) {
    throw Error(ErrorCode::EmptySplit, "pretrain: dataset is empty");
  }
  if (lr < 0.0) {
    throw Error(ErrorCode::BadConfig, "pretrain: negative learning rate");
  }
  PretrainResult out;
  out.model = model;
  AdamState adam(model.weights.size());
  const int batch = std::max(1, cfg.batch_size);

  for (int ep = 0; ep < epochs; ++ep) {
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < data.size(); begin += batch) {
      const std::size_t end = std::min(data.size(), begin + batch);
      std::vector<double> grad(out.model.weights.size(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        const Sample& s = data[k];
        const Grid2 p = predict(out.model, s.image);
        const GaussianTargets targets = make_targets(s.truth, p.n_rows, cfg.sigma_rel);
        const KldResult kld = kld_loss(p, targets);
        batch_loss += kld.loss;
        const std::vector<double> g = predict_backward(out.model, s.image, p, kld.grad);
        for (std::size_t w = 0; w < grad.size(); ++w) grad[w] += g[w];
      }
      const double inv = 1.0 / static_cast<double>(end - begin);
      for (double& g : grad) g *= inv;
      epoch_loss += batch_loss;
      if (!std::isfinite(batch_loss)) {
        out.diverged = true;
        out.epoch_loss.push_back(epoch_loss);
        return out;
      }
      if (lr > 0.0) {
        adam_step(out.model.weights, grad, adam, lr);
      }
    }
    out.epoch_loss.push_back(epoch_loss / static_cast<double>(data.size()));
  }
  return out;
}

FinetuneResult alternate_finetune(const Dataset& train_set, const Dataset& val_set,
                                  const TrainState& state, const TrainConfig& cfg) {
  if (train_set.empty() || val_set.empty()) {
    throw Error(ErrorCode::EmptySplit, "alternate_finetune: empty train or val split");
  }
  FinetuneResult out;
  out.state = state;
  const FitOptions fit_opts = cfg.fit_options();
  const int batch = std::max(1, cfg.batch_size);

  for (int round = 0; round < cfg.rounds; ++round) {
    // Phase 1: scorer updates on the training split, smoothing weight frozen.
    for (int ep = 0; ep < cfg.ep_unet; ++ep) {
      if (!out.state.has_scorer) break;  // nothing to train in oracle mode
      double epoch_loss = 0.0;
      for (std::size_t begin = 0; begin < train_set.size(); begin += batch) {
        const std::size_t end = std::min(train_set.size(), begin + batch);
        std::vector<double> grad(out.state.scorer.weights.size(), 0.0);
        double batch_loss = 0.0;
        for (std::size_t k = begin; k < end; ++k) {
          const Sample& s = train_set[k];
          const ForwardPass fp = forward_sample(out.state, s, fit_opts);
          batch_loss += fp.mse.loss;
          const SmoothGradients sg = backward(fp.sys, fp.fit.field, fp.x, fp.mse.grad);
          const Grid2 dmap =
              fit_field_backward(fp.probmap, fp.fit, sg.d_gamma, sg.d_sigma, fit_opts);
          const std::vector<double> g =
              predict_backward(out.state.scorer, s.image, fp.probmap, dmap);
          for (std::size_t w = 0; w < grad.size(); ++w) grad[w] += g[w];
        }
        if (!std::isfinite(batch_loss)) {
          out.diverged = true;
          out.message = "non-finite loss during scorer phase";
          return out;
        }
        const double inv = 1.0 / static_cast<double>(end - begin);
        for (double& g : grad) g *= inv;
        adam_step(out.state.scorer.weights, grad, out.state.adam_scorer, cfg.lr_predictor);
        epoch_loss += batch_loss;
      }
      out.predictor_epoch_loss.push_back(epoch_loss / static_cast<double>(train_set.size()));
    }

    // Phase 2: log_w updates on the validation split, scorer frozen. The fits
    // do not depend on w, so they are computed once per phase.
    if (cfg.ep_sb > 0) {
      std::vector<FieldFitResult> fits;
      fits.reserve(val_set.size());
      for (const Sample& s : val_set) {
        fits.push_back(fit_field(sample_probmap(out.state, s), fit_opts));
      }
      for (int ep = 0; ep < cfg.ep_sb; ++ep) {
        double epoch_loss = 0.0;
        for (std::size_t begin = 0; begin < val_set.size(); begin += batch) {
          const std::size_t end = std::min(val_set.size(), begin + batch);
          double d_log_w = 0.0;
          double batch_loss = 0.0;
          for (std::size_t k = begin; k < end; ++k) {
            const Sample& s = val_set[k];
            const double w = out.state.smoothness_weight();
            const SmoothSystem sys = assemble(fits[k].field, w);
            const SurfaceTrace x = solve(sys);
            const MseResult mse = mse_loss(x, s.truth);
            batch_loss += mse.loss;
            const SmoothGradients sg = backward(sys, fits[k].field, x, mse.grad);
            d_log_w += sg.d_w * w;  // d/d(log w) = w * d/dw
          }
          if (!std::isfinite(batch_loss)) {
            out.diverged = true;
            out.message = "non-finite loss during smoothing phase";
            return out;
          }
          d_log_w /= static_cast<double>(end - begin);
          double params[1] = {out.state.log_w};
          double grads[1] = {d_log_w};
          adam_step(params, grads, out.state.adam_log_w, cfg.lr_sb);
          out.state.log_w = params[0];
          epoch_loss += batch_loss;
        }
        out.sb_epoch_loss.push_back(epoch_loss / static_cast<double>(val_set.size()));
      }
    }
    out.state.completed_rounds += 1;
  }
  return out;
}

}  // namespace surfseg
