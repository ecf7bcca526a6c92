#include "surfseg/predictor.hpp"

#include <algorithm>
#include <cmath>

#include "payload_io.hpp"
#include "surfseg/rng.hpp"

namespace surfseg {

LinearPatchScorer::LinearPatchScorer(int rows, int cols, double temp)
    : patch_rows(rows), patch_cols(cols), temperature(temp),
      weights(static_cast<std::size_t>(rows) * cols + 1, 0.0) {
  if (rows <= 0 || cols <= 0 || rows % 2 == 0 || cols % 2 == 0) {
    throw Error(ErrorCode::BadConfig, "patch dimensions must be odd and positive");
  }
  if (!(temp > 0.0)) {
    throw Error(ErrorCode::BadConfig, "temperature must be positive");
  }
}

namespace {

int clamp_index(int v, int n) { return std::clamp(v, 0, n - 1); }

void check_model(const LinearPatchScorer& model) {
  if (static_cast<int>(model.weights.size()) != model.n_params()) {
    throw Error(ErrorCode::BadConfig, "scorer weight vector has wrong length");
  }
  if (!(model.temperature > 0.0)) {
    throw Error(ErrorCode::BadConfig, "temperature must be positive");
  }
}

}  // namespace

Grid2 predict(const LinearPatchScorer& model, const Grid2& image) {
  check_model(model);
  const int hr = model.patch_rows / 2;
  const int hc = model.patch_cols / 2;
  Grid2 out(image.n_rows, image.n_cols, GridKind::ProbMap);

  std::vector<double> logits(static_cast<std::size_t>(image.n_rows));
  for (int i = 0; i < image.n_cols; ++i) {
    for (int j = 0; j < image.n_rows; ++j) {
      double acc = model.bias();
      std::size_t wk = 0;
      for (int dr = -hr; dr <= hr; ++dr) {
        const int r = clamp_index(j + dr, image.n_rows);
        for (int dc = -hc; dc <= hc; ++dc) {
          const int c = clamp_index(i + dc, image.n_cols);
          acc += model.weights[wk++] * image.at(r, c);
        }
      }
      logits[static_cast<std::size_t>(j)] = acc / model.temperature;
    }
    // Column softmax, max-shifted for stability.
    double lmax = logits[0];
    for (double v : logits) lmax = std::max(lmax, v);
    double sum = 0.0;
    for (int j = 0; j < image.n_rows; ++j) {
      const double e = std::exp(logits[static_cast<std::size_t>(j)] - lmax);
      out.at(j, i) = e;
      sum += e;
    }
    const double inv = 1.0 / sum;
    for (int j = 0; j < image.n_rows; ++j) out.at(j, i) *= inv;
  }
  return out;
}

std::vector<double> predict_backward(const LinearPatchScorer& model,
                                     const Grid2& image, const Grid2& probmap,
                                     const Grid2& grad_probmap) {
  check_model(model);
  const int hr = model.patch_rows / 2;
  const int hc = model.patch_cols / 2;
  std::vector<double> grad(model.weights.size(), 0.0);

  std::vector<double> dz(static_cast<std::size_t>(image.n_rows));
  for (int i = 0; i < image.n_cols; ++i) {
    // Softmax adjoint: dz_j = (p_j / T) * (g_j - sum_k g_k p_k).
    double dot = 0.0;
    for (int j = 0; j < image.n_rows; ++j) dot += grad_probmap.at(j, i) * probmap.at(j, i);
    for (int j = 0; j < image.n_rows; ++j) {
      dz[static_cast<std::size_t>(j)] =
          probmap.at(j, i) * (grad_probmap.at(j, i) - dot) / model.temperature;
    }
    for (int j = 0; j < image.n_rows; ++j) {
      const double g = dz[static_cast<std::size_t>(j)];
      if (g == 0.0) continue;
      std::size_t wk = 0;
      for (int dr = -hr; dr <= hr; ++dr) {
        const int r = clamp_index(j + dr, image.n_rows);
        for (int dc = -hc; dc <= hc; ++dc) {
          const int c = clamp_index(i + dc, image.n_cols);
          grad[wk++] += g * image.at(r, c);
        }
      }
      grad.back() += g;
    }
  }
  return grad;
}

Grid2 oracle_predict(const OracleNoiseSpec& spec, const SurfaceTrace& truth,
                     int n_rows) {
  if (!(spec.sigma_emit > 0.0)) {
    throw Error(ErrorCode::BadConfig, "oracle_predict: sigma_emit must be positive");
  }
  if (spec.corrupt_fraction < 0.0 || spec.corrupt_fraction > 1.0) {
    throw Error(ErrorCode::BadConfig, "oracle_predict: corrupt_fraction outside [0,1]");
  }
  const int n_cols = truth.n_cols();
  Grid2 out(n_rows, n_cols, GridKind::ProbMap);
  CounterRng rng(spec.seed, rng_stream::kOracle);
  for (int i = 0; i < n_cols; ++i) {
    const double t = truth[i];
    if (!(t >= 0.0 && t <= n_rows - 1.0)) {
      throw Error(ErrorCode::TruthOutOfRange,
                  "oracle_predict: truth out of range at column " + std::to_string(i));
    }
    // Two draws per column regardless of the corruption outcome keep the
    // stream aligned across corrupt_fraction settings.
    const double coin = rng.uniform();
    const double noise = rng.normal(0.0, 1.0);
    double center = t;
    if (coin < spec.corrupt_fraction) {
      center += spec.position_noise_std * noise;
    }
    double sum = 0.0;
    for (int j = 0; j < n_rows; ++j) {
      const double d = (j - center) / spec.sigma_emit;
      const double v = std::exp(-0.5 * d * d);
      out.at(j, i) = v;
      sum += v;
    }
    if (sum <= 0.0) {
      // Center displaced so far out that every in-range sample underflowed;
      // collapse to the nearest representable row.
      const int j0 = std::clamp(static_cast<int>(std::lround(center)), 0, n_rows - 1);
      out.at(j0, i) = 1.0;
      continue;
    }
    // Mass outside the grid is dropped; renormalize what remains.
    const double inv = 1.0 / sum;
    for (int j = 0; j < n_rows; ++j) out.at(j, i) *= inv;
  }
  return out;
}

void save_scorer(const LinearPatchScorer& model, const std::filesystem::path& path) {
  check_model(model);
  nlohmann::json header = {
      {"format", "surfseg-model-v1"},
      {"kind", "linear_patch"},
      {"patch_rows", model.patch_rows},
      {"patch_cols", model.patch_cols},
      {"temperature", model.temperature},
      {"payload_len", model.weights.size()},
  };
  detail::write_payload_file(path, header, model.weights);
}

LinearPatchScorer load_scorer(const std::filesystem::path& path) {
  std::vector<double> payload;
  nlohmann::json header = detail::read_payload_file(path, payload);
  if (header.value("format", "") != "surfseg-model-v1" ||
      header.value("kind", "") != "linear_patch") {
    throw Error(ErrorCode::IoError, path.string() + ": not a linear_patch model file");
  }
  LinearPatchScorer model(header.value("patch_rows", 0), header.value("patch_cols", 0),
                          header.value("temperature", 1.0));
  if (payload.size() != model.weights.size()) {
    throw Error(ErrorCode::IoError, path.string() + ": payload length mismatch");
  }
  model.weights = std::move(payload);
  return model;
}

}  // namespace surfseg
