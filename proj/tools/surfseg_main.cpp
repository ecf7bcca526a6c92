// Command line front end wiring the surfseg library into a workflow:
// synthesize data, pretrain the scorer, fine-tune the smoothness weight,
// infer surfaces, and evaluate metrics. Every command is reproducible from
// (config, seed); all file formats are plain CSV/JSON.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "surfseg/csv.hpp"
#include "surfseg/error.hpp"
#include "surfseg/geometry.hpp"
#include "surfseg/metrics.hpp"
#include "surfseg/parallel.hpp"
#include "surfseg/pipeline.hpp"
#include "surfseg/predictor.hpp"
#include "surfseg/rng.hpp"
#include "surfseg/smoothing.hpp"
#include "surfseg/synth.hpp"
#include "surfseg/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct PredictorConfig {
  int patch_rows = 9;
  int patch_cols = 9;
  double temperature = 1.0;
  double init_std = 0.01;
};

struct PretrainConfig {
  int epochs = 200;
  double lr = 1e-4;
};

struct DatasetConfig {
  int n_samples = 100;
  std::array<double, 3> fractions = {0.6, 0.2, 0.2};
};

struct RunConfig {
  surfseg::TrainConfig training;
  surfseg::SynthSpec synth;
  DatasetConfig dataset;
  std::optional<surfseg::OracleNoiseSpec> oracle;
  std::optional<surfseg::PolarSpec> polar;
  surfseg::PixelSpacing spacing;
  PredictorConfig predictor;
  PretrainConfig pretrain;
};

void require_keys(const json& j, const std::string& section,
                  std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed) {
      if (item.key() == k) { ok = true; break; }
    }
    if (!ok) {
      throw surfseg::Error(surfseg::ErrorCode::BadConfig,
                           "unknown config key '" +
                               (section.empty() ? item.key() : section + "." + item.key()) + "'");
    }
  }
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw surfseg::Error(surfseg::ErrorCode::IoError, "cannot open config: " + path);
  }
  json j = json::parse(f, nullptr, false);
  if (j.is_discarded()) {
    throw surfseg::Error(surfseg::ErrorCode::BadConfig, path + ": malformed JSON");
  }
  require_keys(j, "", {"training", "tau", "synth", "dataset", "oracle", "polar",
                       "spacing", "predictor", "pretrain"});

  if (j.contains("training")) {
    const json& t = j["training"];
    require_keys(t, "training",
                 {"lr_predictor", "lr_sb", "ep_unet", "ep_sb", "rounds", "sigma_rel",
                  "w_init", "seed", "batch_size"});
    cfg.training.lr_predictor = t.value("lr_predictor", cfg.training.lr_predictor);
    cfg.training.lr_sb = t.value("lr_sb", cfg.training.lr_sb);
    cfg.training.ep_unet = t.value("ep_unet", cfg.training.ep_unet);
    cfg.training.ep_sb = t.value("ep_sb", cfg.training.ep_sb);
    cfg.training.rounds = t.value("rounds", cfg.training.rounds);
    cfg.training.sigma_rel = t.value("sigma_rel", cfg.training.sigma_rel);
    cfg.training.w_init = t.value("w_init", cfg.training.w_init);
    cfg.training.seed = t.value("seed", cfg.training.seed);
    cfg.training.batch_size = t.value("batch_size", cfg.training.batch_size);
  }
  cfg.training.tau = j.value("tau", cfg.training.tau);

  if (j.contains("synth")) {
    const json& s = j["synth"];
    require_keys(s, "synth",
                 {"n_cols", "n_rows", "smoothness", "n_harmonics", "amplitude",
                  "ridge_width", "image_noise_std", "seed"});
    cfg.synth.n_cols = s.value("n_cols", cfg.synth.n_cols);
    cfg.synth.n_rows = s.value("n_rows", cfg.synth.n_rows);
    cfg.synth.smoothness = s.value("smoothness", cfg.synth.smoothness);
    cfg.synth.n_harmonics = s.value("n_harmonics", cfg.synth.n_harmonics);
    cfg.synth.amplitude = s.value("amplitude", cfg.synth.amplitude);
    cfg.synth.ridge_width = s.value("ridge_width", cfg.synth.ridge_width);
    cfg.synth.image_noise_std = s.value("image_noise_std", cfg.synth.image_noise_std);
    cfg.synth.seed = s.value("seed", cfg.synth.seed);
  }
  if (j.contains("dataset")) {
    const json& d = j["dataset"];
    require_keys(d, "dataset", {"n_samples", "fractions"});
    cfg.dataset.n_samples = d.value("n_samples", cfg.dataset.n_samples);
    if (d.contains("fractions")) {
      auto v = d["fractions"].get<std::vector<double>>();
      if (v.size() != 3) {
        throw surfseg::Error(surfseg::ErrorCode::BadConfig,
                             "dataset.fractions must have 3 entries");
      }
      cfg.dataset.fractions = {v[0], v[1], v[2]};
    }
  }
  if (j.contains("oracle")) {
    const json& o = j["oracle"];
    require_keys(o, "oracle",
                 {"corrupt_fraction", "position_noise_std", "sigma_emit", "seed"});
    surfseg::OracleNoiseSpec os;
    os.corrupt_fraction = o.value("corrupt_fraction", os.corrupt_fraction);
    os.position_noise_std = o.value("position_noise_std", os.position_noise_std);
    os.sigma_emit = o.value("sigma_emit", os.sigma_emit);
    os.seed = o.value("seed", os.seed);
    cfg.oracle = os;
  }
  if (j.contains("polar")) {
    const json& p = j["polar"];
    require_keys(p, "polar", {"cx", "cy", "n_angles", "n_radii", "r_max", "wrap"});
    surfseg::PolarSpec ps;
    ps.center_x = p.value("cx", ps.center_x);
    ps.center_y = p.value("cy", ps.center_y);
    ps.n_angles = p.value("n_angles", ps.n_angles);
    ps.n_radii = p.value("n_radii", ps.n_radii);
    ps.r_max = p.value("r_max", ps.r_max);
    ps.wrap = p.value("wrap", ps.wrap);
    cfg.polar = ps;
  }
  if (j.contains("spacing")) {
    const json& s = j["spacing"];
    require_keys(s, "spacing", {"row_spacing", "unit_label"});
    cfg.spacing.row_spacing = s.value("row_spacing", cfg.spacing.row_spacing);
    cfg.spacing.unit_label = s.value("unit_label", cfg.spacing.unit_label);
  }
  if (j.contains("predictor")) {
    const json& p = j["predictor"];
    require_keys(p, "predictor", {"patch_rows", "patch_cols", "temperature", "init_std"});
    cfg.predictor.patch_rows = p.value("patch_rows", cfg.predictor.patch_rows);
    cfg.predictor.patch_cols = p.value("patch_cols", cfg.predictor.patch_cols);
    cfg.predictor.temperature = p.value("temperature", cfg.predictor.temperature);
    cfg.predictor.init_std = p.value("init_std", cfg.predictor.init_std);
  }
  if (j.contains("pretrain")) {
    const json& p = j["pretrain"];
    require_keys(p, "pretrain", {"epochs", "lr"});
    cfg.pretrain.epochs = p.value("epochs", cfg.pretrain.epochs);
    cfg.pretrain.lr = p.value("lr", cfg.pretrain.lr);
  }
  return cfg;
}

std::string fmt_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0,
                  std::chrono::steady_clock::time_point t1) {
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

/// Loads either a standalone scorer model or a training checkpoint; returns
/// the scorer plus the checkpoint's smoothness weight when present.
std::pair<surfseg::LinearPatchScorer, std::optional<double>> load_model_any(
    const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw surfseg::Error(surfseg::ErrorCode::IoError, "cannot open model: " + path.string());
  }
  std::string line;
  std::getline(f, line);
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded()) {
    throw surfseg::Error(surfseg::ErrorCode::IoError, path.string() + ": malformed header");
  }
  const std::string format = header.value("format", "");
  if (format == "surfseg-model-v1") {
    return {surfseg::load_scorer(path), std::nullopt};
  }
  if (format == "surfseg-checkpoint-v1") {
    surfseg::TrainState st = surfseg::load_checkpoint(path);
    if (!st.has_scorer) {
      throw surfseg::Error(surfseg::ErrorCode::BadConfig,
                           "checkpoint has no scorer; inference needs a linear_patch model");
    }
    return {st.scorer, st.smoothness_weight()};
  }
  throw surfseg::Error(surfseg::ErrorCode::IoError,
                       path.string() + ": unrecognized model format '" + format + "'");
}

surfseg::LinearPatchScorer init_scorer(const PredictorConfig& pc, std::uint64_t seed) {
  surfseg::LinearPatchScorer scorer(pc.patch_rows, pc.patch_cols, pc.temperature);
  surfseg::CounterRng rng(seed, surfseg::rng_stream::kInit);
  for (double& w : scorer.weights) w = rng.normal(0.0, pc.init_std);
  scorer.bias() = 0.0;
  return scorer;
}

// ---------------------------------------------------------------------------
// Subcommand bodies. Each returns the process exit code.

int cmd_synth(const RunConfig& cfg, const std::string& out_dir,
              std::optional<std::uint64_t> seed) {
  surfseg::SynthSpec spec = cfg.synth;
  if (seed) spec.seed = *seed;
  surfseg::gen_dataset(spec, cfg.dataset.n_samples, cfg.dataset.fractions, out_dir,
                       cfg.oracle);
  std::cout << (fs::path(out_dir) / "manifest.json").string() << "\n";
  return 0;
}

int cmd_fit_gauss(const std::string& in, const std::string& out, double tau,
                  bool report) {
  surfseg::FitOptions opts;
  opts.tau = tau;
  const surfseg::Grid2 map = surfseg::read_grid_csv(in, surfseg::GridKind::ProbMap);
  const surfseg::FieldFitResult fit = surfseg::fit_field(map, opts);
  const std::vector<int> flags = fit.fallback_flags();
  surfseg::write_gauss_csv(fit.field, out, report ? &flags : nullptr);
  return 0;
}

int cmd_smooth(const std::string& in, double w, const std::string& out,
               bool print_energy, bool wrap) {
  const surfseg::GaussianField gf = surfseg::read_gauss_csv(in);
  surfseg::SurfaceTrace x;
  double e = 0.0;
  if (wrap) {
    x = surfseg::solve_cyclic(gf, w);
    e = surfseg::energy_cyclic(gf, w, x);
  } else {
    const surfseg::SmoothSystem sys = surfseg::assemble(gf, w);
    x = surfseg::solve(sys);
    e = surfseg::energy(sys, gf, x);
  }
  surfseg::write_trace_csv(x, out);
  if (print_energy) {
    std::cout << fmt_sig(e, 12) << "\n";
  }
  return 0;
}

int cmd_infer(const RunConfig& cfg, const std::string& model_path,
              const std::string& image_path, const std::string& out,
              bool no_sb, std::optional<double> w_flag, bool report, bool timing) {
  auto [scorer, ckpt_w] = load_model_any(model_path);
  const surfseg::Grid2 image = surfseg::read_grid_csv(image_path, surfseg::GridKind::Image);

  double w = cfg.training.w_init;
  if (ckpt_w) w = *ckpt_w;
  if (w_flag) w = *w_flag;

  const auto t0 = std::chrono::steady_clock::now();
  const surfseg::Grid2 probmap = surfseg::predict(scorer, image);
  const auto t1 = std::chrono::steady_clock::now();
  const surfseg::FieldFitResult fit = surfseg::fit_field(probmap, cfg.training.fit_options());
  const auto t2 = std::chrono::steady_clock::now();
  surfseg::SurfaceTrace trace;
  if (no_sb) {
    trace = surfseg::SurfaceTrace(fit.field.gamma);
  } else if (cfg.polar && cfg.polar->wrap) {
    trace = surfseg::solve_cyclic(fit.field, w);
  } else {
    trace = surfseg::solve(surfseg::assemble(fit.field, w));
  }
  const auto t3 = std::chrono::steady_clock::now();

  surfseg::write_trace_csv(trace, out);
  if (report) {
    const std::vector<int> flags = fit.fallback_flags();
    surfseg::write_gauss_csv(fit.field, out + ".report.csv", &flags);
  }
  if (timing) {
    std::fprintf(stderr, "predictor %.3f ms, fit %.3f ms, sb %.3f ms\n",
                 elapsed_ms(t0, t1), elapsed_ms(t1, t2), elapsed_ms(t2, t3));
  }
  return 0;
}

int cmd_pretrain(const RunConfig& cfg_in, const std::string& data,
                 const std::string& out, std::optional<std::uint64_t> seed) {
  RunConfig cfg = cfg_in;
  if (seed) cfg.training.seed = *seed;
  const surfseg::Dataset train = surfseg::load_dataset(data, "train");
  if (train.empty()) {
    throw surfseg::Error(surfseg::ErrorCode::EmptySplit, "pretrain: empty train split");
  }
  surfseg::LinearPatchScorer scorer = init_scorer(cfg.predictor, cfg.training.seed);
  const surfseg::PretrainResult res =
      surfseg::pretrain(scorer, train, cfg.training, cfg.pretrain.epochs, cfg.pretrain.lr);
  if (res.diverged) {
    surfseg::save_scorer(res.model, out);
    std::cerr << "pretraining diverged; last state written to " << out << "\n";
    return 3;
  }
  surfseg::save_scorer(res.model, out);
  std::cout << "pretrain epochs=" << res.epoch_loss.size() << " first_kld="
            << fmt_sig(res.epoch_loss.empty() ? 0.0 : res.epoch_loss.front(), 6)
            << " final_kld="
            << fmt_sig(res.epoch_loss.empty() ? 0.0 : res.epoch_loss.back(), 6) << "\n";
  return 0;
}

int cmd_finetune(const RunConfig& cfg_in, const std::string& data,
                 const std::string& model_in, const std::string& ckpt_in,
                 const std::string& out, std::optional<std::uint64_t> seed) {
  RunConfig cfg = cfg_in;
  if (seed) cfg.training.seed = *seed;
  const surfseg::Dataset train = surfseg::load_dataset(data, "train");
  const surfseg::Dataset val = surfseg::load_dataset(data, "val");

  surfseg::TrainState state;
  if (!ckpt_in.empty()) {
    state = surfseg::load_checkpoint(ckpt_in);
  } else if (!model_in.empty()) {
    state = surfseg::make_train_state(surfseg::load_scorer(model_in), cfg.training);
  } else {
    state = surfseg::make_oracle_state(cfg.training);
  }

  const surfseg::FinetuneResult res =
      surfseg::alternate_finetune(train, val, state, cfg.training);
  surfseg::save_checkpoint(res.state, out);
  if (res.diverged) {
    std::cerr << "fine-tuning aborted: " << res.message << "; snapshot written to "
              << out << "\n";
    return 3;
  }
  std::cout << "finetune rounds=" << cfg.training.rounds
            << " w=" << fmt_sig(res.state.smoothness_weight(), 6) << "\n";
  return 0;
}

struct MetricRow {
  std::optional<double> umsp, jm, pad, hd;
};

std::string metrics_json(const std::vector<MetricRow>& rows) {
  auto row_json = [](const MetricRow& r) {
    std::string s = "{";
    bool first = true;
    auto put = [&](const char* name, const std::optional<double>& v) {
      if (!v) return;
      if (!first) s += ", ";
      s += std::string("\"") + name + "\": " + fmt_sig(*v, 6);
      first = false;
    };
    put("umsp", r.umsp);
    put("jm", r.jm);
    put("pad", r.pad);
    put("hd", r.hd);
    return s + "}";
  };

  auto stats = [](std::vector<double> v) -> std::pair<double, double> {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var = v.size() > 1 ? var / static_cast<double>(v.size() - 1) : 0.0;
    return {mean, std::sqrt(var)};
  };

  std::string s = "{\n  \"samples\": [\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s += "    " + row_json(rows[i]);
    if (i + 1 < rows.size()) s += ",";
    s += "\n";
  }
  s += "  ],\n";
  MetricRow mean_row, std_row;
  auto collect = [&](auto member) {
    std::vector<double> v;
    for (const auto& r : rows) {
      if (r.*member) v.push_back(*(r.*member));
    }
    return v;
  };
  auto fill = [&](auto member) {
    std::vector<double> v = collect(member);
    if (v.empty()) return;
    auto [m, sd] = stats(v);
    mean_row.*member = m;
    std_row.*member = sd;
  };
  fill(&MetricRow::umsp);
  fill(&MetricRow::jm);
  fill(&MetricRow::pad);
  fill(&MetricRow::hd);
  s += "  \"mean\": " + row_json(mean_row) + ",\n";
  s += "  \"std\": " + row_json(std_row) + "\n}\n";
  return s;
}

MetricRow eval_pair(const surfseg::SurfaceTrace& pred, const surfseg::SurfaceTrace& truth,
                    const RunConfig& cfg, bool want_umsp, bool want_jm, bool want_pad,
                    bool want_hd) {
  MetricRow row;
  if (want_umsp) row.umsp = surfseg::umsp(pred, truth, cfg.spacing);
  if (want_jm || want_pad || want_hd) {
    if (!cfg.polar) {
      throw surfseg::Error(surfseg::ErrorCode::BadConfig,
                           "jm/pad/hd metrics require a 'polar' config section");
    }
    const surfseg::PolarSpec& ps = *cfg.polar;
    const auto c_pred = surfseg::surface_to_contour(pred, ps);
    const auto c_truth = surfseg::surface_to_contour(truth, ps);
    if (want_hd) row.hd = surfseg::hausdorff(c_pred, c_truth, cfg.spacing);
    if (want_jm || want_pad) {
      const int rows_ext = static_cast<int>(std::ceil(ps.center_y + ps.r_max)) + 2;
      const int cols_ext = static_cast<int>(std::ceil(ps.center_x + ps.r_max)) + 2;
      const auto m_pred = surfseg::contour_to_mask(c_pred, rows_ext, cols_ext);
      const auto m_truth = surfseg::contour_to_mask(c_truth, rows_ext, cols_ext);
      if (want_jm) row.jm = surfseg::jaccard(m_pred, m_truth);
      if (want_pad) row.pad = surfseg::pad(m_pred, m_truth);
    }
  }
  return row;
}

int cmd_eval(const RunConfig& cfg, const std::string& pred, const std::string& truth,
             const std::string& data, const std::string& split,
             const std::string& pred_dir, const std::string& metrics,
             const std::string& out) {
  bool want_umsp = false, want_jm = false, want_pad = false, want_hd = false;
  {
    std::string item;
    std::stringstream ss(metrics);
    while (std::getline(ss, item, ',')) {
      if (item == "umsp") want_umsp = true;
      else if (item == "jm") want_jm = true;
      else if (item == "pad") want_pad = true;
      else if (item == "hd") want_hd = true;
      else if (!item.empty()) {
        throw surfseg::Error(surfseg::ErrorCode::BadConfig, "unknown metric '" + item + "'");
      }
    }
  }

  std::vector<MetricRow> rows;
  if (!pred.empty()) {
    rows.push_back(eval_pair(surfseg::read_trace_csv(pred), surfseg::read_trace_csv(truth),
                             cfg, want_umsp, want_jm, want_pad, want_hd));
  } else {
    const surfseg::DatasetManifest manifest = surfseg::read_manifest(data);
    const fs::path dir = fs::path(data).parent_path();
    std::vector<std::pair<fs::path, fs::path>> pairs;
    for (const auto& ms : manifest.samples) {
      if (!split.empty() && ms.split != split) continue;
      std::string pred_name = ms.truth;
      const std::string key = "_truth";
      const auto pos = pred_name.rfind(key);
      if (pos != std::string::npos) pred_name.replace(pos, key.size(), "_pred");
      pairs.emplace_back(fs::path(pred_dir) / pred_name, dir / ms.truth);
    }
    if (pairs.empty()) {
      throw surfseg::Error(surfseg::ErrorCode::EmptySplit, "eval: no samples selected");
    }
    rows.resize(pairs.size());
    std::exception_ptr failure;
    std::mutex failure_mutex;
    surfseg::parallel_for(pairs.size(), [&](std::size_t k) {
      try {
        rows[k] = eval_pair(surfseg::read_trace_csv(pairs[k].first),
                            surfseg::read_trace_csv(pairs[k].second), cfg, want_umsp,
                            want_jm, want_pad, want_hd);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
    if (failure) std::rethrow_exception(failure);
  }

  const std::string text = metrics_json(rows);
  std::cout << text;
  if (!out.empty()) {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw surfseg::Error(surfseg::ErrorCode::IoError, "cannot write " + out);
    f << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surfseg: globally optimal terrain-surface segmentation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "Run configuration JSON (applies to all commands)");
  app.add_option("--seed", seed, "Seed override");

  // synth
  auto* sc_synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::string synth_out;
  sc_synth->add_option("--out", synth_out, "Output directory")->required();

  // fit-gauss
  auto* sc_fit = app.add_subcommand("fit-gauss", "Fit per-column Gaussians to a probability map");
  std::string fit_in, fit_out;
  double fit_tau = 1e-3;
  bool fit_report = false;
  sc_fit->add_option("--in", fit_in, "Probability map CSV")->required();
  sc_fit->add_option("--out", fit_out, "Output CSV (means line, sigmas line)")->required();
  sc_fit->add_option("--tau", fit_tau, "Relative weight cutoff");
  sc_fit->add_flag("--report", fit_report, "Append a 0/1 fallback-flag line");

  // smooth
  auto* sc_smooth = app.add_subcommand("smooth", "Solve the smoothing system for a Gaussian field");
  std::string smooth_in, smooth_out;
  double smooth_w = 0.0;
  bool smooth_energy = false, smooth_wrap = false;
  sc_smooth->add_option("--in", smooth_in, "Gaussian field CSV (means, sigmas)")->required();
  sc_smooth->add_option("--w", smooth_w, "Smoothness weight")->required();
  sc_smooth->add_option("--out", smooth_out, "Output surface CSV")->required();
  sc_smooth->add_flag("--energy", smooth_energy, "Print the optimal energy (12 significant digits)");
  sc_smooth->add_flag("--wrap", smooth_wrap, "Close the column chain into a ring");

  // infer
  auto* sc_infer = app.add_subcommand("infer", "Image -> probability map -> Gaussians -> surface");
  std::string infer_model, infer_image, infer_out;
  bool infer_no_sb = false, infer_report = false, infer_time = false;
  std::optional<double> infer_w;
  sc_infer->add_option("--model", infer_model, "Scorer model or training checkpoint")->required();
  sc_infer->add_option("--image", infer_image, "Input image CSV")->required();
  sc_infer->add_option("--out", infer_out, "Output surface CSV")->required();
  sc_infer->add_flag("--no-sb", infer_no_sb, "Skip smoothing; output the fitted means");
  sc_infer->add_option("--w", infer_w, "Smoothness weight override");
  sc_infer->add_flag("--report", infer_report, "Also write <out>.report.csv with the Gaussian field");
  sc_infer->add_flag("--time", infer_time, "Print per-stage wall times to stderr");

  // pretrain
  auto* sc_pre = app.add_subcommand("pretrain", "Pretrain the patch scorer with the KLD loss");
  std::string pre_data, pre_out;
  sc_pre->add_option("--data", pre_data, "Dataset manifest JSON")->required();
  sc_pre->add_option("--out", pre_out, "Output model file")->required();

  // finetune
  auto* sc_fine = app.add_subcommand("finetune", "Alternating fine-tune of scorer and smoothness weight");
  std::string fine_data, fine_model, fine_in, fine_out;
  sc_fine->add_option("--data", fine_data, "Dataset manifest JSON")->required();
  sc_fine->add_option("--model", fine_model, "Initial scorer model (fresh state)");
  sc_fine->add_option("--in", fine_in, "Checkpoint to resume from");
  sc_fine->add_option("--out", fine_out, "Output checkpoint")->required();

  // eval
  auto* sc_eval = app.add_subcommand("eval", "Evaluate predictions against ground truth");
  std::string eval_pred, eval_truth, eval_data, eval_split = "test", eval_pred_dir;
  std::string eval_metrics = "umsp", eval_out;
  sc_eval->add_option("--pred", eval_pred, "Single prediction CSV");
  sc_eval->add_option("--truth", eval_truth, "Single truth CSV");
  sc_eval->add_option("--data", eval_data, "Dataset manifest JSON (set mode)");
  sc_eval->add_option("--split", eval_split, "Manifest split to evaluate");
  sc_eval->add_option("--pred-dir", eval_pred_dir, "Directory of *_pred.csv files");
  sc_eval->add_option("--metrics", eval_metrics, "Comma list from umsp,jm,pad,hd");
  sc_eval->add_option("--out", eval_out, "Also write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const RunConfig cfg = load_config(config_path);
    if (sc_synth->parsed()) return cmd_synth(cfg, synth_out, seed);
    if (sc_fit->parsed()) return cmd_fit_gauss(fit_in, fit_out, fit_tau, fit_report);
    if (sc_smooth->parsed()) {
      return cmd_smooth(smooth_in, smooth_w, smooth_out, smooth_energy, smooth_wrap);
    }
    if (sc_infer->parsed()) {
      return cmd_infer(cfg, infer_model, infer_image, infer_out, infer_no_sb, infer_w,
                       infer_report, infer_time);
    }
    if (sc_pre->parsed()) return cmd_pretrain(cfg, pre_data, pre_out, seed);
    if (sc_fine->parsed()) {
      return cmd_finetune(cfg, fine_data, fine_model, fine_in, fine_out, seed);
    }
    if (sc_eval->parsed()) {
      if (eval_pred.empty() && eval_data.empty()) {
        throw surfseg::Error(surfseg::ErrorCode::BadConfig,
                             "eval: need --pred/--truth or --data/--pred-dir");
      }
      if (!eval_pred.empty() && eval_truth.empty()) {
        throw surfseg::Error(surfseg::ErrorCode::BadConfig, "eval: --pred requires --truth");
      }
      return cmd_eval(cfg, eval_pred, eval_truth, eval_data, eval_split, eval_pred_dir,
                      eval_metrics, eval_out);
    }
    return 2;
  } catch (const surfseg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.numeric() ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
