#include "surfseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "surfseg/csv.hpp"
#include "surfseg/rng.hpp"

namespace surfseg {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

void check_spec(const SynthSpec& spec) {
  if (spec.n_cols <= 0 || spec.n_rows <= 0) {
    throw Error(ErrorCode::BadConfig, "synth: grid dimensions must be positive");
  }
  if (!(spec.ridge_width > 0.0)) {
    throw Error(ErrorCode::BadConfig, "synth: ridge_width must be positive");
  }
  if (spec.smoothness < 0.0 || spec.image_noise_std < 0.0 || spec.n_harmonics < 0) {
    throw Error(ErrorCode::BadConfig, "synth: negative parameter");
  }
}

}  // namespace

SurfaceTrace gen_surface(const SynthSpec& spec) {
  check_spec(spec);
  const double margin = 3.0 * spec.ridge_width;
  const double lo_bound = margin;
  const double hi_bound = spec.n_rows - 1.0 - margin;
  if (lo_bound >= hi_bound) {
    throw Error(ErrorCode::SpecInfeasible,
                "gen_surface: margins leave no feasible band (3*ridge_width too large)");
  }
  const double baseline = 0.5 * (lo_bound + hi_bound);

  CounterRng rng(spec.seed, rng_stream::kSurface);
  std::vector<double> amp(static_cast<std::size_t>(spec.n_harmonics));
  std::vector<double> phase(static_cast<std::size_t>(spec.n_harmonics));
  for (int k = 0; k < spec.n_harmonics; ++k) {
    amp[static_cast<std::size_t>(k)] =
        rng.uniform(-1.0, 1.0) * spec.amplitude / static_cast<double>(k + 1);
    phase[static_cast<std::size_t>(k)] = rng.uniform(0.0, kTwoPi);
  }

  const int n = spec.n_cols;
  std::vector<double> wave(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double v = 0.0;
    for (int k = 0; k < spec.n_harmonics; ++k) {
      v += amp[static_cast<std::size_t>(k)] *
           std::sin(kTwoPi * (k + 1) * i / static_cast<double>(n) +
                    phase[static_cast<std::size_t>(k)]);
    }
    wave[static_cast<std::size_t>(i)] = v;
  }

  double max_slope = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    max_slope = std::max(max_slope, std::abs(wave[i + 1] - wave[i]));
  }
  double scale = 1.0;
  if (max_slope > spec.smoothness && max_slope > 0.0) {
    scale = spec.smoothness / max_slope;
  }
  double lo = 0.0, hi = 0.0;
  for (double v : wave) {
    lo = std::min(lo, v * scale);
    hi = std::max(hi, v * scale);
  }
  const double half_band = 0.5 * (hi_bound - lo_bound);
  const double reach = std::max(std::abs(lo), std::abs(hi));
  if (reach > half_band && reach > 0.0) {
    scale *= half_band / reach;
  }

  SurfaceTrace t;
  t.x.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    t.x[static_cast<std::size_t>(i)] = baseline + scale * wave[static_cast<std::size_t>(i)];
  }
  return t;
}

Grid2 gen_image(const SurfaceTrace& truth, const SynthSpec& spec) {
  check_spec(spec);
  if (truth.n_cols() != spec.n_cols) {
    throw Error(ErrorCode::LengthMismatch, "gen_image: truth length mismatch");
  }
  Grid2 img(spec.n_rows, spec.n_cols, GridKind::Image);
  CounterRng rng(spec.seed, rng_stream::kImageNoise);
  for (int j = 0; j < spec.n_rows; ++j) {
    for (int i = 0; i < spec.n_cols; ++i) {
      const double d = (j - truth[i]) / spec.ridge_width;
      double v = std::exp(-0.5 * d * d);
      if (spec.image_noise_std > 0.0) v += rng.normal(0.0, spec.image_noise_std);
      img.at(j, i) = v;
    }
  }
  return img;
}

namespace {

nlohmann::json spec_to_json(const SynthSpec& s) {
  return {
      {"n_cols", s.n_cols},
      {"n_rows", s.n_rows},
      {"smoothness", s.smoothness},
      {"n_harmonics", s.n_harmonics},
      {"amplitude", s.amplitude},
      {"ridge_width", s.ridge_width},
      {"image_noise_std", s.image_noise_std},
      {"seed", s.seed},
  };
}

SynthSpec spec_from_json(const nlohmann::json& j) {
  SynthSpec s;
  s.n_cols = j.value("n_cols", s.n_cols);
  s.n_rows = j.value("n_rows", s.n_rows);
  s.smoothness = j.value("smoothness", s.smoothness);
  s.n_harmonics = j.value("n_harmonics", s.n_harmonics);
  s.amplitude = j.value("amplitude", s.amplitude);
  s.ridge_width = j.value("ridge_width", s.ridge_width);
  s.image_noise_std = j.value("image_noise_std", s.image_noise_std);
  s.seed = j.value("seed", s.seed);
  return s;
}

std::string sample_name(int index, const char* what) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "sample_%04d_%s.csv", index, what);
  return buf;
}

}  // namespace

DatasetManifest gen_dataset(const SynthSpec& spec, int n_samples,
                            const std::array<double, 3>& split_fractions,
                            const std::filesystem::path& out_dir,
                            const std::optional<OracleNoiseSpec>& oracle) {
  check_spec(spec);
  if (n_samples <= 0) {
    throw Error(ErrorCode::BadConfig, "gen_dataset: n_samples must be positive");
  }
  const double frac_sum = split_fractions[0] + split_fractions[1] + split_fractions[2];
  if (std::abs(frac_sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::BadConfig, "gen_dataset: split fractions must sum to 1");
  }

  // Largest-remainder split counts, then a seeded shuffle for assignment.
  std::array<int, 3> counts{};
  std::array<double, 3> rema{};
  int assigned = 0;
  for (int s = 0; s < 3; ++s) {
    const double exact = split_fractions[static_cast<std::size_t>(s)] * n_samples;
    counts[static_cast<std::size_t>(s)] = static_cast<int>(std::floor(exact));
    rema[static_cast<std::size_t>(s)] = exact - std::floor(exact);
    assigned += counts[static_cast<std::size_t>(s)];
  }
  while (assigned < n_samples) {
    int best = 0;
    for (int s = 1; s < 3; ++s) {
      if (rema[static_cast<std::size_t>(s)] > rema[static_cast<std::size_t>(best)]) best = s;
    }
    counts[static_cast<std::size_t>(best)] += 1;
    rema[static_cast<std::size_t>(best)] = -1.0;
    ++assigned;
  }

  std::vector<int> order(static_cast<std::size_t>(n_samples));
  std::iota(order.begin(), order.end(), 0);
  CounterRng split_rng(spec.seed, rng_stream::kSplit);
  for (int i = n_samples - 1; i > 0; --i) {
    const int j = static_cast<int>(split_rng.uniform_index(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  std::vector<std::string> split_of(static_cast<std::size_t>(n_samples));
  {
    int k = 0;
    const char* names[3] = {"train", "val", "test"};
    for (int s = 0; s < 3; ++s) {
      for (int c = 0; c < counts[static_cast<std::size_t>(s)]; ++c, ++k) {
        split_of[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = names[s];
      }
    }
  }

  std::filesystem::create_directories(out_dir);
  DatasetManifest manifest;
  manifest.spec = spec;
  manifest.samples.resize(static_cast<std::size_t>(n_samples));

  for (int k = 0; k < n_samples; ++k) {
    SynthSpec sample_spec = spec;
    sample_spec.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(k));
    const SurfaceTrace truth = gen_surface(sample_spec);
    const Grid2 image = gen_image(truth, sample_spec);

    ManifestSample& ms = manifest.samples[static_cast<std::size_t>(k)];
    ms.image = sample_name(k, "image");
    ms.truth = sample_name(k, "truth");
    ms.split = split_of[static_cast<std::size_t>(k)];
    write_grid_csv(image, out_dir / ms.image);
    write_trace_csv(truth, out_dir / ms.truth);
    if (oracle) {
      OracleNoiseSpec os = *oracle;
      os.seed = sample_spec.seed;
      const Grid2 probmap = oracle_predict(os, truth, spec.n_rows);
      ms.probmap = sample_name(k, "probmap");
      write_grid_csv(probmap, out_dir / ms.probmap);
    }
  }

  nlohmann::json j;
  j["spec"] = spec_to_json(spec);
  j["samples"] = nlohmann::json::array();
  for (const auto& ms : manifest.samples) {
    nlohmann::json js = {{"image", ms.image}, {"truth", ms.truth}, {"split", ms.split}};
    if (!ms.probmap.empty()) js["probmap"] = ms.probmap;
    j["samples"].push_back(js);
  }
  std::ofstream f(out_dir / "manifest.json", std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write manifest.json");
  f << j.dump(2) << '\n';
  return manifest;
}

DatasetManifest read_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream f(manifest_path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open manifest: " + manifest_path.string());
  nlohmann::json j = nlohmann::json::parse(f, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::IoError, manifest_path.string() + ": malformed manifest JSON");
  }
  DatasetManifest manifest;
  manifest.spec = spec_from_json(j.value("spec", nlohmann::json::object()));
  for (const auto& js : j.value("samples", nlohmann::json::array())) {
    ManifestSample ms;
    ms.image = js.value("image", "");
    ms.truth = js.value("truth", "");
    ms.probmap = js.value("probmap", "");
    ms.split = js.value("split", "");
    manifest.samples.push_back(ms);
  }
  return manifest;
}

}  // namespace surfseg
