#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "surfseg/grid.hpp"
#include "surfseg/predictor.hpp"

namespace surfseg {

/// Parameters for deterministic terrain-like test data. All randomness flows
/// from `seed` through documented CounterRng streams (kSurface for harmonic
/// amplitudes/phases, kImageNoise for pixel noise, kSplit for the dataset
/// split); per-sample seeds come from derive_seed(seed, sample_index).
struct SynthSpec {
  int n_cols = 60;
  int n_rows = 512;
  double smoothness = 0.5;    // max |truth_{i+1} - truth_i|
  int n_harmonics = 2;
  double amplitude = 40.0;    // px, before slope/margin rescaling
  double ridge_width = 4.0;   // px, Gaussian ridge std
  double image_noise_std = 0.2;
  std::uint64_t seed = 0;
};

/// Seeded sum of harmonics, rescaled so the per-column slope never exceeds
/// spec.smoothness and the trace keeps a 3 * ridge_width margin from both
/// image borders. Throws SpecInfeasible when the margins cannot be met.
SurfaceTrace gen_surface(const SynthSpec& spec);

/// Gaussian ridge of width ridge_width along the truth, plus seeded pixel
/// noise of std image_noise_std.
Grid2 gen_image(const SurfaceTrace& truth, const SynthSpec& spec);

struct ManifestSample {
  std::string image;
  std::string truth;
  std::string probmap;  // empty unless oracle maps were emitted
  std::string split;    // "train" | "val" | "test"
};

struct DatasetManifest {
  SynthSpec spec;
  std::vector<ManifestSample> samples;
};

/// Writes per-sample image/truth CSVs (plus oracle probability maps when an
/// OracleNoiseSpec is given) and a manifest.json into out_dir. Split sizes
/// use largest-remainder rounding of the fractions; assignment is a seeded
/// shuffle. Returns the manifest that was written.
DatasetManifest gen_dataset(const SynthSpec& spec, int n_samples,
                            const std::array<double, 3>& split_fractions,
                            const std::filesystem::path& out_dir,
                            const std::optional<OracleNoiseSpec>& oracle = {});

DatasetManifest read_manifest(const std::filesystem::path& manifest_path);

}  // namespace surfseg
