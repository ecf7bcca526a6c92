#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "surfseg/gauss_fit.hpp"
#include "surfseg/synth.hpp"

using namespace surfseg;
namespace fs = std::filesystem;

TEST_CASE("gen_surface: zero harmonics is flat; seeds reproduce; slope bounded") {
  SynthSpec spec;
  spec.n_cols = 40;
  spec.n_rows = 128;
  spec.n_harmonics = 0;
  const SurfaceTrace flat = gen_surface(spec);
  for (int i = 1; i < 40; ++i) CHECK(flat[i] == flat[0]);

  spec.n_harmonics = 3;
  spec.seed = 44;
  const SurfaceTrace a = gen_surface(spec);
  const SurfaceTrace b = gen_surface(spec);
  CHECK(a.x == b.x);
  spec.seed = 45;
  const SurfaceTrace c = gen_surface(spec);
  CHECK(a.x != c.x);

  spec.smoothness = 0.5;
  for (std::uint64_t s = 0; s < 20; ++s) {
    spec.seed = s;
    const SurfaceTrace t = gen_surface(spec);
    for (int i = 0; i + 1 < 40; ++i) {
      CHECK(std::abs(t[i + 1] - t[i]) <= 0.5 + 1e-12);
    }
  }
}

TEST_CASE("gen_surface honors margins and rejects infeasible specs") {
  SynthSpec spec;
  spec.n_cols = 30;
  spec.n_rows = 64;
  spec.ridge_width = 3.0;  // margin 9
  spec.amplitude = 1000.0;
  spec.smoothness = 100.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    spec.seed = s;
    const SurfaceTrace t = gen_surface(spec);
    for (int i = 0; i < 30; ++i) {
      CHECK(t[i] >= 9.0 - 1e-9);
      CHECK(t[i] <= 63.0 - 9.0 + 1e-9);
      CHECK(t[i] > 0.0);
      CHECK(t[i] < 63.0);
    }
  }
  spec.ridge_width = 11.0;  // margin 33 >= (64-1)/2
  CHECK_THROWS_AS(gen_surface(spec), Error);
}

TEST_CASE("gen_image: ridge peaks at the truth and is seed-deterministic") {
  SynthSpec spec;
  spec.n_cols = 20;
  spec.n_rows = 64;
  spec.image_noise_std = 0.0;
  spec.seed = 12;
  const SurfaceTrace truth = gen_surface(spec);
  const Grid2 img = gen_image(truth, spec);
  const SurfaceTrace am = argmax_surface(img);
  for (int i = 0; i < 20; ++i) {
    CHECK(am[i] == doctest::Approx(std::round(truth[i])));
  }

  spec.image_noise_std = 0.2;
  const Grid2 noisy1 = gen_image(truth, spec);
  const Grid2 noisy2 = gen_image(truth, spec);
  CHECK(noisy1.data == noisy2.data);
  CHECK(noisy1.data != img.data);
}

TEST_CASE("noise-free image passes the fit exactness property per column") {
  SynthSpec spec;
  spec.n_cols = 16;
  spec.n_rows = 96;
  spec.ridge_width = 3.0;
  spec.image_noise_std = 0.0;
  spec.seed = 3;
  const SurfaceTrace truth = gen_surface(spec);
  Grid2 img = gen_image(truth, spec);
  img.kind = GridKind::ProbMap;
  const FieldFitResult fit = fit_field(img);
  for (int i = 0; i < 16; ++i) {
    REQUIRE(!fit.reports[static_cast<std::size_t>(i)].fallback_used);
    CHECK(std::abs(fit.field.gamma[static_cast<std::size_t>(i)] - truth[i]) < 1e-6);
    CHECK(std::abs(fit.field.sigma[static_cast<std::size_t>(i)] - 3.0) < 1e-6);
  }
}

TEST_CASE("gen_dataset writes exact split counts and reproducible manifests") {
  const fs::path dir = fs::temp_directory_path() / "surfseg_synth_test";
  fs::remove_all(dir);

  SynthSpec spec;
  spec.n_cols = 8;
  spec.n_rows = 32;
  spec.seed = 21;

  SUBCASE("all-train degenerate split") {
    const DatasetManifest m = gen_dataset(spec, 10, {1.0, 0.0, 0.0}, dir / "a");
    for (const auto& s : m.samples) CHECK(s.split == "train");
  }

  SUBCASE("60/20/20 on 100 samples") {
    const DatasetManifest m = gen_dataset(spec, 100, {0.6, 0.2, 0.2}, dir / "b");
    int train = 0, val = 0, test = 0;
    for (const auto& s : m.samples) {
      train += s.split == "train";
      val += s.split == "val";
      test += s.split == "test";
    }
    CHECK(train == 60);
    CHECK(val == 20);
    CHECK(test == 20);
  }

  SUBCASE("same seed gives byte-identical trees") {
    gen_dataset(spec, 6, {0.5, 0.25, 0.25}, dir / "c1");
    gen_dataset(spec, 6, {0.5, 0.25, 0.25}, dir / "c2");
    auto slurp = [](const fs::path& p) {
      std::ifstream f(p, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(f), {});
    };
    for (const auto& entry : fs::directory_iterator(dir / "c1")) {
      const fs::path other = dir / "c2" / entry.path().filename();
      CHECK(fs::exists(other));
      CHECK(slurp(entry.path()) == slurp(other));
    }
  }

  SUBCASE("fractions must sum to one") {
    CHECK_THROWS_AS(gen_dataset(spec, 10, {0.5, 0.2, 0.2}, dir / "d"), Error);
  }

  fs::remove_all(dir);
}

TEST_CASE("manifest round-trips through read_manifest") {
  const fs::path dir = fs::temp_directory_path() / "surfseg_manifest_test";
  fs::remove_all(dir);
  SynthSpec spec;
  spec.n_cols = 8;
  spec.n_rows = 32;
  spec.seed = 5;
  OracleNoiseSpec os;
  os.sigma_emit = 2.0;
  const DatasetManifest written = gen_dataset(spec, 4, {0.5, 0.25, 0.25}, dir, os);
  const DatasetManifest read = read_manifest(dir / "manifest.json");
  CHECK(read.spec.n_cols == spec.n_cols);
  CHECK(read.spec.seed == spec.seed);
  REQUIRE(read.samples.size() == written.samples.size());
  for (std::size_t k = 0; k < read.samples.size(); ++k) {
    CHECK(read.samples[k].image == written.samples[k].image);
    CHECK(read.samples[k].split == written.samples[k].split);
    CHECK(!read.samples[k].probmap.empty());
  }
  fs::remove_all(dir);
}
