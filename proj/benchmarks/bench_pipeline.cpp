#include <benchmark/benchmark.h>

#include <cmath>

#include "surfseg/gauss_fit.hpp"
#include "surfseg/pipeline.hpp"
#include "surfseg/predictor.hpp"
#include "surfseg/rng.hpp"
#include "surfseg/smoothing.hpp"
#include "surfseg/synth.hpp"

using namespace surfseg;

namespace {

GaussianField random_field(int n, std::uint64_t seed) {
  CounterRng rng(seed);
  GaussianField gf;
  for (int i = 0; i < n; ++i) {
    gf.gamma.push_back(rng.uniform(0.0, 100.0));
    gf.sigma.push_back(rng.uniform(0.5, 20.0));
  }
  return gf;
}

void BM_TridiagSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SmoothSystem sys = assemble(random_field(n, 1), 2.5);
  for (auto _ : state) {
    SurfaceTrace x = solve(sys);
    benchmark::DoNotOptimize(x.x.data());
  }
  state.counters["n"] = n;
}

void BM_SolveBackward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GaussianField gf = random_field(n, 2);
  const SmoothSystem sys = assemble(gf, 2.5);
  const SurfaceTrace x = solve(sys);
  std::vector<double> g_up(static_cast<std::size_t>(n), 1.0);
  for (auto _ : state) {
    SmoothGradients g = backward(sys, gf, x, g_up);
    benchmark::DoNotOptimize(g.d_w);
  }
}

void BM_FitColumn(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> f(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double d = (j - 0.45 * n) / (0.05 * n);
    f[static_cast<std::size_t>(j)] = std::exp(-0.5 * d * d);
  }
  for (auto _ : state) {
    FitReport rep = fit_column(f);
    benchmark::DoNotOptimize(rep.gamma);
  }
}

void BM_FitField(benchmark::State& state) {
  SynthSpec spec;  // 60 x 512 bench geometry
  spec.seed = 3;
  const SurfaceTrace truth = gen_surface(spec);
  OracleNoiseSpec os;
  os.sigma_emit = 2.0;
  os.seed = 3;
  const Grid2 map = oracle_predict(os, truth, spec.n_rows);
  for (auto _ : state) {
    FieldFitResult fit = fit_field(map);
    benchmark::DoNotOptimize(fit.field.gamma.data());
  }
}

void BM_InferSlice(benchmark::State& state) {
  // Full slice: patch scoring, column softmax, per-column fits, one solve.
  SynthSpec spec;
  spec.n_cols = 128;
  spec.n_rows = 256;
  spec.seed = 4;
  const SurfaceTrace truth = gen_surface(spec);
  const Grid2 image = gen_image(truth, spec);
  LinearPatchScorer model(9, 9);
  CounterRng rng(5);
  for (double& w : model.weights) w = rng.normal(0.0, 0.05);
  const FitOptions opts;
  for (auto _ : state) {
    const Grid2 p = predict(model, image);
    InferResult res = infer_from_map(p, opts, 0.1, true);
    benchmark::DoNotOptimize(res.trace.x.data());
  }
}

}  // namespace

BENCHMARK(BM_TridiagSolve)->Arg(64)->Arg(512)->Arg(4096);
BENCHMARK(BM_SolveBackward)->Arg(512);
BENCHMARK(BM_FitColumn)->Arg(128)->Arg(512);
BENCHMARK(BM_FitField);
BENCHMARK(BM_InferSlice)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
