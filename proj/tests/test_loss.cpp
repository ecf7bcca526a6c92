#include <doctest.h>

#include <cmath>
#include <vector>

#include "support/oracles.hpp"
#include "surfseg/adam.hpp"
#include "surfseg/loss.hpp"
#include "surfseg/rng.hpp"

using namespace surfseg;

TEST_CASE("make_targets builds normalized columns peaked at the truth") {
  const GaussianTargets t = make_targets(SurfaceTrace({2.0}), 5, 0.1);
  // sigma = 0.5: unnormalized densities (e^-8, e^-2, 1, e^-2, e^-8)
  double sum = 0.0;
  for (int j = 0; j < 5; ++j) sum += t.t_map.at(j, 0);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  const double z = std::exp(-8.0) + std::exp(-2.0) + 1.0 + std::exp(-2.0) + std::exp(-8.0);
  CHECK(t.t_map.at(2, 0) == doctest::Approx(1.0 / z).epsilon(1e-12));
  CHECK(t.t_map.at(1, 0) == doctest::Approx(std::exp(-2.0) / z).epsilon(1e-12));
  CHECK(t.t_map.at(0, 0) == doctest::Approx(std::exp(-8.0) / z).epsilon(1e-12));
  for (int j = 0; j < 5; ++j) CHECK(t.t_map.at(j, 0) <= t.t_map.at(2, 0));
}

TEST_CASE("make_targets: tiny sigma approaches one-hot, half-integer truth ties") {
  const GaussianTargets sharp = make_targets(SurfaceTrace({2.0}), 5, 0.002);
  CHECK(sharp.t_map.at(2, 0) == doctest::Approx(1.0).epsilon(1e-9));

  const GaussianTargets tie = make_targets(SurfaceTrace({2.5}), 5, 0.1);
  CHECK(tie.t_map.at(2, 0) == doctest::Approx(tie.t_map.at(3, 0)).epsilon(1e-12));
  CHECK(tie.t_map.at(2, 0) > tie.t_map.at(1, 0));
}

TEST_CASE("make_targets rejects out-of-range truth") {
  CHECK_THROWS_AS(make_targets(SurfaceTrace({5.0}), 5, 0.1), Error);
  CHECK_THROWS_AS(make_targets(SurfaceTrace({-0.1}), 5, 0.1), Error);
}

TEST_CASE("kld_loss identities and the two-term fixture") {
  const GaussianTargets t = make_targets(SurfaceTrace({7.0, 9.5}), 20, 0.1);

  SUBCASE("identical distributions give zero loss") {
    const KldResult r = kld_loss(t.t_map, t);
    CHECK(r.loss == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("two-term fixture") {
    GaussianTargets fixture;
    fixture.t_map = Grid2(2, 1, GridKind::ProbMap);
    fixture.t_map.at(0, 0) = 0.5;
    fixture.t_map.at(1, 0) = 0.5;
    Grid2 p(2, 1, GridKind::ProbMap);
    p.at(0, 0) = 0.25;
    p.at(1, 0) = 0.75;
    const KldResult r = kld_loss(p, fixture);
    CHECK(r.loss == doctest::Approx(0.143841).epsilon(1e-5));
    CHECK(r.grad.at(0, 0) == doctest::Approx(-0.5 / 0.25));
    CHECK(r.grad.at(1, 0) == doctest::Approx(-0.5 / 0.75));
  }

  SUBCASE("flooring keeps the loss finite") {
    Grid2 p(2, 1, GridKind::ProbMap);
    p.at(0, 0) = 0.0;
    p.at(1, 0) = 1.0;
    GaussianTargets fixture;
    fixture.t_map = Grid2(2, 1, GridKind::ProbMap);
    fixture.t_map.at(0, 0) = 0.5;
    fixture.t_map.at(1, 0) = 0.5;
    const KldResult r = kld_loss(p, fixture);
    CHECK(std::isfinite(r.loss));
    CHECK(r.loss > 0.0);
  }

  SUBCASE("non-distribution columns are rejected") {
    Grid2 p(2, 1, GridKind::ProbMap);
    p.at(0, 0) = 0.4;
    p.at(1, 0) = 0.4;
    GaussianTargets fixture;
    fixture.t_map = Grid2(2, 1, GridKind::ProbMap);
    fixture.t_map.at(0, 0) = 0.5;
    fixture.t_map.at(1, 0) = 0.5;
    CHECK_THROWS_AS(kld_loss(p, fixture), Error);
  }
}

TEST_CASE("kld_loss is nonnegative and zero only at equality") {
  CounterRng rng(19);
  const GaussianTargets t = make_targets(SurfaceTrace({6.0, 3.3, 9.1}), 16, 0.12);
  for (int trial = 0; trial < 50; ++trial) {
    Grid2 p(16, 3, GridKind::ProbMap);
    for (int i = 0; i < 3; ++i) {
      double sum = 0.0;
      for (int j = 0; j < 16; ++j) {
        p.at(j, i) = rng.uniform(1e-4, 1.0);
        sum += p.at(j, i);
      }
      for (int j = 0; j < 16; ++j) p.at(j, i) /= sum;
    }
    const KldResult r = kld_loss(p, t);
    CHECK(r.loss > 0.0);
  }
}

TEST_CASE("mse_loss and its gradient") {
  const MseResult zero = mse_loss(SurfaceTrace({1.0, 2.0}), SurfaceTrace({1.0, 2.0}));
  CHECK(zero.loss == 0.0);
  CHECK(zero.grad == std::vector<double>{0.0, 0.0});

  const MseResult r = mse_loss(SurfaceTrace({2.0, 1.0}), SurfaceTrace({1.0, 2.0}));
  CHECK(r.loss == doctest::Approx(2.0));
  CHECK(r.grad == std::vector<double>{2.0, -2.0});

  const MseResult half = mse_loss(SurfaceTrace({0.5, 0.0, 0.0}), SurfaceTrace({0.0, 0.0, 0.0}));
  CHECK(half.loss == doctest::Approx(0.25));

  CHECK_THROWS_AS(mse_loss(SurfaceTrace({1.0}), SurfaceTrace({1.0, 2.0})), Error);
}

TEST_CASE("mse gradient matches finite differences to 1e-8") {
  CounterRng rng(23);
  SurfaceTrace x, t;
  for (int i = 0; i < 6; ++i) {
    x.x.push_back(rng.uniform(-5.0, 5.0));
    t.x.push_back(rng.uniform(-5.0, 5.0));
  }
  const MseResult r = mse_loss(x, t);
  for (int i = 0; i < 6; ++i) {
    const double fd = oracle::central_diff(
        [&](double v) {
          SurfaceTrace probe = x;
          probe[i] = v;
          return mse_loss(probe, t).loss;
        },
        x[i], 1e-6);
    CHECK(std::abs(r.grad[static_cast<std::size_t>(i)] - fd) < 1e-8);
  }
}

TEST_CASE("adam first step and basic properties") {
  SUBCASE("unit gradient moves the parameter by ~lr") {
    std::vector<double> p = {1.0};
    AdamState st(1);
    adam_step(p, std::vector<double>{1.0}, st, 0.01);
    // m_hat = 1, v_hat = 1 after bias correction.
    CHECK(p[0] == doctest::Approx(1.0 - 0.01 / (1.0 + 1e-8)).epsilon(1e-12));
  }

  SUBCASE("zero gradients leave parameters unchanged") {
    std::vector<double> p = {3.0, -2.0};
    AdamState st(2);
    for (int k = 0; k < 10; ++k) {
      adam_step(p, std::vector<double>{0.0, 0.0}, st, 0.1);
    }
    CHECK(p == std::vector<double>{3.0, -2.0});
  }

  SUBCASE("first step opposes the gradient sign") {
    CounterRng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const double g = rng.uniform(-3.0, 3.0);
      if (g == 0.0) continue;
      std::vector<double> p = {0.0};
      AdamState st(1);
      adam_step(p, std::vector<double>{g}, st, 0.05);
      CHECK(p[0] * g < 0.0);
    }
  }

  SUBCASE("non-finite gradients are rejected") {
    std::vector<double> p = {0.0};
    AdamState st(1);
    CHECK_THROWS_AS(
        adam_step(p, std::vector<double>{std::nan("")}, st, 0.1), Error);
  }

  SUBCASE("identical seeds give identical trajectories") {
    auto run = [] {
      CounterRng rng(77);
      std::vector<double> p = {0.5, -0.25, 1.5};
      AdamState st(3);
      for (int k = 0; k < 25; ++k) {
        std::vector<double> g(3);
        for (double& v : g) v = rng.normal();
        adam_step(p, g, st, 0.02);
      }
      return p;
    };
    CHECK(run() == run());
  }
}
