#include <doctest.h>

#include <cmath>
#include <vector>

#include "surfseg/metrics.hpp"
#include "surfseg/rng.hpp"

using namespace surfseg;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<Point2> regular_polygon(double cx, double cy, double r, int n) {
  std::vector<Point2> pts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * kPi * i / n;
    pts[static_cast<std::size_t>(i)] = {cx + r * std::cos(th), cy + r * std::sin(th)};
  }
  return pts;
}

RegionMask square_mask(int rows, int cols, int r0, int c0, int size) {
  RegionMask m(rows, cols);
  for (int r = r0; r < r0 + size; ++r) {
    for (int c = c0; c < c0 + size; ++c) m.at(r, c) = 1;
  }
  return m;
}

}  // namespace

TEST_CASE("umsp fixtures") {
  CHECK(umsp(SurfaceTrace({3.0, 4.0}), SurfaceTrace({3.0, 4.0}), {}) == 0.0);
  CHECK(umsp(SurfaceTrace({1.0, 0.0}), SurfaceTrace({0.0, 1.0}), {3.24, "um"}) ==
        doctest::Approx(3.24));
  CHECK(umsp(SurfaceTrace({2.0, 0.0, -2.0}), SurfaceTrace({0.0, 0.0, 0.0}), {}) ==
        doctest::Approx(4.0 / 3.0));
  CHECK_THROWS_AS(umsp(SurfaceTrace({1.0}), SurfaceTrace({1.0, 2.0}), {}), Error);
}

TEST_CASE("umsp is symmetric and linear in spacing") {
  CounterRng rng(3);
  SurfaceTrace a, b;
  for (int i = 0; i < 12; ++i) {
    a.x.push_back(rng.uniform(0.0, 50.0));
    b.x.push_back(rng.uniform(0.0, 50.0));
  }
  CHECK(umsp(a, b, {}) == umsp(b, a, {}));
  CHECK(umsp(a, b, {2.5, "um"}) == doctest::Approx(2.5 * umsp(a, b, {})));
}

TEST_CASE("contour_to_mask on an axis-aligned square") {
  const std::vector<Point2> square = {{0.5, 0.5}, {3.5, 0.5}, {3.5, 3.5}, {0.5, 3.5}};
  const RegionMask m = contour_to_mask(square, 6, 6);
  CHECK(m.count() == 9);
  for (int r = 1; r <= 3; ++r) {
    for (int c = 1; c <= 3; ++c) CHECK(m.at(r, c) == 1);
  }
}

TEST_CASE("pixel centers exactly on the boundary count as inside") {
  const std::vector<Point2> square = {{1.0, 1.0}, {3.0, 1.0}, {3.0, 3.0}, {1.0, 3.0}};
  const RegionMask m = contour_to_mask(square, 6, 6);
  CHECK(m.at(1, 1) == 1);  // corner on the contour
  CHECK(m.at(1, 2) == 1);  // edge midpoint
  CHECK(m.count() == 9);
}

TEST_CASE("polygon outside the extent gives an empty mask") {
  const std::vector<Point2> tri = {{10.0, 10.0}, {12.0, 10.0}, {11.0, 12.0}};
  const RegionMask m = contour_to_mask(tri, 5, 5);
  CHECK(m.count() == 0);
}

TEST_CASE("degenerate polygons are rejected") {
  const std::vector<Point2> line = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}};
  CHECK_THROWS_AS(contour_to_mask(line, 4, 4), Error);
  CHECK_THROWS_AS(contour_to_mask({{0, 0}, {1, 1}}, 4, 4), Error);
}

TEST_CASE("256-gon pixel count approximates the circle area within 1%") {
  const auto poly = regular_polygon(64.0, 64.0, 50.0, 256);
  const RegionMask m = contour_to_mask(poly, 128, 128);
  const double circle = kPi * 50.0 * 50.0;
  CHECK(std::abs(static_cast<double>(m.count()) - circle) <= 0.01 * circle);
}

TEST_CASE("jaccard fixtures and properties") {
  const RegionMask a = square_mask(8, 8, 1, 1, 2);
  CHECK(jaccard(a, a) == 1.0);

  const RegionMask b = square_mask(8, 8, 5, 5, 2);
  CHECK(jaccard(a, b) == 0.0);

  // Two 2x2 squares overlapping in 2 pixels: union 6, intersection 2.
  const RegionMask c = square_mask(8, 8, 1, 2, 2);
  CHECK(jaccard(a, c) == doctest::Approx(1.0 / 3.0));

  const RegionMask empty1(8, 8), empty2(8, 8);
  CHECK(jaccard(empty1, empty2) == 1.0);

  CHECK_THROWS_AS(jaccard(a, RegionMask(4, 4)), Error);

  CounterRng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    RegionMask x(6, 6), y(6, 6);
    for (auto& v : x.inside) v = rng.uniform() < 0.4;
    for (auto& v : y.inside) v = rng.uniform() < 0.4;
    const double jxy = jaccard(x, y);
    CHECK(jxy == jaccard(y, x));
    CHECK(jxy >= 0.0);
    CHECK(jxy <= 1.0);
    CHECK((jxy == 1.0) == (x.inside == y.inside));
  }
}

TEST_CASE("pad fixtures") {
  const RegionMask t = square_mask(16, 16, 2, 2, 10);  // 100 px
  CHECK(pad(t, t) == 0.0);
  RegionMask bigger = t;
  for (int c = 2; c < 12; ++c) bigger.at(12, c) = 1;  // +10 px
  CHECK(pad(bigger, t) == doctest::Approx(0.10));
  const RegionMask empty(16, 16);
  CHECK(pad(empty, t) == doctest::Approx(1.0));
  CHECK_THROWS_AS(pad(t, empty), Error);
}

TEST_CASE("hausdorff fixtures") {
  const std::vector<Point2> a = {{0.0, 0.0}};
  CHECK(hausdorff(a, a, {}) == 0.0);
  CHECK(hausdorff(a, {{3.0, 4.0}}, {}) == doctest::Approx(5.0));
  CHECK(hausdorff({{0.0, 0.0}, {10.0, 0.0}}, {{0.0, 0.0}}, {}) == doctest::Approx(10.0));
  CHECK(hausdorff(a, {{3.0, 4.0}}, {2.0, "um"}) == doctest::Approx(10.0));
  CHECK_THROWS_AS(hausdorff({}, a, {}), Error);
}

TEST_CASE("hausdorff is a metric on finite point sets") {
  CounterRng rng(23);
  auto random_set = [&](int n) {
    std::vector<Point2> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) p = {rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
    return pts;
  };
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_set(1 + static_cast<int>(rng.uniform_index(8)));
    const auto b = random_set(1 + static_cast<int>(rng.uniform_index(8)));
    const auto c = random_set(1 + static_cast<int>(rng.uniform_index(8)));
    const double ab = hausdorff(a, b, {});
    const double ba = hausdorff(b, a, {});
    const double ac = hausdorff(a, c, {});
    const double cb = hausdorff(c, b, {});
    CHECK(ab == ba);
    CHECK(ab >= 0.0);
    CHECK(hausdorff(a, a, {}) == 0.0);
    CHECK(ab <= ac + cb + 1e-12);
  }
}
