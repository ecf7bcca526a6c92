#include "surfseg/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "surfseg/rng.hpp"

namespace surfseg {

namespace {
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
}

PolarSpec PolarSpec::centered(const Grid2& img) {
  PolarSpec spec;
  spec.center_x = 0.5 * (img.n_cols - 1);
  spec.center_y = 0.5 * (img.n_rows - 1);
  spec.r_max = 0.5 * std::min(img.n_cols, img.n_rows);
  return spec;
}

double bilinear_sample(const Grid2& img, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(img.n_cols - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.n_rows - 1));
  const int c0 = std::min(static_cast<int>(std::floor(x)), img.n_cols - 2 >= 0 ? img.n_cols - 2 : 0);
  const int r0 = std::min(static_cast<int>(std::floor(y)), img.n_rows - 2 >= 0 ? img.n_rows - 2 : 0);
  const int c1 = std::min(c0 + 1, img.n_cols - 1);
  const int r1 = std::min(r0 + 1, img.n_rows - 1);
  const double fx = x - c0;
  const double fy = y - r0;
  const double top = img.at(r0, c0) * (1.0 - fx) + img.at(r0, c1) * fx;
  const double bot = img.at(r1, c0) * (1.0 - fx) + img.at(r1, c1) * fx;
  return top * (1.0 - fy) + bot * fy;
}

namespace {

void check_polar(const PolarSpec& spec) {
  if (spec.n_angles < 2 || spec.n_radii < 2 || !(spec.r_max > 0.0)) {
    throw Error(ErrorCode::BadConfig, "polar spec: need n_angles, n_radii >= 2 and r_max > 0");
  }
}

double radius_of_row(double row, const PolarSpec& spec) {
  return (row + 0.5) * spec.r_max / spec.n_radii;
}

}  // namespace

Grid2 to_polar(const Grid2& img, const PolarSpec& spec) {
  check_polar(spec);
  Grid2 out(spec.n_radii, spec.n_angles, img.kind);
  for (int j = 0; j < spec.n_radii; ++j) {
    const double r = radius_of_row(j, spec);
    for (int i = 0; i < spec.n_angles; ++i) {
      const double th = kTwoPi * i / spec.n_angles;
      out.at(j, i) = bilinear_sample(img, spec.center_x + r * std::cos(th),
                                     spec.center_y + r * std::sin(th));
    }
  }
  return out;
}

std::vector<Point2> surface_to_contour(const SurfaceTrace& x, const PolarSpec& spec) {
  check_polar(spec);
  if (x.n_cols() != spec.n_angles) {
    throw Error(ErrorCode::LengthMismatch, "surface_to_contour: trace length != n_angles");
  }
  std::vector<Point2> pts(static_cast<std::size_t>(spec.n_angles));
  for (int i = 0; i < spec.n_angles; ++i) {
    const double r = radius_of_row(x[i], spec);
    const double th = kTwoPi * i / spec.n_angles;
    pts[static_cast<std::size_t>(i)] = {spec.center_x + r * std::cos(th),
                                        spec.center_y + r * std::sin(th)};
  }
  return pts;
}

namespace {

TrainingSample apply_mirror(const TrainingSample& in) {
  TrainingSample out;
  out.image = Grid2(in.image.n_rows, in.image.n_cols, in.image.kind);
  out.truth.x.resize(in.truth.x.size());
  const int n = in.image.n_cols;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < in.image.n_rows; ++j) {
      out.image.at(j, i) = in.image.at(j, n - 1 - i);
    }
    out.truth[i] = in.truth[n - 1 - i];
  }
  return out;
}

TrainingSample apply_circ_shift(const TrainingSample& in, int amount) {
  const int n = in.image.n_cols;
  const int k = ((amount % n) + n) % n;
  TrainingSample out;
  out.image = Grid2(in.image.n_rows, in.image.n_cols, in.image.kind);
  out.truth.x.resize(in.truth.x.size());
  for (int i = 0; i < n; ++i) {
    const int src = ((i - k) % n + n) % n;
    for (int j = 0; j < in.image.n_rows; ++j) {
      out.image.at(j, i) = in.image.at(j, src);
    }
    out.truth[i] = in.truth[src];
  }
  return out;
}

TrainingSample apply_crop_resize(const TrainingSample& in, double frac, CounterRng& rng) {
  const int n_rows = in.image.n_rows;
  const int n_cols = in.image.n_cols;
  const int crop_rows = std::max(2, static_cast<int>(std::lround(frac * n_rows)));
  const int crop_cols = std::max(2, static_cast<int>(std::lround(frac * n_cols)));
  const int r0 = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n_rows - crop_rows + 1)));
  const int c0 = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n_cols - crop_cols + 1)));

  TrainingSample out;
  out.image = Grid2(n_rows, n_cols, in.image.kind);
  out.truth.x.resize(in.truth.x.size());
  const double row_ratio = static_cast<double>(crop_rows) / n_rows;
  const double col_ratio = static_cast<double>(crop_cols) / n_cols;
  for (int j = 0; j < n_rows; ++j) {
    const double src_y = r0 + (j + 0.5) * row_ratio - 0.5;
    for (int i = 0; i < n_cols; ++i) {
      const double src_x = c0 + (i + 0.5) * col_ratio - 0.5;
      out.image.at(j, i) = bilinear_sample(in.image, src_x, src_y);
    }
  }
  // Truth: sample the original trace at the source column, then map the row
  // coordinate through the inverse of the resize.
  for (int i = 0; i < n_cols; ++i) {
    const double src_x = std::clamp(c0 + (i + 0.5) * col_ratio - 0.5, 0.0,
                                    static_cast<double>(n_cols - 1));
    const int i0 = std::min(static_cast<int>(std::floor(src_x)), n_cols - 2 >= 0 ? n_cols - 2 : 0);
    const int i1 = std::min(i0 + 1, n_cols - 1);
    const double fx = src_x - i0;
    const double t_src = in.truth[i0] * (1.0 - fx) + in.truth[i1] * fx;
    out.truth[i] = (t_src + 0.5 - r0) / row_ratio - 0.5;
  }
  return out;
}

}  // namespace

AugmentResult augment(const TrainingSample& sample,
                      const std::vector<AugmentOp>& ops, std::uint64_t seed) {
  AugmentResult res;
  res.sample = sample;
  CounterRng rng(seed, rng_stream::kAugment);
  for (const AugmentOp& op : ops) {
    TrainingSample& cur = res.sample;
    const int n_rows = cur.image.n_rows;
    const int n_cols = cur.image.n_cols;
    switch (op.kind) {
      case AugmentKind::Mirror:
        cur = apply_mirror(cur);
        break;
      case AugmentKind::CircShift: {
        const int amount = op.has_param
                               ? static_cast<int>(op.param)
                               : static_cast<int>(rng.uniform_index(
                                     static_cast<std::uint64_t>(n_cols)));
        cur = apply_circ_shift(cur, amount);
        break;
      }
      case AugmentKind::GaussianNoise: {
        for (int j = 0; j < n_rows; ++j) {
          for (int i = 0; i < n_cols; ++i) {
            cur.image.at(j, i) += rng.normal(0.0, op.param);
          }
        }
        break;
      }
      case AugmentKind::SaltPepper: {
        double lo = cur.image.data[0], hi = cur.image.data[0];
        for (double v : cur.image.data) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        for (int j = 0; j < n_rows; ++j) {
          for (int i = 0; i < n_cols; ++i) {
            if (rng.uniform() < op.param) {
              cur.image.at(j, i) = rng.uniform() < 0.5 ? lo : hi;
            }
          }
        }
        break;
      }
      case AugmentKind::CropResize:
        cur = apply_crop_resize(cur, op.param, rng);
        break;
      case AugmentKind::AxialTranslate: {
        const int delta = static_cast<int>(op.param);
        Grid2 rolled(n_rows, n_cols, cur.image.kind);
        for (int j = 0; j < n_rows; ++j) {
          const int src = ((j - delta) % n_rows + n_rows) % n_rows;
          for (int i = 0; i < n_cols; ++i) rolled.at(j, i) = cur.image.at(src, i);
        }
        cur.image = std::move(rolled);
        for (double& t : cur.truth.x) {
          t += delta;
          if (t < 0.0 || t > n_rows - 1.0) {
            t = std::clamp(t, 0.0, static_cast<double>(n_rows - 1));
            res.truth_clipped = true;
          }
        }
        break;
      }
    }
  }
  return res;
}

}  // namespace surfseg
