#include "surfseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace surfseg {

double umsp(const SurfaceTrace& pred, const SurfaceTrace& truth,
            const PixelSpacing& spacing) {
  if (pred.n_cols() != truth.n_cols()) {
    throw Error(ErrorCode::LengthMismatch, "umsp: length mismatch");
  }
  if (pred.n_cols() == 0) {
    throw Error(ErrorCode::LengthMismatch, "umsp: empty traces");
  }
  double acc = 0.0;
  for (int i = 0; i < pred.n_cols(); ++i) acc += std::abs(pred[i] - truth[i]);
  return acc / pred.n_cols() * spacing.row_spacing;
}

namespace {

bool on_segment(double px, double py, const Point2& a, const Point2& b) {
  const double cross = (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
  const double seg2 = (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y);
  if (cross * cross > 1e-24 * std::max(seg2, 1.0)) return false;
  const double dot = (px - a.x) * (b.x - a.x) + (py - a.y) * (b.y - a.y);
  return dot >= -1e-12 && dot <= seg2 + 1e-12;
}

bool point_in_polygon(double px, double py, const std::vector<Point2>& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& pi = poly[i];
    const Point2& pj = poly[j];
    if (on_segment(px, py, pj, pi)) return true;  // boundary counts as inside
    if ((pi.y > py) != (pj.y > py)) {
      const double x_int = pj.x + (py - pj.y) * (pi.x - pj.x) / (pi.y - pj.y);
      if (px < x_int) inside = !inside;
    }
  }
  return inside;
}

double polygon_area(const std::vector<Point2>& poly) {
  double acc = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    acc += poly[j].x * poly[i].y - poly[i].x * poly[j].y;
  }
  return 0.5 * std::abs(acc);
}

}  // namespace

RegionMask contour_to_mask(const std::vector<Point2>& contour, int n_rows, int n_cols) {
  if (contour.size() < 3) {
    throw Error(ErrorCode::EmptyRegion, "contour_to_mask: need at least 3 points");
  }
  if (polygon_area(contour) <= 0.0) {
    throw Error(ErrorCode::EmptyRegion, "contour_to_mask: degenerate polygon");
  }
  // Bounding box keeps the scan affordable for small contours in big grids.
  double lo_x = contour[0].x, hi_x = contour[0].x;
  double lo_y = contour[0].y, hi_y = contour[0].y;
  for (const Point2& p : contour) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  const int r_begin = std::max(0, static_cast<int>(std::floor(lo_y)));
  const int r_end = std::min(n_rows - 1, static_cast<int>(std::ceil(hi_y)));
  const int c_begin = std::max(0, static_cast<int>(std::floor(lo_x)));
  const int c_end = std::min(n_cols - 1, static_cast<int>(std::ceil(hi_x)));

  RegionMask mask(n_rows, n_cols);
  for (int r = r_begin; r <= r_end; ++r) {
    for (int c = c_begin; c <= c_end; ++c) {
      if (point_in_polygon(static_cast<double>(c), static_cast<double>(r), contour)) {
        mask.at(r, c) = 1;
      }
    }
  }
  return mask;
}

double jaccard(const RegionMask& a, const RegionMask& b) {
  if (a.n_rows != b.n_rows || a.n_cols != b.n_cols) {
    throw Error(ErrorCode::ExtentMismatch, "jaccard: extent mismatch");
  }
  long long inter = 0, uni = 0;
  for (std::size_t k = 0; k < a.inside.size(); ++k) {
    const bool av = a.inside[k] != 0;
    const bool bv = b.inside[k] != 0;
    inter += av && bv;
    uni += av || bv;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double pad(const RegionMask& a, const RegionMask& b_truth) {
  if (a.n_rows != b_truth.n_rows || a.n_cols != b_truth.n_cols) {
    throw Error(ErrorCode::ExtentMismatch, "pad: extent mismatch");
  }
  const long long truth_area = b_truth.count();
  if (truth_area == 0) {
    throw Error(ErrorCode::EmptyRegion, "pad: empty truth region");
  }
  const long long pred_area = a.count();
  return static_cast<double>(std::llabs(pred_area - truth_area)) /
         static_cast<double>(truth_area);
}

namespace {

double directed_hausdorff(const std::vector<Point2>& from, const std::vector<Point2>& to) {
  double worst = 0.0;
  for (const Point2& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point2& q : to) {
      const double dx = p.x - q.x;
      const double dy = p.y - q.y;
      best = std::min(best, dx * dx + dy * dy);
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

}  // namespace

double hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b,
                 const PixelSpacing& spacing) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::EmptyRegion, "hausdorff: empty point set");
  }
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a)) *
         spacing.row_spacing;
}

}  // namespace surfseg
