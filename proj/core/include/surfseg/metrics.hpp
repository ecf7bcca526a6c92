#pragma once

#include <vector>

#include "surfseg/geometry.hpp"
#include "surfseg/grid.hpp"

namespace surfseg {

/// Boolean pixel mask over a grid extent.
struct RegionMask {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<char> inside;

  RegionMask() = default;
  RegionMask(int rows, int cols)
      : n_rows(rows), n_cols(cols),
        inside(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0) {}

  char& at(int row, int col) {
    return inside[static_cast<std::size_t>(row) * n_cols + col];
  }
  char at(int row, int col) const {
    return inside[static_cast<std::size_t>(row) * n_cols + col];
  }

  long long count() const {
    long long n = 0;
    for (char v : inside) n += v != 0;
    return n;
  }
};

/// Unsigned mean surface positioning error in physical units:
/// mean_i |pred_i - truth_i| * spacing.row_spacing.
double umsp(const SurfaceTrace& pred, const SurfaceTrace& truth,
            const PixelSpacing& spacing = {});

/// Rasterizes a closed polygon with the even-odd rule on pixel centers
/// (pixel (r, c) has center x = c, y = r). Centers exactly on an edge count
/// as inside. Throws EmptyRegion for degenerate (zero-area) polygons.
RegionMask contour_to_mask(const std::vector<Point2>& contour, int n_rows, int n_cols);

/// |a AND b| / |a OR b|; 1 when both masks are empty.
double jaccard(const RegionMask& a, const RegionMask& b);

/// |area(a) - area(truth)| / area(truth).
double pad(const RegionMask& a, const RegionMask& b_truth);

/// Symmetric Hausdorff distance between point sets, in physical units.
double hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b,
                 const PixelSpacing& spacing = {});

}  // namespace surfseg
