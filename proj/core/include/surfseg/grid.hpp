#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "surfseg/error.hpp"

namespace surfseg {

enum class GridKind { Image, ProbMap };

/// Dense 2-D scalar field, n_rows x n_cols, row-major. Rows run along the
/// column axis (row index = position within an image column), so a surface
/// assigns one row coordinate to every column.
struct Grid2 {
  int n_rows = 0;
  int n_cols = 0;
  GridKind kind = GridKind::Image;
  std::vector<double> data;

  Grid2() = default;
  Grid2(int rows, int cols, GridKind k, double fill = 0.0)
      : n_rows(rows), n_cols(cols), kind(k),
        data(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
             fill) {
    if (rows <= 0 || cols <= 0) {
      throw Error(ErrorCode::BadConfig, "Grid2: dimensions must be positive");
    }
  }

  double& at(int row, int col) {
    return data[static_cast<std::size_t>(row) * n_cols + col];
  }
  double at(int row, int col) const {
    return data[static_cast<std::size_t>(row) * n_cols + col];
  }

  std::vector<double> column(int col) const {
    std::vector<double> out(static_cast<std::size_t>(n_rows));
    for (int j = 0; j < n_rows; ++j) out[j] = at(j, col);
    return out;
  }

  void set_column(int col, const std::vector<double>& values) {
    for (int j = 0; j < n_rows; ++j) at(j, col) = values[j];
  }
};

/// Continuous surface position per column, 0-based pixel coordinates.
struct SurfaceTrace {
  std::vector<double> x;

  SurfaceTrace() = default;
  explicit SurfaceTrace(std::vector<double> values) : x(std::move(values)) {}

  int n_cols() const { return static_cast<int>(x.size()); }
  double& operator[](int i) { return x[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return x[static_cast<std::size_t>(i)]; }
};

/// Per-column Gaussian parameterization (mean position, standard deviation).
struct GaussianField {
  std::vector<double> gamma;
  std::vector<double> sigma;

  int n_cols() const { return static_cast<int>(gamma.size()); }
};

/// Physical size of one pixel step along the column axis.
struct PixelSpacing {
  double row_spacing = 1.0;
  std::string unit_label = "px";
};

/// Checks the ProbMap invariants: every value finite and >= 0, and no column
/// entirely zero. Returns the input unchanged.
const Grid2& validate_probmap(const Grid2& g);

/// Per-column affine rescale to [0, 1]: v -> (v - min) / (max - min).
/// Throws ConstantColumn if a column has max == min.
Grid2 column_normalize(const Grid2& g);

/// Adjoint of column_normalize: maps a gradient w.r.t. the normalized map
/// back to a gradient w.r.t. the raw map. `raw` must be the original input
/// and `normalized` the corresponding column_normalize output.
Grid2 column_normalize_backward(const Grid2& raw, const Grid2& normalized,
                                const Grid2& grad_normalized);

/// Row index of each column's maximum; ties break toward the smaller row.
SurfaceTrace argmax_surface(const Grid2& g);

}  // namespace surfseg
