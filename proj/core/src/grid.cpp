#include "surfseg/grid.hpp"

#include <cmath>
#include <limits>

namespace surfseg {

const Grid2& validate_probmap(const Grid2& g) {
  if (g.kind != GridKind::ProbMap) {
    throw Error(ErrorCode::BadConfig, "validate_probmap: grid kind is not ProbMap");
  }
  for (int i = 0; i < g.n_cols; ++i) {
    bool any_nonzero = false;
    for (int j = 0; j < g.n_rows; ++j) {
      double v = g.at(j, i);
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFinite,
                    "probability map has non-finite value at row " +
                        std::to_string(j) + ", col " + std::to_string(i));
      }
      if (v < 0.0) {
        throw Error(ErrorCode::NegativeValue,
                    "probability map has negative value at row " +
                        std::to_string(j) + ", col " + std::to_string(i));
      }
      if (v != 0.0) any_nonzero = true;
    }
    if (!any_nonzero) {
      throw Error(ErrorCode::DegenerateColumn,
                  "probability map column " + std::to_string(i) + " is all zero");
    }
  }
  return g;
}

Grid2 column_normalize(const Grid2& g) {
  Grid2 out(g.n_rows, g.n_cols, GridKind::ProbMap);
  for (int i = 0; i < g.n_cols; ++i) {
    double lo = g.at(0, i);
    double hi = g.at(0, i);
    for (int j = 1; j < g.n_rows; ++j) {
      double v = g.at(j, i);
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
    if (hi == lo) {
      throw Error(ErrorCode::ConstantColumn,
                  "column " + std::to_string(i) + " is constant; cannot normalize");
    }
    // Division (not reciprocal multiplication) pins the column max to exactly
    // 1.0, which makes normalization idempotent bit-for-bit.
    const double range = hi - lo;
    for (int j = 0; j < g.n_rows; ++j) {
      out.at(j, i) = (g.at(j, i) - lo) / range;
    }
  }
  return out;
}

Grid2 column_normalize_backward(const Grid2& raw, const Grid2& normalized,
                                const Grid2& grad_normalized) {
  if (raw.n_rows != grad_normalized.n_rows || raw.n_cols != grad_normalized.n_cols) {
    throw Error(ErrorCode::LengthMismatch, "column_normalize_backward: shape mismatch");
  }
  Grid2 out(raw.n_rows, raw.n_cols, raw.kind);
  for (int i = 0; i < raw.n_cols; ++i) {
    int arg_lo = 0, arg_hi = 0;
    double lo = raw.at(0, i), hi = raw.at(0, i);
    for (int j = 1; j < raw.n_rows; ++j) {
      double v = raw.at(j, i);
      if (v < lo) { lo = v; arg_lo = j; }
      if (v > hi) { hi = v; arg_hi = j; }
    }
    if (hi == lo) continue;  // constant column carries no gradient
    double inv = 1.0 / (hi - lo);
    // d norm_j / d raw_k = (delta_jk - delta_k,lo) * inv - norm_j * (delta_k,hi - delta_k,lo) * inv
    double sum_g = 0.0;
    double sum_gn = 0.0;
    for (int j = 0; j < raw.n_rows; ++j) {
      double gj = grad_normalized.at(j, i);
      sum_g += gj;
      sum_gn += gj * normalized.at(j, i);
    }
    for (int j = 0; j < raw.n_rows; ++j) {
      out.at(j, i) = grad_normalized.at(j, i) * inv;
    }
    out.at(arg_lo, i) += (-sum_g + sum_gn) * inv;
    out.at(arg_hi, i) += -sum_gn * inv;
  }
  return out;
}

SurfaceTrace argmax_surface(const Grid2& g) {
  SurfaceTrace t;
  t.x.resize(static_cast<std::size_t>(g.n_cols));
  for (int i = 0; i < g.n_cols; ++i) {
    int best = 0;
    double best_v = g.at(0, i);
    for (int j = 1; j < g.n_rows; ++j) {
      if (g.at(j, i) > best_v) {
        best_v = g.at(j, i);
        best = j;
      }
    }
    t.x[static_cast<std::size_t>(i)] = static_cast<double>(best);
  }
  return t;
}

}  // namespace surfseg
