#pragma once

#include "surfseg/gauss_fit.hpp"
#include "surfseg/grid.hpp"
#include "surfseg/smoothing.hpp"

namespace surfseg {

struct InferResult {
  FieldFitResult fit;
  SurfaceTrace trace;
};

/// Probability map -> per-column Gaussians -> smoothed surface. With
/// use_smoothing = false the trace is the fitted means directly (the
/// "no smoothing" condition used for ablation).
InferResult infer_from_map(const Grid2& probmap, const FitOptions& fit_opts,
                           double w, bool use_smoothing = true);

}  // namespace surfseg
