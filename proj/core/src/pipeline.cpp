#include "surfseg/pipeline.hpp"

namespace surfseg {

InferResult infer_from_map(const Grid2& probmap, const FitOptions& fit_opts,
                           double w, bool use_smoothing) {
  InferResult out;
  out.fit = fit_field(probmap, fit_opts);
  if (use_smoothing) {
    out.trace = solve(assemble(out.fit.field, w));
  } else {
    out.trace = SurfaceTrace(out.fit.field.gamma);
  }
  return out;
}

}  // namespace surfseg
