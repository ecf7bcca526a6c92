#include "surfseg/adam.hpp"

#include <cmath>

namespace surfseg {

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, double lr, const AdamConfig& cfg) {
  if (params.size() != grads.size() || params.size() != state.m.size() ||
      params.size() != state.v.size()) {
    throw Error(ErrorCode::LengthMismatch, "adam_step: size mismatch");
  }
  if (!(lr > 0.0)) {
    throw Error(ErrorCode::BadConfig, "adam_step: learning rate must be positive");
  }
  for (double g : grads) {
    if (!std::isfinite(g)) {
      throw Error(ErrorCode::NonFiniteGradient, "adam_step: non-finite gradient");
    }
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

}  // namespace surfseg
