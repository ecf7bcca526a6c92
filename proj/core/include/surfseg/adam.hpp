#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "surfseg/error.hpp"

namespace surfseg {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment state for one parameter group.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update, in place:
///   m = b1 m + (1-b1) g;  v = b2 v + (1-b2) g^2
///   p -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
/// Throws NonFiniteGradient on non-finite gradient entries.
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, double lr, const AdamConfig& cfg = {});

}  // namespace surfseg
