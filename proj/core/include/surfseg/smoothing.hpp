#pragma once

#include <span>
#include <vector>

#include "surfseg/grid.hpp"

namespace surfseg {

/// Tridiagonal quadratic system for the surface energy
///   E(x) = sum_i (x_i - gamma_i)^2 / (2 sigma_i^2) + w * sum_adj (x_i - x_j)^2
/// in standard form E = 1/2 x^T H x + c^T x + const with H = D + 2 w L,
/// D = diag(1/sigma_i^2), L the chain-graph Laplacian, and rhs = D gamma
/// (= -c). H is strictly diagonally dominant for w >= 0, hence positive
/// definite by the Gershgorin circle theorem.
struct SmoothSystem {
  std::vector<double> diag;  // 1/sigma_i^2 + 2 w * (chain degree of i)
  std::vector<double> off;   // -2 w, length n - 1
  std::vector<double> rhs;   // gamma_i / sigma_i^2
  double w = 0.0;

  int size() const { return static_cast<int>(diag.size()); }
};

struct SmoothGradients {
  std::vector<double> d_gamma;
  std::vector<double> d_sigma;
  double d_w = 0.0;
};

/// Builds the tridiagonal system for the given Gaussian field and smoothness
/// weight. Throws NonPositiveSigma / NegativeWeight on invalid input.
SmoothSystem assemble(const GaussianField& gf, double w);

/// Evaluates the energy at an arbitrary surface.
double energy(const SmoothSystem& sys, const GaussianField& gf,
              const SurfaceTrace& x);

/// Returns the unique minimizer via the Thomas algorithm (stable without
/// pivoting thanks to diagonal dominance). Verifies the residual
/// ||H x - rhs||_inf <= 1e-9 ||rhs||_inf and throws SolveFailure otherwise.
SurfaceTrace solve(const SmoothSystem& sys);

/// Applies the chain Laplacian: (L x)_i = deg(i) x_i - x_{i-1} - x_{i+1}.
std::vector<double> laplacian_apply(std::span<const double> x);

/// Adjoint gradients of a scalar loss through the solve, given
/// g_up = dLoss/dx*. Solves H y = g_up once, then
///   d_gamma_i = y_i / sigma_i^2
///   d_sigma_i = 2 y_i (x*_i - gamma_i) / sigma_i^3
///   d_w       = -2 y^T (L x*)
SmoothGradients backward(const SmoothSystem& sys, const GaussianField& gf,
                         const SurfaceTrace& x_star,
                         std::span<const double> g_up);

/// Ring variant for polar data with the wrap flag set: adds the pairwise
/// term between the last and first column. The closed-chain Hessian is the
/// open-chain one plus the rank-one update 2w (e_0 - e_{n-1})(e_0 - e_{n-1})^T,
/// solved with two tridiagonal sweeps via the Sherman-Morrison formula.
SurfaceTrace solve_cyclic(const GaussianField& gf, double w);

/// Energy of the closed-chain system at an arbitrary surface.
double energy_cyclic(const GaussianField& gf, double w, const SurfaceTrace& x);

}  // namespace surfseg
