#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "surfseg/grid.hpp"

namespace surfseg {

/// Cartesian 2-D point, x along columns and y along rows.
struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Polar resampling layout for ring-like structures. Radii are sampled at
/// half-pixel offsets so no row degenerates to r = 0.
struct PolarSpec {
  double center_x = 0.0;
  double center_y = 0.0;
  int n_angles = 256;  // polar columns
  int n_radii = 128;   // polar rows
  double r_max = 0.0;
  bool wrap = false;   // close the column chain into a ring downstream

  static PolarSpec centered(const Grid2& img);
};

/// Resamples a Cartesian image onto the polar grid:
/// out(j, i) = bilinear(img, cx + r_j cos th_i, cy + r_j sin th_i) with
/// r_j = (j + 0.5) r_max / n_radii and th_i = 2 pi i / n_angles.
/// Out-of-bounds samples clamp to the nearest border pixel.
Grid2 to_polar(const Grid2& img, const PolarSpec& spec);

/// Maps a surface in polar rows to the closed Cartesian contour it traces.
std::vector<Point2> surface_to_contour(const SurfaceTrace& x, const PolarSpec& spec);

/// Bilinear sample with border clamping; (x, y) in pixel coordinates.
double bilinear_sample(const Grid2& img, double x, double y);

enum class AugmentKind {
  Mirror,         // flip column order of image and truth
  CircShift,      // rotate columns; amount = param (seeded when unset)
  GaussianNoise,  // add pixel noise, std = param
  SaltPepper,     // set a fraction param of pixels to the image extremes
  CropResize,     // crop a param-sized window and resize back
  AxialTranslate, // roll rows by param, shift truth accordingly
};

struct AugmentOp {
  AugmentKind kind;
  double param = 0.0;
  bool has_param = true;

  static AugmentOp mirror() { return {AugmentKind::Mirror, 0.0, false}; }
  static AugmentOp circ_shift() { return {AugmentKind::CircShift, 0.0, false}; }
  static AugmentOp circ_shift(int amount) {
    return {AugmentKind::CircShift, static_cast<double>(amount), true};
  }
  static AugmentOp gaussian_noise(double std) { return {AugmentKind::GaussianNoise, std, true}; }
  static AugmentOp salt_pepper(double frac) { return {AugmentKind::SaltPepper, frac, true}; }
  static AugmentOp crop_resize(double frac) { return {AugmentKind::CropResize, frac, true}; }
  static AugmentOp axial_translate(int delta) {
    return {AugmentKind::AxialTranslate, static_cast<double>(delta), true};
  }
};

struct TrainingSample {
  Grid2 image;
  SurfaceTrace truth;
};

struct AugmentResult {
  TrainingSample sample;
  bool truth_clipped = false;  // translation pushed truth to the border
};

/// Applies the ops in order, transforming image and ground truth
/// consistently. Randomness (noise values, crop offsets, unset shift
/// amounts) comes from rng_stream::kAugment of `seed`.
AugmentResult augment(const TrainingSample& sample,
                      const std::vector<AugmentOp>& ops, std::uint64_t seed);

}  // namespace surfseg
