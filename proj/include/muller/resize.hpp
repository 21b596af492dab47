#pragma once

#include <string>

#include "muller/image.hpp"

namespace muller {

enum class ResizeMethod { Bilinear, Nearest, Area };

std::string to_string(ResizeMethod method);
ResizeMethod parse_resize_method(const std::string& name);

struct ResizeSpec {
  int in_h = 1;
  int in_w = 1;
  int out_h = 1;
  int out_w = 1;
  ResizeMethod method = ResizeMethod::Bilinear;
  /// Inputs were produced by an AREA downscale upstream of the resizer.
  bool antialias_input = false;

  void validate() const;
};

// All resizers use half-pixel centers: output index t samples the source at
// s = (t + 0.5) * in / out - 0.5 along each axis.

/// Linear interpolation of the 2x2 neighbourhood with source coordinates
/// clamped to [0, in - 1]. Same-size resize is the identity.
Image resize_bilinear(const Image& img, int out_h, int out_w);

/// Nearest source sample, ties toward the larger index.
Image resize_nearest(const Image& img, int out_h, int out_w);

/// Box average with fractional coverage weights. Downscale only.
Image resize_area(const Image& img, int out_h, int out_w);

Image resize(const Image& img, int out_h, int out_w, ResizeMethod method);

/// Adjoint of resize_bilinear from (in_h, in_w) to (out_h, out_w): scatters
/// each cotangent sample onto its interpolation sources with the forward
/// weights. The cotangent must be out_h x out_w.
Image resize_bilinear_vjp(int in_h, int in_w, int out_h, int out_w, const Image& cotangent);

}  // namespace muller
