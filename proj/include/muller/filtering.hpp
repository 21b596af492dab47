#pragma once

#include <vector>

#include "muller/image.hpp"

namespace muller {

/// Normalized, symmetric, odd-length Gaussian taps.
struct GaussianKernel1D {
  std::vector<double> taps;
  double std = 1.0;
  int ksize = 1;

  int radius() const noexcept { return ksize / 2; }
};

/// taps[i] proportional to exp(-d^2 / (2 std^2)), d = i - (ksize - 1) / 2,
/// normalized to unit sum. Requires odd ksize >= 1 and std > 0.
GaussianKernel1D gaussian_kernel(int ksize, double std);

/// Horizontal then vertical pass with replicate-edge boundary. Output has the
/// input's shape. Constant images are reproduced exactly.
Image separable_convolve(const Image& img, const GaussianKernel1D& kernel);

/// Adjoint of separable_convolve under the same boundary rule: satisfies
/// <conv(x), u> = <x, conv_transpose(u)>.
Image separable_convolve_transpose(const Image& img, const GaussianKernel1D& kernel);

/// Iterated low-pass bank for k layers. smoothed has k + 1 entries with
/// smoothed[i] = W^(k - i) x, so smoothed[0] is the smoothest image and
/// smoothed[k] is the input itself. Exactly k convolutions are performed.
struct FilterBank {
  int k = 0;
  std::vector<Image> smoothed;

  const Image& input() const { return smoothed.back(); }
};

FilterBank filter_bank(const Image& img, int k, int ksize, double std);
FilterBank filter_bank(const Image& img, int k, const GaussianKernel1D& kernel);

/// Band-pass slices subband[i] = smoothed[i] - smoothed[i + 1], i = 0..k-1.
/// Their sum telescopes to W^k x - x.
std::vector<Image> laplacian_subbands(const FilterBank& bank);

}  // namespace muller
