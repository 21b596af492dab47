#include "muller/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "muller/error.hpp"
#include "parallel_for.hpp"

namespace muller {

GaussianKernel1D gaussian_kernel(int ksize, double std) {
  if (ksize < 1 || ksize % 2 == 0) {
    fail(ErrorCode::InvalidArgument,
         "kernel size must be a positive odd number, got " + std::to_string(ksize));
  }
  if (!(std > 0.0) || !std::isfinite(std)) {
    fail(ErrorCode::InvalidArgument, "kernel standard deviation must be positive");
  }
  GaussianKernel1D kernel;
  kernel.ksize = ksize;
  kernel.std = std;
  kernel.taps.resize(static_cast<std::size_t>(ksize));
  const int r = ksize / 2;
  const double denom = 2.0 * std * std;
  double sum = 0.0;
  for (int i = 0; i < ksize; ++i) {
    const double d = static_cast<double>(i - r);
    kernel.taps[static_cast<std::size_t>(i)] = std::exp(-(d * d) / denom);
    sum += kernel.taps[static_cast<std::size_t>(i)];
  }
  for (double& t : kernel.taps) {
    t /= sum;
  }
  return kernel;
}

namespace {

// Both passes use the anchored form
//   out = x0 + sum_d t_d * ((x_-d - x0) + (x_+d - x0))
// which equals the plain weighted sum for unit-sum symmetric taps and maps a
// constant signal onto itself without rounding.

void horizontal_pass(const Image& in, Image& out, const GaussianKernel1D& kernel) {
  const int w = in.width();
  const int c = in.channels();
  const int r = kernel.radius();
  const std::size_t stride = in.row_stride();
  const double* taps = kernel.taps.data();

  detail::parallel_rows(in.height(), [&](int y_begin, int y_end) {
    std::vector<double> padded(static_cast<std::size_t>(w + 2 * r) * static_cast<std::size_t>(c));
    for (int y = y_begin; y < y_end; ++y) {
      const double* src = in.row(y);
      for (int x = -r; x < w + r; ++x) {
        const int xs = std::clamp(x, 0, w - 1);
        for (int ch = 0; ch < c; ++ch) {
          padded[static_cast<std::size_t>((x + r) * c + ch)] = src[xs * c + ch];
        }
      }
      double* dst = out.row(y);
      const double* center = padded.data() + static_cast<std::size_t>(r * c);
      for (std::size_t i = 0; i < stride; ++i) {
        dst[i] = 0.0;
      }
      for (int d = 1; d <= r; ++d) {
        const double t = taps[r + d];
        const double* left = center - static_cast<std::ptrdiff_t>(d * c);
        const double* right = center + static_cast<std::ptrdiff_t>(d * c);
        for (std::size_t i = 0; i < stride; ++i) {
          dst[i] += t * ((left[i] - center[i]) + (right[i] - center[i]));
        }
      }
      for (std::size_t i = 0; i < stride; ++i) {
        dst[i] = center[i] + dst[i];
      }
    }
  });
}

void vertical_pass(const Image& in, Image& out, const GaussianKernel1D& kernel) {
  const int h = in.height();
  const int r = kernel.radius();
  const std::size_t stride = in.row_stride();
  const double* taps = kernel.taps.data();

  detail::parallel_rows(h, [&](int y_begin, int y_end) {
    for (int y = y_begin; y < y_end; ++y) {
      const double* center = in.row(y);
      double* dst = out.row(y);
      for (std::size_t i = 0; i < stride; ++i) {
        dst[i] = 0.0;
      }
      for (int d = 1; d <= r; ++d) {
        const double t = taps[r + d];
        const double* up = in.row(std::max(y - d, 0));
        const double* down = in.row(std::min(y + d, h - 1));
        for (std::size_t i = 0; i < stride; ++i) {
          dst[i] += t * ((up[i] - center[i]) + (down[i] - center[i]));
        }
      }
      for (std::size_t i = 0; i < stride; ++i) {
        dst[i] = center[i] + dst[i];
      }
    }
  });
}

}  // namespace

Image separable_convolve(const Image& img, const GaussianKernel1D& kernel) {
  if (kernel.ksize == 1) {
    return img;
  }
  Image tmp(img.height(), img.width(), img.channels());
  horizontal_pass(img, tmp, kernel);
  Image out(img.height(), img.width(), img.channels());
  vertical_pass(tmp, out, kernel);
  return out;
}

Image separable_convolve_transpose(const Image& img, const GaussianKernel1D& kernel) {
  if (kernel.ksize == 1) {
    return img;
  }
  const int h = img.height();
  const int w = img.width();
  const int c = img.channels();
  const int r = kernel.radius();
  const std::size_t stride = img.row_stride();

  // Transpose of the vertical pass: scatter each row onto its clamped sources.
  Image tmp(h, w, c);
  for (int y = 0; y < h; ++y) {
    const double* src = img.row(y);
    for (int j = 0; j < kernel.ksize; ++j) {
      const double t = kernel.taps[static_cast<std::size_t>(j)];
      double* dst = tmp.row(std::clamp(y + j - r, 0, h - 1));
      for (std::size_t i = 0; i < stride; ++i) {
        dst[i] += t * src[i];
      }
    }
  }

  // Transpose of the horizontal pass.
  Image out(h, w, c);
  for (int y = 0; y < h; ++y) {
    const double* src = tmp.row(y);
    double* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      for (int j = 0; j < kernel.ksize; ++j) {
        const double t = kernel.taps[static_cast<std::size_t>(j)];
        const int xs = std::clamp(x + j - r, 0, w - 1);
        for (int ch = 0; ch < c; ++ch) {
          dst[xs * c + ch] += t * src[x * c + ch];
        }
      }
    }
  }
  return out;
}

FilterBank filter_bank(const Image& img, int k, int ksize, double std) {
  return filter_bank(img, k, gaussian_kernel(ksize, std));
}

FilterBank filter_bank(const Image& img, int k, const GaussianKernel1D& kernel) {
  if (k < 1) {
    fail(ErrorCode::InvalidArgument, "filter bank needs at least one layer, got k=" +
                                         std::to_string(k));
  }
  FilterBank bank;
  bank.k = k;
  bank.smoothed.resize(static_cast<std::size_t>(k) + 1);
  bank.smoothed[static_cast<std::size_t>(k)] = img;
  for (int i = k - 1; i >= 0; --i) {
    bank.smoothed[static_cast<std::size_t>(i)] =
        separable_convolve(bank.smoothed[static_cast<std::size_t>(i) + 1], kernel);
  }
  return bank;
}

std::vector<Image> laplacian_subbands(const FilterBank& bank) {
  std::vector<Image> subbands;
  subbands.reserve(static_cast<std::size_t>(bank.k));
  for (int i = 0; i < bank.k; ++i) {
    subbands.push_back(subtract(bank.smoothed[static_cast<std::size_t>(i)],
                                bank.smoothed[static_cast<std::size_t>(i) + 1]));
  }
  return subbands;
}

}  // namespace muller
