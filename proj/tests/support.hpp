#pragma once

// Reference implementations used as oracles. They are written for clarity,
// straight from the definitions, and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "muller/image.hpp"

namespace testing_support {

using muller::Image;

inline Image random_image(std::mt19937_64& rng, int h, int w, int c, double lo = 0.0,
                          double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Image img(h, w, c);
  for (double& v : img.values()) v = dist(rng);
  return img;
}

inline std::vector<double> gaussian_taps(int ksize, double std) {
  std::vector<double> taps(static_cast<std::size_t>(ksize));
  const double centre = (ksize - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < ksize; ++i) {
    const double d = i - centre;
    taps[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * std * std));
    sum += taps[static_cast<std::size_t>(i)];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Full 2-D convolution with the outer-product kernel and replicate edges.
inline Image conv2d(const Image& img, const std::vector<double>& taps) {
  const int r = static_cast<int>(taps.size()) / 2;
  Image out(img.height(), img.width(), img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) {
          for (int j = -r; j <= r; ++j) {
            const int yy = std::clamp(y + i, 0, img.height() - 1);
            const int xx = std::clamp(x + j, 0, img.width() - 1);
            acc += taps[static_cast<std::size_t>(i + r)] * taps[static_cast<std::size_t>(j + r)] *
                   img.at(yy, xx, c);
          }
        }
        out.at(y, x, c) = acc;
      }
    }
  }
  return out;
}

// Half-pixel bilinear sample of one output pixel.
inline Image bilinear(const Image& img, int out_h, int out_w) {
  Image out(out_h, out_w, img.channels());
  auto coord = [](int t, int in, int out) {
    const double s = (t + 0.5) * static_cast<double>(in) / out - 0.5;
    return std::clamp(s, 0.0, static_cast<double>(in - 1));
  };
  for (int y = 0; y < out_h; ++y) {
    const double sy = coord(y, img.height(), out_h);
    const int y0 = static_cast<int>(std::floor(sy));
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double fy = sy - y0;
    for (int x = 0; x < out_w; ++x) {
      const double sx = coord(x, img.width(), out_w);
      const int x0 = static_cast<int>(std::floor(sx));
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double fx = sx - x0;
      for (int c = 0; c < img.channels(); ++c) {
        const double top = (1 - fx) * img.at(y0, x0, c) + fx * img.at(y0, x1, c);
        const double bottom = (1 - fx) * img.at(y1, x0, c) + fx * img.at(y1, x1, c);
        out.at(y, x, c) = (1 - fy) * top + fy * bottom;
      }
    }
  }
  return out;
}

// Overlap of output cell t with source cell i, as a fraction of the output
// cell's footprint.
inline double area_weight(int t, int i, int in, int out) {
  const double scale = static_cast<double>(in) / out;
  const double lo = std::max(t * scale, static_cast<double>(i));
  const double hi = std::min((t + 1) * scale, static_cast<double>(i + 1));
  return std::max(0.0, hi - lo) / scale;
}

inline Image area(const Image& img, int out_h, int out_w) {
  Image out(out_h, out_w, img.channels());
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        double acc = 0.0;
        for (int i = 0; i < img.height(); ++i) {
          const double wy = area_weight(y, i, img.height(), out_h);
          if (wy == 0.0) continue;
          for (int j = 0; j < img.width(); ++j) {
            acc += wy * area_weight(x, j, img.width(), out_w) * img.at(i, j, c);
          }
        }
        out.at(y, x, c) = acc;
      }
    }
  }
  return out;
}

inline double max_abs(const Image& img) {
  double m = 0.0;
  for (double v : img.values()) m = std::max(m, std::fabs(v));
  return m;
}

inline double max_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::fabs(a.values()[i] - b.values()[i]));
  }
  return m;
}

}  // namespace testing_support
