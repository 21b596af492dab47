#include "muller/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "muller/error.hpp"
#include "muller/filtering.hpp"

namespace muller {

namespace {

void check_dims(int height, int width, int channels) {
  if (height < 1 || width < 1) {
    fail(ErrorCode::Dimension, "image dimensions must be at least 1x1, got " +
                                   std::to_string(height) + "x" + std::to_string(width));
  }
  if (channels != 1 && channels != 3) {
    fail(ErrorCode::Dimension, "channel count must be 1 or 3, got " + std::to_string(channels));
  }
}

void check_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) {
    fail(ErrorCode::Dimension, std::string(what) + ": image shapes differ");
  }
}

}  // namespace

Image::Image(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width, channels);
  data_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width) *
                   static_cast<std::size_t>(channels),
               fill);
}

Image::Image(int height, int width, int channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  check_dims(height, width, channels);
  const std::size_t expected = static_cast<std::size_t>(height) *
                               static_cast<std::size_t>(width) *
                               static_cast<std::size_t>(channels);
  if (data_.size() != expected) {
    fail(ErrorCode::Dimension, "data length " + std::to_string(data_.size()) +
                                   " does not match " + std::to_string(expected));
  }
}

ImageStats image_stats(const Image& img) {
  ImageStats stats;
  if (img.empty()) {
    return stats;
  }
  const auto values = img.values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  stats.min = *lo;
  stats.max = *hi;

  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  stats.mean = std::clamp(sum / static_cast<double>(values.size()), stats.min, stats.max);

  const Image smooth = separable_convolve(img, gaussian_kernel(5, 1.0));
  const auto low = smooth.values();
  double energy = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double r = values[i] - low[i];
    energy += r * r;
  }
  stats.high_freq_energy = energy / static_cast<double>(values.size());
  return stats;
}

Image subtract(const Image& a, const Image& b) {
  check_same_shape(a, b, "subtract");
  Image out = a;
  auto o = out.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] -= bv[i];
  }
  return out;
}

Image add(const Image& a, const Image& b) {
  check_same_shape(a, b, "add");
  Image out = a;
  auto o = out.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] += bv[i];
  }
  return out;
}

Image scale(const Image& a, double factor) {
  Image out = a;
  for (double& v : out.values()) {
    v *= factor;
  }
  return out;
}

double inner_product(const Image& a, const Image& b) {
  check_same_shape(a, b, "inner_product");
  const auto av = a.values();
  const auto bv = b.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    sum += av[i] * bv[i];
  }
  return sum;
}

double max_abs_difference(const Image& a, const Image& b) {
  check_same_shape(a, b, "max_abs_difference");
  const auto av = a.values();
  const auto bv = b.values();
  double worst = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    worst = std::max(worst, std::abs(av[i] - bv[i]));
  }
  return worst;
}

bool all_finite(const Image& img) {
  return std::all_of(img.values().begin(), img.values().end(),
                     [](double v) { return std::isfinite(v); });
}

Image display_normalize(const Image& signed_img) {
  double max_abs = 0.0;
  for (double v : signed_img.values()) {
    max_abs = std::max(max_abs, std::abs(v));
  }
  Image out(signed_img.height(), signed_img.width(), signed_img.channels(), 0.5);
  if (max_abs == 0.0) {
    return out;
  }
  const auto in = signed_img.values();
  auto o = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    o[i] = 0.5 + in[i] / (2.0 * max_abs);
  }
  return out;
}

}  // namespace muller
