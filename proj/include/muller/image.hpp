#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace muller {

/// Row-major H x W x C image of 64-bit samples. Nominal range is [0, 1] but
/// values are never clamped by library operations; only export clamps.
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, double fill = 0.0);
  Image(int height, int width, int channels, std::vector<double> data);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  /// Number of doubles in one row (width * channels).
  std::size_t row_stride() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(channels_);
  }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }
  const std::vector<double>& vector() const noexcept { return data_; }

  double* row(int y) noexcept { return data_.data() + static_cast<std::size_t>(y) * row_stride(); }
  const double* row(int y) const noexcept {
    return data_.data() + static_cast<std::size_t>(y) * row_stride();
  }

  double& at(int y, int x, int c) noexcept { return data_[index(y, x, c)]; }
  double at(int y, int x, int c) const noexcept { return data_[index(y, x, c)]; }

  bool same_shape(const Image& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int y, int x, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

struct ImageStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  /// Mean squared residual x - Wx, W the default Gaussian (ksize 5, std 1).
  double high_freq_energy = 0.0;
};

/// Loads PNG (8-bit gray/RGB) or binary PGM (P5) / PPM (P6) with maxval 255.
/// Samples map to v / 255.
Image load_image(const std::string& path);

/// Writes PNG when the path ends in ".png", otherwise PGM/PPM chosen by the
/// channel count. Samples map to round(v * 255). With clip=false any value
/// outside [0, 1] is an error.
void save_image(const Image& img, const std::string& path, bool clip);

ImageStats image_stats(const Image& img);

// Elementwise helpers. Shapes must match.
Image subtract(const Image& a, const Image& b);
Image add(const Image& a, const Image& b);
Image scale(const Image& a, double factor);
double inner_product(const Image& a, const Image& b);
double max_abs_difference(const Image& a, const Image& b);
bool all_finite(const Image& img);

/// Maps a signed image to [0, 1] for display: 0.5 + v / (2 * max|v|).
/// A zero image maps to uniform 0.5.
Image display_normalize(const Image& signed_img);

}  // namespace muller
