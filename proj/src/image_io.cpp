#include <png.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "muller/error.hpp"
#include "muller/image.hpp"

namespace muller {

namespace {

constexpr unsigned char kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) {
    fail(ErrorCode::Io, "error while reading '" + path + "'");
  }
  return bytes;
}

bool ends_with_png(const std::string& path) {
  if (path.size() < 4) {
    return false;
  }
  std::string ext = path.substr(path.size() - 4);
  for (char& c : ext) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return ext == ".png";
}

Image from_bytes(int height, int width, int channels, const unsigned char* bytes) {
  std::vector<double> data(static_cast<std::size_t>(height) * static_cast<std::size_t>(width) *
                           static_cast<std::size_t>(channels));
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = static_cast<double>(bytes[i]) / 255.0;
  }
  return Image(height, width, channels, std::move(data));
}

// Netpbm header: magic, width, height, maxval separated by whitespace, with
// '#' comments allowed between tokens. A single whitespace byte ends it.
class PnmHeaderReader {
 public:
  PnmHeaderReader(const std::vector<unsigned char>& bytes, const std::string& path)
      : bytes_(bytes), path_(path) {}

  long next_number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      fail(ErrorCode::Format, "malformed PNM header in '" + path_ + "'");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) {
        fail(ErrorCode::Format, "PNM header value too large in '" + path_ + "'");
      }
      ++pos_;
    }
    return value;
  }

  std::size_t end_of_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      fail(ErrorCode::Format, "malformed PNM header in '" + path_ + "'");
    }
    return pos_ + 1;
  }

  void skip(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
          ++pos_;
        }
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  const std::string& path_;
  std::size_t pos_ = 0;
};

Image decode_pnm(const std::vector<unsigned char>& bytes, const std::string& path) {
  const int channels = bytes[1] == '6' ? 3 : 1;
  PnmHeaderReader reader(bytes, path);
  reader.skip(2);
  const long width = reader.next_number();
  const long height = reader.next_number();
  const long maxval = reader.next_number();
  const std::size_t offset = reader.end_of_header();
  if (width < 1 || height < 1) {
    fail(ErrorCode::Format, "zero-dimension image in '" + path + "'");
  }
  if (maxval != 255) {
    fail(ErrorCode::Unsupported,
         "only maxval 255 is supported, '" + path + "' has " + std::to_string(maxval));
  }
  const std::size_t needed = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                             static_cast<std::size_t>(channels);
  if (bytes.size() - offset < needed) {
    fail(ErrorCode::Format, "truncated pixel data in '" + path + "'");
  }
  return from_bytes(static_cast<int>(height), static_cast<int>(width), channels,
                    bytes.data() + offset);
}

Image decode_png(const std::vector<unsigned char>& bytes, const std::string& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    fail(ErrorCode::Format, "cannot decode PNG '" + path + "': " + png.message);
  }
  if (png.format & PNG_FORMAT_FLAG_ALPHA) {
    png_image_free(&png);
    fail(ErrorCode::Unsupported, "PNG with alpha channel is not supported: '" + path + "'");
  }
  if (png.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&png);
    fail(ErrorCode::Unsupported, "16-bit PNG is not supported: '" + path + "'");
  }
  if (png.width == 0 || png.height == 0) {
    png_image_free(&png);
    fail(ErrorCode::Format, "zero-dimension image in '" + path + "'");
  }
  const int channels = (png.format & PNG_FORMAT_FLAG_COLOR) ? 3 : 1;
  png.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<unsigned char> pixels(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, pixels.data(), 0, nullptr)) {
    const std::string message = png.message;
    png_image_free(&png);
    fail(ErrorCode::Format, "cannot decode PNG '" + path + "': " + message);
  }
  return from_bytes(static_cast<int>(png.height), static_cast<int>(png.width), channels,
                    pixels.data());
}

std::vector<unsigned char> quantize(const Image& img, bool clip) {
  std::vector<unsigned char> bytes(img.size());
  const auto values = img.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    double v = values[i];
    if (!std::isfinite(v)) {
      fail(ErrorCode::Range, "cannot export non-finite sample");
    }
    if (v < 0.0 || v > 1.0) {
      if (!clip) {
        fail(ErrorCode::Range, "sample " + std::to_string(v) +
                                   " outside [0, 1]; enable clipping to export");
      }
      v = v < 0.0 ? 0.0 : 1.0;
    }
    // std::round rounds halfway cases away from zero.
    bytes[i] = static_cast<unsigned char>(std::round(v * 255.0));
  }
  return bytes;
}

}  // namespace

Image load_image(const std::string& path) {
  const std::vector<unsigned char> bytes = read_file(path);
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0) {
    return decode_png(bytes, path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
    return decode_pnm(bytes, path);
  }
  fail(ErrorCode::Unsupported, "unrecognized image format: '" + path + "'");
}

void save_image(const Image& img, const std::string& path, bool clip) {
  if (img.channels() != 1 && img.channels() != 3) {
    fail(ErrorCode::Dimension, "only 1- or 3-channel images can be saved");
  }
  const std::vector<unsigned char> bytes = quantize(img, clip);

  if (ends_with_png(path)) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(img.width());
    png.height = static_cast<png_uint_32>(img.height());
    png.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&png, path.c_str(), 0, bytes.data(), 0, nullptr)) {
      fail(ErrorCode::Io, "cannot write PNG '" + path + "': " + png.message);
    }
    return;
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  }
  out << (img.channels() == 3 ? "P6" : "P5") << '\n'
      << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    fail(ErrorCode::Io, "error while writing '" + path + "'");
  }
}

}  // namespace muller
