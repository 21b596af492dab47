#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "muller/error.hpp"
#include "muller/image.hpp"
#include "support.hpp"

using namespace muller;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  fs::path dir = fs::temp_directory_path() / "muller_test_image";
  fs::create_directories(dir);
  return dir;
}

void write_bytes(const fs::path& path, const std::string& header, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << header << body;
}

}  // namespace

TEST_CASE("image constructor validates shape") {
  CHECK_THROWS_AS(Image(0, 3, 1), Error);
  CHECK_THROWS_AS(Image(2, 2, 1, std::vector<double>(3)), Error);
  const Image img(2, 3, 3, 0.25);
  CHECK(img.size() == 18);
  CHECK(img.row_stride() == 9);
  CHECK(img.at(1, 2, 2) == 0.25);
}

TEST_CASE("ppm with all bytes 255 loads as ones") {
  const fs::path path = scratch_dir() / "white.ppm";
  write_bytes(path, "P6\n2 2\n255\n", std::string(12, '\xff'));
  const Image img = load_image(path.string());
  CHECK(img.height() == 2);
  CHECK(img.width() == 2);
  CHECK(img.channels() == 3);
  for (double v : img.values()) CHECK(v == 1.0);
}

TEST_CASE("pgm zero byte loads as zero") {
  const fs::path path = scratch_dir() / "black.pgm";
  write_bytes(path, "P5\n# comment\n1 1\n255\n", std::string(1, '\0'));
  const Image img = load_image(path.string());
  CHECK(img.channels() == 1);
  CHECK(img.at(0, 0, 0) == 0.0);
}

TEST_CASE("malformed files are rejected") {
  const fs::path truncated = scratch_dir() / "short.ppm";
  write_bytes(truncated, "P6\n4 4\n255\n", std::string(5, 'a'));
  CHECK_THROWS_AS(load_image(truncated.string()), Error);
  const fs::path maxval = scratch_dir() / "deep.pgm";
  write_bytes(maxval, "P5\n1 1\n65535\n", std::string(2, '\0'));
  CHECK_THROWS_AS(load_image(maxval.string()), Error);
  CHECK_THROWS_AS(load_image((scratch_dir() / "missing.png").string()), Error);
}

TEST_CASE("save rounds half away from zero") {
  const fs::path path = scratch_dir() / "half.pgm";
  save_image(Image(2, 2, 1, 0.5), path.string(), true);
  std::ifstream in(path, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  REQUIRE(bytes.size() >= 4);
  for (std::size_t i = bytes.size() - 4; i < bytes.size(); ++i) {
    CHECK(static_cast<unsigned char>(bytes[i]) == 128);
  }
  CHECK(load_image(path.string()).at(0, 0, 0) == 128.0 / 255.0);

  const fs::path ones = scratch_dir() / "ones.pgm";
  save_image(Image(1, 3, 1, 1.0), ones.string(), false);
  CHECK(load_image(ones.string()) == Image(1, 3, 1, 1.0));
}

TEST_CASE("out-of-range values need clip") {
  const Image img(1, 1, 1, 1.2);
  const fs::path path = scratch_dir() / "bright.pgm";
  CHECK_THROWS_AS(save_image(img, path.string(), false), Error);
  save_image(img, path.string(), true);
  CHECK(load_image(path.string()).at(0, 0, 0) == 1.0);
}

TEST_CASE("save then load equals clamp and quantize") {
  std::mt19937_64 rng(11);
  for (const char* ext : {".ppm", ".png"}) {
    const Image img = testing_support::random_image(rng, 7, 9, 3, -0.2, 1.2);
    const fs::path path = scratch_dir() / (std::string("rt") + ext);
    save_image(img, path.string(), true);
    const Image back = load_image(path.string());
    REQUIRE(back.same_shape(img));
    for (std::size_t i = 0; i < img.size(); ++i) {
      const double q = std::round(std::clamp(img.values()[i], 0.0, 1.0) * 255.0) / 255.0;
      CHECK(back.values()[i] == q);
    }
    // A second round trip is lossless.
    save_image(back, path.string(), false);
    CHECK(load_image(path.string()) == back);
  }
}

TEST_CASE("gray png round trip") {
  std::mt19937_64 rng(12);
  const Image img = testing_support::random_image(rng, 5, 4, 1);
  const fs::path path = scratch_dir() / "gray.png";
  save_image(img, path.string(), true);
  const Image back = load_image(path.string());
  CHECK(back.channels() == 1);
  CHECK(testing_support::max_diff(back, img) <= 0.5 / 255.0 + 1e-15);
}

TEST_CASE("stats of constant and single pixel images") {
  const ImageStats s = image_stats(Image(6, 5, 3, 0.3));
  CHECK(s.min == 0.3);
  CHECK(s.max == 0.3);
  CHECK(s.mean == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(s.high_freq_energy == 0.0);
  CHECK(image_stats(Image(1, 1, 1, 0.7)).high_freq_energy == 0.0);
}

TEST_CASE("high frequency energy of an impulse") {
  Image impulse(16, 16, 1);
  impulse.at(8, 8, 0) = 1.0;
  const Image smooth = testing_support::conv2d(impulse, testing_support::gaussian_taps(5, 1.0));
  double expected = 0.0;
  for (std::size_t i = 0; i < impulse.size(); ++i) {
    const double d = impulse.values()[i] - smooth.values()[i];
    expected += d * d;
  }
  expected /= static_cast<double>(impulse.size());
  const double got = image_stats(impulse).high_freq_energy;
  CHECK(got > 0.0);
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("high frequency energy is quadratic in scale") {
  std::mt19937_64 rng(13);
  const Image img = testing_support::random_image(rng, 12, 10, 3);
  const double base = image_stats(img).high_freq_energy;
  for (double a : {-2.0, 0.5, 3.0}) {
    CHECK(image_stats(scale(img, a)).high_freq_energy ==
          doctest::Approx(a * a * base).epsilon(1e-12));
  }
}

TEST_CASE("display normalize maps zero to mid gray") {
  CHECK(display_normalize(Image(2, 2, 1)) == Image(2, 2, 1, 0.5));
  const Image d(1, 3, 1, std::vector<double>{-2.0, 0.0, 1.0});
  const Image n = display_normalize(d);
  CHECK(n.at(0, 0, 0) == 0.0);
  CHECK(n.at(0, 1, 0) == 0.5);
  CHECK(n.at(0, 2, 0) == 0.75);
}

TEST_CASE("elementwise helpers check shapes") {
  const Image a(2, 2, 1, 1.0);
  const Image b(2, 2, 1, 0.25);
  CHECK(subtract(a, b) == Image(2, 2, 1, 0.75));
  CHECK(add(a, b) == Image(2, 2, 1, 1.25));
  CHECK(inner_product(a, b) == 1.0);
  CHECK(max_abs_difference(a, b) == 0.75);
  CHECK_THROWS_AS(add(a, Image(2, 3, 1)), Error);
  Image bad = a;
  bad.at(0, 0, 0) = std::nan("");
  CHECK_FALSE(all_finite(bad));
  CHECK(all_finite(a));
}
