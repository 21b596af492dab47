#include <doctest.h>

#include <algorithm>
#include <random>

#include "muller/error.hpp"
#include "muller/resize.hpp"
#include "support.hpp"

using namespace muller;
using testing_support::max_diff;
using testing_support::random_image;

namespace {

Image row(std::vector<double> values) {
  const int w = static_cast<int>(values.size());
  return Image(1, w, 1, std::move(values));
}

}  // namespace

TEST_CASE("same-size bilinear and nearest are identities") {
  std::mt19937_64 rng(31);
  const Image img = random_image(rng, 7, 5, 3);
  CHECK(resize_bilinear(img, 7, 5) == img);
  CHECK(resize_nearest(img, 7, 5) == img);
  CHECK(resize_area(img, 7, 5) == img);
}

TEST_CASE("bilinear half-pixel example") {
  CHECK(resize_bilinear(row({0.0, 1.0}), 1, 4) == row({0.0, 0.25, 0.75, 1.0}));
}

TEST_CASE("bilinear matches the direct formula") {
  std::mt19937_64 rng(32);
  std::uniform_int_distribution<int> dim(1, 20);
  for (int trial = 0; trial < 40; ++trial) {
    const Image img = random_image(rng, dim(rng), dim(rng), trial % 2 ? 3 : 1);
    const int oh = dim(rng);
    const int ow = dim(rng);
    CHECK(max_diff(resize_bilinear(img, oh, ow), testing_support::bilinear(img, oh, ow)) < 1e-14);
  }
}

TEST_CASE("nearest rounding rule") {
  CHECK(resize_nearest(row({0.0, 1.0}), 1, 4) == row({0.0, 0.0, 1.0, 1.0}));
  // 2x2 -> 1x1 samples the centre at (0.5, 0.5); ties go to the larger index.
  const Image checker(2, 2, 1, std::vector<double>{0.0, 1.0, 1.0, 0.0});
  CHECK(resize_nearest(checker, 1, 1).at(0, 0, 0) == 0.0);
  const Image ramp(2, 2, 1, std::vector<double>{0.1, 0.2, 0.3, 0.4});
  CHECK(resize_nearest(ramp, 1, 1).at(0, 0, 0) == 0.4);
}

TEST_CASE("area examples and brute-force oracle") {
  const Image checker(2, 2, 1, std::vector<double>{0.0, 1.0, 1.0, 0.0});
  CHECK(resize_area(checker, 1, 1).at(0, 0, 0) == 0.5);
  CHECK(resize_area(Image(4, 4, 3, 0.6), 2, 2) == Image(2, 2, 3, 0.6));

  Image ramp(3, 3, 1);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) ramp.at(y, x, 0) = 3 * y + x;
  }
  const Image got = resize_area(ramp, 2, 2);
  // Each output cell covers 1.5 x 1.5 sources: weights 2/3, 1/3 per axis.
  CHECK(got.at(0, 0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(max_diff(got, testing_support::area(ramp, 2, 2)) < 1e-14);

  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> in_dim(2, 17);
    const int h = in_dim(rng);
    const int w = in_dim(rng);
    const int oh = std::uniform_int_distribution<int>(1, h)(rng);
    const int ow = std::uniform_int_distribution<int>(1, w)(rng);
    const Image img = random_image(rng, h, w, 3);
    CHECK(max_diff(resize_area(img, oh, ow), testing_support::area(img, oh, ow)) < 1e-14);
  }
  CHECK_THROWS_AS(resize_area(ramp, 4, 4), Error);
}

TEST_CASE("resizers preserve constants and range") {
  std::mt19937_64 rng(34);
  for (ResizeMethod m : {ResizeMethod::Bilinear, ResizeMethod::Nearest, ResizeMethod::Area}) {
    const Image c(9, 6, 3, 0.37);
    CHECK(resize(c, 4, 5, m) == Image(4, 5, 3, 0.37));
    const Image img = random_image(rng, 13, 11, 1, -0.5, 2.0);
    const ImageStats in = image_stats(img);
    const ImageStats out = image_stats(resize(img, 5, 7, m));
    CHECK(out.min >= in.min);
    CHECK(out.max <= in.max);
  }
  const Image up = resize_bilinear(random_image(rng, 4, 4, 1), 11, 13);
  CHECK(image_stats(up).min >= 0.0);
  CHECK(image_stats(up).max <= 1.0);
}

TEST_CASE("resizers are linear") {
  std::mt19937_64 rng(35);
  for (ResizeMethod m : {ResizeMethod::Bilinear, ResizeMethod::Nearest, ResizeMethod::Area}) {
    const Image x = random_image(rng, 10, 9, 3);
    const Image y = random_image(rng, 10, 9, 3);
    const Image lhs = resize(add(scale(x, 0.7), scale(y, -1.3)), 6, 4, m);
    const Image rhs = add(scale(resize(x, 6, 4, m), 0.7), scale(resize(y, 6, 4, m), -1.3));
    CHECK(max_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("bilinear vjp") {
  std::mt19937_64 rng(36);
  const Image cot = random_image(rng, 4, 6, 3);
  CHECK(resize_bilinear_vjp(4, 6, 4, 6, cot) == cot);

  for (int trial = 0; trial < 10; ++trial) {
    const Image x = random_image(rng, 5, 7, trial % 2 ? 3 : 1, -1.0, 1.0);
    const Image u = random_image(rng, 3, 4, x.channels(), -1.0, 1.0);
    const double lhs = inner_product(resize_bilinear(x, 3, 4), u);
    const double rhs = inner_product(x, resize_bilinear_vjp(5, 7, 3, 4, u));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
  for (auto [oh, ow] : {std::pair{3, 4}, std::pair{12, 15}}) {
    const Image g = resize_bilinear_vjp(5, 7, oh, ow, Image(oh, ow, 1, 1.0));
    double total = 0.0;
    for (double v : g.values()) total += v;
    CHECK(total == doctest::Approx(static_cast<double>(oh * ow)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(resize_bilinear_vjp(5, 7, 3, 4, Image(2, 4, 1)), Error);
}

TEST_CASE("method names and spec validation") {
  for (ResizeMethod m : {ResizeMethod::Bilinear, ResizeMethod::Nearest, ResizeMethod::Area}) {
    CHECK(parse_resize_method(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_resize_method("bicubic"), Error);
  ResizeSpec spec;
  spec.in_h = 4;
  spec.in_w = 4;
  spec.out_h = 8;
  spec.out_w = 8;
  spec.validate();
  spec.method = ResizeMethod::Area;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.method = ResizeMethod::Bilinear;
  spec.out_h = 0;
  CHECK_THROWS_AS(spec.validate(), Error);
}
