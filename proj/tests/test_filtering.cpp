#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "muller/error.hpp"
#include "muller/filtering.hpp"
#include "support.hpp"

using namespace muller;
using testing_support::conv2d;
using testing_support::gaussian_taps;
using testing_support::max_diff;
using testing_support::random_image;

TEST_CASE("kernel taps are normalized, symmetric and positive") {
  for (int ksize : {1, 3, 5, 7, 9}) {
    for (double std : {0.5, 1.0, 1.5, 2.0}) {
      const GaussianKernel1D k = gaussian_kernel(ksize, std);
      REQUIRE(k.taps.size() == static_cast<std::size_t>(ksize));
      const double sum = std::accumulate(k.taps.begin(), k.taps.end(), 0.0);
      CHECK(std::fabs(sum - 1.0) < 1e-12);
      for (int i = 0; i < ksize; ++i) {
        CHECK(k.taps[static_cast<std::size_t>(i)] > 0.0);
        CHECK(k.taps[static_cast<std::size_t>(i)] ==
              k.taps[static_cast<std::size_t>(ksize - 1 - i)]);
      }
    }
  }
}

TEST_CASE("small kernels") {
  CHECK(gaussian_kernel(1, 1.0).taps == std::vector<double>{1.0});
  const double w = std::exp(-0.5) / (1.0 + 2.0 * std::exp(-0.5));
  const GaussianKernel1D k3 = gaussian_kernel(3, 1.0);
  CHECK(k3.taps[0] == doctest::Approx(w).epsilon(1e-15));
  CHECK(k3.taps[1] == doctest::Approx(1.0 - 2.0 * w).epsilon(1e-15));
  CHECK(w == doctest::Approx(0.274069).epsilon(1e-6));

  const std::vector<double> golden = {0.05448868454964294, 0.24420134200323332,
                                      0.40261994689424746, 0.24420134200323332,
                                      0.05448868454964294};
  const GaussianKernel1D k5 = gaussian_kernel(5, 1.0);
  for (std::size_t i = 0; i < 5; ++i) CHECK(k5.taps[i] == doctest::Approx(golden[i]).epsilon(1e-14));
}

TEST_CASE("kernel arguments are validated") {
  CHECK_THROWS_AS(gaussian_kernel(4, 1.0), Error);
  CHECK_THROWS_AS(gaussian_kernel(0, 1.0), Error);
  CHECK_THROWS_AS(gaussian_kernel(5, 0.0), Error);
  CHECK_THROWS_AS(gaussian_kernel(5, std::nan("")), Error);
}

TEST_CASE("separable convolution matches the 2-D oracle") {
  std::mt19937_64 rng(21);
  for (int ksize : {3, 5, 7}) {
    for (double std : {1.0, 1.5, 2.0}) {
      const Image img = random_image(rng, 12, 12, 3);
      const Image got = separable_convolve(img, gaussian_kernel(ksize, std));
      CHECK(max_diff(got, conv2d(img, gaussian_taps(ksize, std))) < 1e-12);
    }
  }
  // Kernel wider than the image exercises clamping on both sides at once.
  const Image thin = random_image(rng, 2, 3, 1);
  CHECK(max_diff(separable_convolve(thin, gaussian_kernel(9, 2.0)),
                 conv2d(thin, gaussian_taps(9, 2.0))) < 1e-12);
}

TEST_CASE("impulse response is the outer product of taps") {
  Image impulse(16, 16, 1);
  impulse.at(8, 8, 0) = 1.0;
  const GaussianKernel1D k = gaussian_kernel(5, 1.0);
  const Image out = separable_convolve(impulse, k);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      const int dy = y - 8 + 2;
      const int dx = x - 8 + 2;
      const bool inside = dy >= 0 && dy < 5 && dx >= 0 && dx < 5;
      const double expected =
          inside ? k.taps[static_cast<std::size_t>(dy)] * k.taps[static_cast<std::size_t>(dx)] : 0.0;
      CHECK(out.at(y, x, 0) == doctest::Approx(expected).epsilon(1e-15));
    }
  }
}

TEST_CASE("constants are preserved exactly") {
  const Image c(9, 7, 3, 0.3);
  CHECK(separable_convolve(c, gaussian_kernel(5, 1.0)) == c);
  CHECK(separable_convolve(c, gaussian_kernel(9, 2.0)) == c);
}

TEST_CASE("convolution is linear") {
  std::mt19937_64 rng(22);
  const GaussianKernel1D k = gaussian_kernel(5, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Image x = random_image(rng, 8, 8, 1);
    const Image y = random_image(rng, 8, 8, 1);
    const double a = 1.7;
    const double b = -0.6;
    const Image lhs = separable_convolve(add(scale(x, a), scale(y, b)), k);
    const Image rhs = add(scale(separable_convolve(x, k), a), scale(separable_convolve(y, k), b));
    CHECK(max_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("transpose satisfies the adjoint identity") {
  std::mt19937_64 rng(23);
  for (int ksize : {3, 5, 9}) {
    const GaussianKernel1D k = gaussian_kernel(ksize, 1.5);
    const Image x = random_image(rng, 6, 11, 3, -1.0, 1.0);
    const Image u = random_image(rng, 6, 11, 3, -1.0, 1.0);
    const double lhs = inner_product(separable_convolve(x, k), u);
    const double rhs = inner_product(x, separable_convolve_transpose(u, k));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("filter bank layout") {
  std::mt19937_64 rng(24);
  const Image img = random_image(rng, 10, 10, 1);
  const FilterBank k1 = filter_bank(img, 1, 5, 1.0);
  REQUIRE(k1.smoothed.size() == 2);
  CHECK(k1.input() == img);
  CHECK(k1.smoothed[0] == separable_convolve(img, gaussian_kernel(5, 1.0)));

  Image impulse(16, 16, 1);
  impulse.at(7, 9, 0) = 1.0;
  const FilterBank k2 = filter_bank(impulse, 2, 5, 1.0);
  const auto taps = gaussian_taps(5, 1.0);
  CHECK(max_diff(k2.smoothed[1], conv2d(impulse, taps)) < 1e-15);
  CHECK(max_diff(k2.smoothed[0], conv2d(conv2d(impulse, taps), taps)) < 1e-15);
  for (const Image& s : k2.smoothed) CHECK(s.same_shape(impulse));

  const FilterBank flat = filter_bank(Image(5, 5, 3, 0.8), 3, 5, 1.0);
  for (const Image& s : flat.smoothed) CHECK(s == Image(5, 5, 3, 0.8));
  CHECK_THROWS_AS(filter_bank(img, 0, 5, 1.0), Error);
}

TEST_CASE("subbands reject DC and telescope") {
  for (const Image& s : laplacian_subbands(filter_bank(Image(6, 6, 3, 0.42), 3, 5, 1.0))) {
    CHECK(s == Image(6, 6, 3, 0.0));
  }

  std::mt19937_64 rng(25);
  const Image img = random_image(rng, 8, 8, 1);
  const FilterBank k1 = filter_bank(img, 1, 5, 1.0);
  CHECK(laplacian_subbands(k1)[0] == subtract(k1.smoothed[0], img));

  const FilterBank bank = filter_bank(img, 3, 5, 1.0);
  const std::vector<Image> bands = laplacian_subbands(bank);
  REQUIRE(bands.size() == 3);
  Image sum(8, 8, 1);
  for (const Image& b : bands) sum = add(sum, b);
  const auto taps = gaussian_taps(5, 1.0);
  const Image w3 = conv2d(conv2d(conv2d(img, taps), taps), taps);
  CHECK(max_diff(sum, subtract(w3, img)) < 1e-12);
}

TEST_CASE("smoothing lowers high frequency energy") {
  std::mt19937_64 rng(26);
  const Image img = random_image(rng, 32, 32, 3);
  const FilterBank bank = filter_bank(img, 4, 5, 1.0);
  for (std::size_t i = 0; i + 1 < bank.smoothed.size(); ++i) {
    CHECK(image_stats(bank.smoothed[i]).high_freq_energy <=
          image_stats(bank.smoothed[i + 1]).high_freq_energy);
  }
}
