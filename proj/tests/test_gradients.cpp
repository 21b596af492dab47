#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "muller/error.hpp"
#include "muller/gradients.hpp"
#include "support.hpp"

using namespace muller;
using testing_support::random_image;

namespace {

MullerParams random_params(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> a(-2.0, 2.0);
  std::uniform_real_distribution<double> b(-0.3, 0.3);
  MullerParams p = MullerParams::with_layers(k);
  for (LayerParams& l : p.layers) l = {a(rng), b(rng)};
  return p;
}

LossFn projection(const Image& r) {
  return [r](const Image& z) { return inner_product(r, z); };
}

}  // namespace

TEST_CASE("zero cotangent gives zero gradients") {
  std::mt19937_64 rng(51);
  const MullerParams p = random_params(rng, 2);
  const GradBuffer g = muller_vjp(random_image(rng, 12, 12, 1), p, 6, 6, Image(6, 6, 1), true);
  CHECK(g.d_alpha == std::vector<double>(2, 0.0));
  CHECK(g.d_beta == std::vector<double>(2, 0.0));
  REQUIRE(g.d_input.has_value());
  CHECK(*g.d_input == Image(12, 12, 1));
}

TEST_CASE("constant input has no alpha gradient") {
  std::mt19937_64 rng(52);
  const MullerParams p = random_params(rng, 3);
  const GradBuffer g = muller_vjp(Image(10, 10, 3, 0.6), p, 5, 5, random_image(rng, 5, 5, 3));
  for (double d : g.d_alpha) CHECK(d == 0.0);
  for (double d : g.d_beta) CHECK(d != 0.0);
  CHECK_FALSE(g.d_input.has_value());
}

TEST_CASE("vjp matches central differences") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 8; ++trial) {
    MullerParams p = random_params(rng, 1 + trial % 3);
    p.term_order = trial % 2 ? TermOrder::ShiftThenScale : TermOrder::ScaleThenShift;
    if (trial == 5) p.base_method = BaseMethod::Nearest;
    const Image img = random_image(rng, 16, 16, 1);
    const Image r = random_image(rng, 7, 7, 1, -1.0, 1.0);
    const GradBuffer a = muller_vjp(img, p, 7, 7, r);
    const GradBuffer n = finite_diff_grads(img, p, 7, 7, projection(r), 3e-5);
    for (int l = 0; l < p.k(); ++l) {
      const auto i = static_cast<std::size_t>(l);
      CHECK(relative_error(a.d_alpha[i], n.d_alpha[i]) < 1e-6);
      CHECK(relative_error(a.d_beta[i], n.d_beta[i]) < 1e-6);
    }
  }
}

TEST_CASE("input gradient matches central differences") {
  std::mt19937_64 rng(54);
  const MullerParams p = random_params(rng, 2);
  const Image img = random_image(rng, 8, 8, 1);
  const Image r = random_image(rng, 5, 5, 1, -1.0, 1.0);
  const GradBuffer a = muller_vjp(img, p, 5, 5, r, true);
  const GradBuffer n = finite_diff_grads(img, p, 5, 5, projection(r), 1e-5, true);
  REQUIRE(a.d_input.has_value());
  REQUIRE(n.d_input.has_value());
  for (std::size_t i = 0; i < img.size(); ++i) {
    CHECK(relative_error(a.d_input->values()[i], n.d_input->values()[i]) < 1e-5);
  }
}

TEST_CASE("input gradient is the adjoint of the linear forward") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 5; ++trial) {
    MullerParams p = random_params(rng, 1 + trial % 3);
    p.nonlinearity = Nonlinearity::Identity;
    for (LayerParams& l : p.layers) l.beta = 0.0;
    const Image x = random_image(rng, 13, 11, 3, -1.0, 1.0);
    const Image u = random_image(rng, 6, 5, 3, -1.0, 1.0);
    const GradBuffer g = muller_vjp(Image(13, 11, 3), p, 6, 5, u, true);
    const double lhs = inner_product(muller_forward(x, p, 6, 5), u);
    const double rhs = inner_product(x, *g.d_input);
    CHECK(std::fabs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("nearest base has no input gradient") {
  MullerParams p = MullerParams::with_layers(2);
  p.base_method = BaseMethod::Nearest;
  CHECK_THROWS_AS(muller_vjp(Image(8, 8, 1), p, 4, 4, Image(4, 4, 1), true), Error);
  CHECK_THROWS_AS(muller_vjp(Image(8, 8, 1), p, 4, 4, Image(3, 4, 1)), Error);
}

TEST_CASE("param grads from a cached decomposition agree with vjp") {
  std::mt19937_64 rng(56);
  const MullerParams p = random_params(rng, 2);
  const Image img = random_image(rng, 20, 20, 3);
  const Image cot = random_image(rng, 9, 9, 3, -1.0, 1.0);
  const GradBuffer cached = muller_param_grads(muller_decompose(img, p, 9, 9), p, cot);
  const GradBuffer full = muller_vjp(img, p, 9, 9, cot);
  CHECK(cached.d_alpha == full.d_alpha);
  CHECK(cached.d_beta == full.d_beta);
}

TEST_CASE("finite differences are exact to second order on a linear model") {
  std::mt19937_64 rng(57);
  MullerParams p = random_params(rng, 2);
  p.nonlinearity = Nonlinearity::Identity;
  const Image img = random_image(rng, 12, 12, 1);
  const Image r = random_image(rng, 6, 6, 1, -1.0, 1.0);
  // The loss is linear in every parameter, so the step size only changes
  // roundoff.
  const GradBuffer a = muller_vjp(img, p, 6, 6, r);
  for (double eps : {1e-1, 1e-3}) {
    const GradBuffer n = finite_diff_grads(img, p, 6, 6, projection(r), eps);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(n.d_alpha[i] == doctest::Approx(a.d_alpha[i]).epsilon(1e-11));
      CHECK(n.d_beta[i] == doctest::Approx(a.d_beta[i]).epsilon(1e-11));
    }
  }
}

TEST_CASE("step-size sweep has an interior error minimum") {
  std::mt19937_64 rng(58);
  const MullerParams p = random_params(rng, 2);
  const Image img = random_image(rng, 16, 16, 1);
  const Image r = random_image(rng, 7, 7, 1, -1.0, 1.0);
  const GradBuffer a = muller_vjp(img, p, 7, 7, r);
  const std::vector<double> steps = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9};
  std::vector<double> errors;
  for (double eps : steps) {
    const GradBuffer n = finite_diff_grads(img, p, 7, 7, projection(r), eps);
    double worst = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      worst = std::max({worst, relative_error(a.d_alpha[i], n.d_alpha[i]),
                        relative_error(a.d_beta[i], n.d_beta[i])});
    }
    errors.push_back(worst);
  }
  const auto best = std::min_element(errors.begin(), errors.end()) - errors.begin();
  CHECK(best > 0);
  CHECK(best < static_cast<std::ptrdiff_t>(steps.size()) - 1);
  CHECK(errors.front() > 10.0 * errors[static_cast<std::size_t>(best)]);
  CHECK(errors.back() > 10.0 * errors[static_cast<std::size_t>(best)]);
}

TEST_CASE("relative error floor") {
  CHECK(relative_error(0.0, 0.0) == 0.0);
  CHECK(relative_error(1e-10, 0.0) == doctest::Approx(1e-2));
  CHECK(relative_error(2.0, 1.0) == 0.5);
}

TEST_CASE("gradcheck suite") {
  GradcheckOptions opts;
  opts.instances = 4;
  opts.input_instances = 2;
  const GradcheckReport ok = run_gradcheck(opts);
  CHECK(ok.passed());
  CHECK(ok.max_param_error < 1e-6);
  CHECK(ok.max_input_error < 1e-5);
  // One entry per input sample of each 8x8 input instance.
  CHECK(std::count_if(ok.entries.begin(), ok.entries.end(), [](const GradcheckEntry& e) {
          return e.name.rfind("input", 0) == 0;
        }) == 2 * 64);

  opts.inject_bug = true;
  const GradcheckReport bad = run_gradcheck(opts);
  CHECK_FALSE(bad.passed());
  CHECK(std::any_of(bad.entries.begin(), bad.entries.end(),
                    [](const GradcheckEntry& e) { return !e.passed && e.name.rfind("alpha", 0) == 0; }));
}
