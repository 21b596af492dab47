#include "muller/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "muller/error.hpp"
#include "muller/filtering.hpp"
#include "muller/resize.hpp"

namespace muller {

namespace {

void check_cotangent(const Image& cotangent, int out_h, int out_w, int channels) {
  if (cotangent.height() != out_h || cotangent.width() != out_w ||
      cotangent.channels() != channels) {
    fail(ErrorCode::Dimension, "cotangent shape does not match the resizer output");
  }
}

}  // namespace

GradBuffer muller_param_grads(const MullerDecomposition& parts, const MullerParams& params,
                              const Image& cotangent) {
  if (parts.subbands.size() != params.layers.size()) {
    fail(ErrorCode::Dimension, "decomposition and parameters disagree on the layer count");
  }
  check_cotangent(cotangent, parts.base.height(), parts.base.width(), parts.base.channels());

  GradBuffer grads;
  grads.d_alpha.assign(params.layers.size(), 0.0);
  grads.d_beta.assign(params.layers.size(), 0.0);
  const auto cot = cotangent.values();
  const bool inner_shift = params.term_order == TermOrder::ShiftThenScale;

  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const LayerParams& layer = params.layers[l];
    const auto band = parts.subbands[l].values();
    double d_alpha = 0.0;
    double d_beta = 0.0;
    for (std::size_t i = 0; i < band.size(); ++i) {
      const double g =
          cot[i] * activation_slope(params.nonlinearity, layer_response(params, layer, band[i]));
      if (inner_shift) {
        d_alpha += g * (band[i] + layer.beta);
        d_beta += g * layer.alpha;
      } else {
        d_alpha += g * band[i];
        d_beta += g;
      }
    }
    grads.d_alpha[l] = d_alpha;
    grads.d_beta[l] = d_beta;
  }
  return grads;
}

GradBuffer muller_vjp(const Image& img, const MullerParams& params, int out_h, int out_w,
                      const Image& cotangent, bool want_input) {
  params.validate();
  check_cotangent(cotangent, out_h, out_w, img.channels());
  if (want_input && params.base_method != BaseMethod::Bilinear) {
    fail(ErrorCode::Unsupported, "input gradients require the bilinear base method");
  }

  const MullerDecomposition parts = muller_decompose(img, params, out_h, out_w);
  GradBuffer grads = muller_param_grads(parts, params, cotangent);
  if (!want_input) {
    return grads;
  }

  const int k = params.k();
  const int in_h = img.height();
  const int in_w = img.width();
  const GaussianKernel1D kernel = gaussian_kernel(params.ksize, params.std);
  const auto cot = cotangent.values();

  // back[p] = R^T(alpha_l sigma'(u_l) cot) for the band whose filter
  // difference is W^p - W^(p-1), p = k - l.
  std::vector<Image> back(static_cast<std::size_t>(k) + 2, Image(in_h, in_w, img.channels()));
  for (int l = 0; l < k; ++l) {
    const LayerParams& layer = params.layers[static_cast<std::size_t>(l)];
    const auto band = parts.subbands[static_cast<std::size_t>(l)].values();
    Image scaled(out_h, out_w, img.channels());
    auto s = scaled.values();
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = layer.alpha *
             activation_slope(params.nonlinearity, layer_response(params, layer, band[i])) * cot[i];
    }
    back[static_cast<std::size_t>(k - l)] = resize_bilinear_vjp(in_h, in_w, out_h, out_w, scaled);
  }

  // sum_p (W^T)^p (back[p] - back[p + 1]) by Horner's rule, back[0] = back[k+1] = 0.
  Image acc = back[static_cast<std::size_t>(k)];
  for (int p = k - 1; p >= 0; --p) {
    acc = add(separable_convolve_transpose(acc, kernel),
              subtract(back[static_cast<std::size_t>(p)], back[static_cast<std::size_t>(p) + 1]));
  }
  grads.d_input = add(resize_bilinear_vjp(in_h, in_w, out_h, out_w, cotangent), acc);
  return grads;
}

GradBuffer finite_diff_grads(const Image& img, const MullerParams& params, int out_h, int out_w,
                             const LossFn& loss, double eps, bool want_input) {
  if (!(eps > 0.0)) {
    fail(ErrorCode::InvalidArgument, "finite-difference step must be positive");
  }
  params.validate();
  auto evaluate = [&](const Image& x, const MullerParams& p) {
    return loss(muller_forward(x, p, out_h, out_w));
  };

  GradBuffer grads;
  grads.d_alpha.resize(params.layers.size());
  grads.d_beta.resize(params.layers.size());
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    MullerParams plus = params;
    MullerParams minus = params;
    plus.layers[l].alpha += eps;
    minus.layers[l].alpha -= eps;
    grads.d_alpha[l] = (evaluate(img, plus) - evaluate(img, minus)) / (2.0 * eps);

    plus = params;
    minus = params;
    plus.layers[l].beta += eps;
    minus.layers[l].beta -= eps;
    grads.d_beta[l] = (evaluate(img, plus) - evaluate(img, minus)) / (2.0 * eps);
  }

  if (want_input) {
    Image d_input(img.height(), img.width(), img.channels());
    Image probe = img;
    for (std::size_t i = 0; i < img.size(); ++i) {
      const double original = probe.values()[i];
      probe.values()[i] = original + eps;
      const double up = evaluate(probe, params);
      probe.values()[i] = original - eps;
      const double down = evaluate(probe, params);
      probe.values()[i] = original;
      d_input.values()[i] = (up - down) / (2.0 * eps);
    }
    grads.d_input = std::move(d_input);
  }
  return grads;
}

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

bool GradcheckReport::passed() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const GradcheckEntry& e) { return e.passed; });
}

namespace {

struct RandomInstance {
  Image image;
  MullerParams params;
  int out_h;
  int out_w;
  Image projection;
};

RandomInstance random_instance(std::mt19937_64& rng, int size, bool allow_identity) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> alpha(-3.0, 3.0);
  std::uniform_real_distribution<double> beta(-0.5, 0.5);
  std::uniform_int_distribution<int> layers(1, 3);
  std::uniform_int_distribution<int> dim(std::max(2, size / 3), size + size / 2);
  std::normal_distribution<double> normal(0.0, 1.0);

  RandomInstance inst;
  inst.image = Image(size, size, 1);
  for (double& v : inst.image.values()) {
    v = unit(rng);
  }
  inst.params = MullerParams::with_layers(layers(rng));
  for (LayerParams& layer : inst.params.layers) {
    layer.alpha = alpha(rng);
    layer.beta = beta(rng);
  }
  if (allow_identity && unit(rng) < 0.25) {
    inst.params.nonlinearity = Nonlinearity::Identity;
  }
  if (unit(rng) < 0.25) {
    inst.params.term_order = TermOrder::ShiftThenScale;
  }
  inst.out_h = dim(rng);
  inst.out_w = dim(rng);
  inst.projection = Image(inst.out_h, inst.out_w, 1);
  for (double& v : inst.projection.values()) {
    v = normal(rng);
  }
  return inst;
}

GradcheckEntry make_entry(int instance, std::string name, double analytic, double numeric,
                          double tolerance) {
  GradcheckEntry entry;
  entry.instance = instance;
  entry.name = std::move(name);
  entry.analytic = analytic;
  entry.numeric = numeric;
  entry.rel_error = relative_error(analytic, numeric);
  entry.tolerance = tolerance;
  entry.passed = entry.rel_error < tolerance;
  return entry;
}

}  // namespace

GradcheckReport run_gradcheck(const GradcheckOptions& options) {
  if (options.instances < 0 || options.input_instances < 0 || options.image_size < 1 ||
      options.input_size < 1) {
    fail(ErrorCode::InvalidArgument, "invalid gradient-check options");
  }
  GradcheckReport report;
  std::mt19937_64 rng(options.seed);

  for (int n = 0; n < options.instances; ++n) {
    const RandomInstance inst = random_instance(rng, options.image_size, !options.inject_bug);
    const Image& r = inst.projection;
    const LossFn loss = [&r](const Image& z) { return inner_product(r, z); };
    GradBuffer analytic = muller_vjp(inst.image, inst.params, inst.out_h, inst.out_w, r);
    const GradBuffer numeric = finite_diff_grads(inst.image, inst.params, inst.out_h, inst.out_w,
                                                 loss, options.param_eps);
    if (options.inject_bug) {
      for (double& g : analytic.d_alpha) g *= 1.01;
    }
    for (std::size_t l = 0; l < analytic.d_alpha.size(); ++l) {
      const std::string idx = "[" + std::to_string(l) + "]";
      report.entries.push_back(make_entry(n, "alpha" + idx, analytic.d_alpha[l],
                                          numeric.d_alpha[l], options.param_tolerance));
      report.entries.push_back(make_entry(n, "beta" + idx, analytic.d_beta[l], numeric.d_beta[l],
                                          options.param_tolerance));
      report.max_param_error = std::max({report.max_param_error, report.entries.rbegin()[0].rel_error,
                                         report.entries.rbegin()[1].rel_error});
    }
  }

  for (int n = 0; n < options.input_instances; ++n) {
    const RandomInstance inst = random_instance(rng, options.input_size, true);
    const Image& r = inst.projection;
    const LossFn loss = [&r](const Image& z) { return inner_product(r, z); };
    const GradBuffer analytic =
        muller_vjp(inst.image, inst.params, inst.out_h, inst.out_w, r, true);
    const GradBuffer numeric = finite_diff_grads(inst.image, inst.params, inst.out_h, inst.out_w,
                                                 loss, options.input_eps, true);
    const auto a = analytic.d_input->values();
    const auto f = numeric.d_input->values();
    for (int y = 0; y < inst.image.height(); ++y) {
      for (int x = 0; x < inst.image.width(); ++x) {
        const std::size_t i = static_cast<std::size_t>(y * inst.image.width() + x);
        report.entries.push_back(make_entry(
            n, "input[" + std::to_string(y) + "," + std::to_string(x) + "]", a[i], f[i],
            options.input_tolerance));
        report.max_input_error = std::max(report.max_input_error, report.entries.back().rel_error);
      }
    }
  }
  return report;
}

}  // namespace muller
