#include "muller/resizer.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "band_operator.hpp"
#include "muller/error.hpp"
#include "simd.hpp"

namespace muller {

std::string to_string(Nonlinearity value) {
  return value == Nonlinearity::Tanh ? "tanh" : "identity";
}

std::string to_string(BaseMethod value) {
  return value == BaseMethod::Bilinear ? "bilinear" : "nearest";
}

std::string to_string(TermOrder value) {
  return value == TermOrder::ScaleThenShift ? "scale_then_shift" : "shift_then_scale";
}

Nonlinearity parse_nonlinearity(const std::string& name) {
  if (name == "tanh") return Nonlinearity::Tanh;
  if (name == "identity" || name == "linear") return Nonlinearity::Identity;
  fail(ErrorCode::InvalidArgument, "unknown nonlinearity '" + name + "'");
}

BaseMethod parse_base_method(const std::string& name) {
  if (name == "bilinear") return BaseMethod::Bilinear;
  if (name == "nearest") return BaseMethod::Nearest;
  fail(ErrorCode::InvalidArgument, "unknown base method '" + name + "'");
}

TermOrder parse_term_order(const std::string& name) {
  if (name == "scale_then_shift") return TermOrder::ScaleThenShift;
  if (name == "shift_then_scale") return TermOrder::ShiftThenScale;
  fail(ErrorCode::InvalidArgument, "unknown term order '" + name + "'");
}

ResizeMethod to_resize_method(BaseMethod method) {
  return method == BaseMethod::Bilinear ? ResizeMethod::Bilinear : ResizeMethod::Nearest;
}

MullerParams MullerParams::with_layers(int k) {
  if (k < 1) {
    fail(ErrorCode::InvalidArgument, "layer count must be at least 1, got " + std::to_string(k));
  }
  MullerParams params;
  params.layers.resize(static_cast<std::size_t>(k));
  return params;
}

std::vector<double> MullerParams::alphas() const {
  std::vector<double> out;
  out.reserve(layers.size());
  for (const auto& layer : layers) out.push_back(layer.alpha);
  return out;
}

std::vector<double> MullerParams::betas() const {
  std::vector<double> out;
  out.reserve(layers.size());
  for (const auto& layer : layers) out.push_back(layer.beta);
  return out;
}

void MullerParams::validate() const {
  if (layers.empty()) {
    fail(ErrorCode::InvalidArgument, "resizer needs at least one layer");
  }
  if (ksize < 1 || ksize % 2 == 0) {
    fail(ErrorCode::InvalidArgument, "kernel size must be a positive odd number");
  }
  if (!(std > 0.0) || !std::isfinite(std)) {
    fail(ErrorCode::InvalidArgument, "kernel standard deviation must be positive");
  }
  for (const auto& layer : layers) {
    if (!std::isfinite(layer.alpha) || !std::isfinite(layer.beta)) {
      fail(ErrorCode::InvalidArgument, "layer parameters must be finite");
    }
  }
}

MullerDecomposition muller_decompose(const Image& img, const MullerParams& params, int out_h,
                                     int out_w) {
  params.validate();
  if (out_h < 1 || out_w < 1) {
    fail(ErrorCode::Dimension, "target dimensions must be at least 1x1");
  }
  const ResizeMethod method = to_resize_method(params.base_method);
  const GaussianKernel1D kernel = gaussian_kernel(params.ksize, params.std);
  const int k = params.k();

  // R W^p x for p = 1..k. Resizing and smoothing are both separable, so each
  // is one banded operator per axis applied straight to the input.
  MullerDecomposition parts;
  parts.base = resize(img, out_h, out_w, method);
  std::vector<Image> resized;
  resized.reserve(static_cast<std::size_t>(k));
  for (int p = 1; p <= k; ++p) {
    resized.push_back(detail::apply_separable(
        img, detail::smoothed_resize_axis(img.height(), out_h, method, kernel, p),
        detail::smoothed_resize_axis(img.width(), out_w, method, kernel, p)));
  }
  // Layer l holds R (W^p - W^(p-1)) x with p = k - l.
  parts.subbands.reserve(static_cast<std::size_t>(k));
  for (int l = 0; l < k; ++l) {
    const int p = k - l;
    const Image& finer = p == 1 ? parts.base : resized[static_cast<std::size_t>(p - 2)];
    parts.subbands.push_back(subtract(resized[static_cast<std::size_t>(p - 1)], finer));
  }
  return parts;
}

namespace {

// z += tanh(u) with u spelled exactly as in layer_response.
MULLER_HOT_LOOP
void add_tanh_layer(double* __restrict z, const double* __restrict band, std::size_t n,
                    double alpha, double beta, bool shift_first) {
  if (shift_first) {
    for (std::size_t i = 0; i < n; ++i) z[i] += tanh_kernel(alpha * (band[i] + beta));
  } else {
    for (std::size_t i = 0; i < n; ++i) z[i] += tanh_kernel(alpha * band[i] + beta);
  }
}

}  // namespace

Image muller_compose(const MullerDecomposition& parts, const MullerParams& params) {
  if (parts.subbands.size() != params.layers.size()) {
    fail(ErrorCode::Dimension, "decomposition has " + std::to_string(parts.subbands.size()) +
                                   " subbands but parameters have " +
                                   std::to_string(params.layers.size()) + " layers");
  }
  Image out = parts.base;
  auto z = out.values();
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const LayerParams& layer = params.layers[l];
    const auto band = parts.subbands[l].values();
    if (params.nonlinearity == Nonlinearity::Tanh) {
      add_tanh_layer(z.data(), band.data(), z.size(), layer.alpha, layer.beta,
                     params.term_order == TermOrder::ShiftThenScale);
    } else {
      for (std::size_t i = 0; i < z.size(); ++i) {
        z[i] += layer_response(params, layer, band[i]);
      }
    }
  }
  return out;
}

Image muller_forward(const Image& img, const MullerParams& params, int out_h, int out_w) {
  return muller_compose(muller_decompose(img, params, out_h, out_w), params);
}

GammaCoeffs derive_gamma(const MullerParams& params) {
  params.validate();
  if (params.nonlinearity != Nonlinearity::Identity) {
    fail(ErrorCode::InvalidArgument, "the Laplacian form only exists for the identity activation");
  }
  GammaCoeffs coeffs;
  coeffs.gamma.resize(static_cast<std::size_t>(params.k()) + 1);
  coeffs.gamma[0] = 1.0;
  double previous_alpha = 0.0;
  for (int l = 1; l <= params.k(); ++l) {
    const LayerParams& layer = params.layers[static_cast<std::size_t>(l - 1)];
    coeffs.gamma[static_cast<std::size_t>(l)] = previous_alpha - layer.alpha;
    previous_alpha = layer.alpha;
    coeffs.delta += params.term_order == TermOrder::ScaleThenShift ? layer.beta
                                                                      : layer.alpha * layer.beta;
  }
  return coeffs;
}

Image muller_forward_linear_form(const Image& img, const MullerParams& params, int out_h,
                                 int out_w) {
  const GammaCoeffs coeffs = derive_gamma(params);
  if (out_h < 1 || out_w < 1) {
    fail(ErrorCode::Dimension, "target dimensions must be at least 1x1");
  }
  const ResizeMethod method = to_resize_method(params.base_method);
  const FilterBank bank = filter_bank(img, params.k(), params.ksize, params.std);

  Image out = scale(resize(img, out_h, out_w, method), coeffs.gamma[0]);
  auto y = out.values();
  // L_l x = x - W_l x with W_l = W^(k-l+1) = smoothed[l-1].
  for (int l = 1; l <= params.k(); ++l) {
    const Image laplacian = subtract(img, bank.smoothed[static_cast<std::size_t>(l - 1)]);
    const Image resized = resize(laplacian, out_h, out_w, method);
    const double g = coeffs.gamma[static_cast<std::size_t>(l)];
    const auto r = resized.values();
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] += g * r[i];
    }
  }
  for (double& v : y) {
    v += coeffs.delta;
  }
  return out;
}

namespace {

// Area resize visits in + out - gcd(in, out) (source, output) pairs per axis.
double area_terms(int in, int out) {
  return static_cast<double>(in) + static_cast<double>(out) - static_cast<double>(std::gcd(in, out));
}

}  // namespace

double base_resize_flops(const ResizeSpec& spec, int channels) {
  spec.validate();
  const double c = static_cast<double>(channels);
  const double out_px = static_cast<double>(spec.out_h) * static_cast<double>(spec.out_w);
  switch (spec.method) {
    case ResizeMethod::Bilinear:
      return kBilinearFlopsPerSample * out_px * c;
    case ResizeMethod::Nearest:
      return 0.0;
    case ResizeMethod::Area:
      return 2.0 * c *
             (static_cast<double>(spec.in_h) * area_terms(spec.in_w, spec.out_w) +
              static_cast<double>(spec.out_w) * area_terms(spec.in_h, spec.out_h));
  }
  return 0.0;
}

FlopsReport muller_flops(const ResizeSpec& spec, int channels, const MullerParams& params) {
  params.validate();
  if (channels < 1) {
    fail(ErrorCode::InvalidArgument, "channel count must be positive");
  }
  ResizeSpec base = spec;
  base.method = to_resize_method(params.base_method);

  const double k = static_cast<double>(params.k());
  const double c = static_cast<double>(channels);
  const double in_px = static_cast<double>(spec.in_h) * static_cast<double>(spec.in_w);
  const double out_px = static_cast<double>(spec.out_h) * static_cast<double>(spec.out_w);

  FlopsReport report;
  report.resize_applications = params.k() + 1;
  report.filter_applications = params.k();
  report.resize_flops = static_cast<double>(report.resize_applications) * base_resize_flops(base, channels);
  report.filter_flops = k * (4.0 * static_cast<double>(params.ksize) + 1.0) * in_px * c;
  report.pointwise_flops = k * kPointwiseFlopsPerLayer * out_px * c;
  report.total = report.resize_flops + report.filter_flops + report.pointwise_flops;
  return report;
}

}  // namespace muller
