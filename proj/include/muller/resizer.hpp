#pragma once

#include <string>
#include <vector>

#include "muller/activation.hpp"
#include "muller/filtering.hpp"
#include "muller/image.hpp"
#include "muller/resize.hpp"

namespace muller {

enum class Nonlinearity { Tanh, Identity };

/// Base resizer inside the multilayer resizer. Area is only used to prepare
/// inputs upstream and is not a valid base method.
enum class BaseMethod { Bilinear, Nearest };

/// How (alpha, beta) enter each residual layer.
///   ScaleThenShift: sigma(alpha * R(s) + beta)       (default)
///   ShiftThenScale: sigma(alpha * (R(s) + beta))
enum class TermOrder { ScaleThenShift, ShiftThenScale };

std::string to_string(Nonlinearity value);
std::string to_string(BaseMethod value);
std::string to_string(TermOrder value);
Nonlinearity parse_nonlinearity(const std::string& name);
BaseMethod parse_base_method(const std::string& name);
TermOrder parse_term_order(const std::string& name);

ResizeMethod to_resize_method(BaseMethod method);

struct LayerParams {
  double alpha = 0.0;
  double beta = 0.0;

  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

struct MullerParams {
  /// One (alpha, beta) pair per layer; layers[0] acts on the coarsest band.
  std::vector<LayerParams> layers;
  int ksize = 5;
  double std = 1.0;
  Nonlinearity nonlinearity = Nonlinearity::Tanh;
  BaseMethod base_method = BaseMethod::Bilinear;
  TermOrder term_order = TermOrder::ScaleThenShift;

  /// k zero-initialized layers with the default kernel (ksize 5, std 1).
  static MullerParams with_layers(int k);

  int k() const noexcept { return static_cast<int>(layers.size()); }
  int trainable_count() const noexcept { return 2 * k(); }
  std::vector<double> alphas() const;
  std::vector<double> betas() const;

  void validate() const;

  friend bool operator==(const MullerParams&, const MullerParams&) = default;
};

/// Base image plus every resized Laplacian subband, all at output resolution.
/// These do not depend on (alpha, beta), so callers that evaluate many
/// parameter settings on one image can decompose once and compose repeatedly.
struct MullerDecomposition {
  Image base;
  std::vector<Image> subbands;
};

MullerDecomposition muller_decompose(const Image& img, const MullerParams& params, int out_h,
                                     int out_w);

/// z = R(x) + sum_l sigma(u_l), u_l the per-layer affine response of R(s_l).
Image muller_compose(const MullerDecomposition& parts, const MullerParams& params);

/// Resizes the input and its k smoothed versions with the base method (k + 1
/// resizes in total) and sums the squashed layers onto the base image. The
/// output is not clamped.
Image muller_forward(const Image& img, const MullerParams& params, int out_h, int out_w);

/// Pre-activation of one layer for a resized subband sample.
inline double layer_response(const MullerParams& params, const LayerParams& layer, double r) {
  return params.term_order == TermOrder::ScaleThenShift ? layer.alpha * r + layer.beta
                                                          : layer.alpha * (r + layer.beta);
}

/// sigma(u); tanh uses tanh_kernel everywhere, forward and backward.
inline double activate(Nonlinearity nonlinearity, double u) {
  return nonlinearity == Nonlinearity::Tanh ? tanh_kernel(u) : u;
}

/// sigma'(u), with tanh' = 1 - tanh^2.
inline double activation_slope(Nonlinearity nonlinearity, double u) {
  if (nonlinearity == Nonlinearity::Identity) {
    return 1.0;
  }
  const double t = tanh_kernel(u);
  return 1.0 - t * t;
}

struct GammaCoeffs {
  std::vector<double> gamma;  // gamma_0 .. gamma_k
  double delta = 0.0;
};

/// Coefficients of the equivalent Laplacian form
///   y = gamma_0 R(x) + sum_l gamma_l R(L_l x) + delta,  L_l = I - W^(k-l+1).
/// With identity activation, gamma_0 = 1 and gamma_l = alpha_(l-1) - alpha_l
/// (alpha_0 = 0). delta is sum beta_l, or sum alpha_l beta_l under
/// ShiftThenScale. Requires the identity nonlinearity.
GammaCoeffs derive_gamma(const MullerParams& params);

/// Evaluates the Laplacian form directly from the filter bank. Independent
/// route to muller_forward for the identity nonlinearity.
Image muller_forward_linear_form(const Image& img, const MullerParams& params, int out_h,
                                 int out_w);

struct FlopsReport {
  double resize_flops = 0.0;
  double filter_flops = 0.0;
  double pointwise_flops = 0.0;
  double total = 0.0;
  int resize_applications = 0;
  int filter_applications = 0;
};

// Cost model, per channel value:
//   bilinear sample        8 flops (4 multiply-adds), nearest 0, area 2 per
//                          covered source pixel
//   separable Gaussian     2 passes x ksize multiply-adds = 4 * ksize flops
//   subband difference     1 flop at input resolution
//   layer pointwise        affine (2) + nonlinearity (1) + accumulate (1)
inline constexpr double kBilinearFlopsPerSample = 8.0;
inline constexpr double kPointwiseFlopsPerLayer = 4.0;

FlopsReport muller_flops(const ResizeSpec& spec, int channels, const MullerParams& params);

/// Cost of the base resize alone, the k = 0 limit of muller_flops.
double base_resize_flops(const ResizeSpec& spec, int channels);

/// Learned parameters for name in {effnet_b0, mobilenet_v2, resnet50}, from
/// training with anti-aliased (antialias = true) or aliased inputs.
MullerParams preset(const std::string& name, bool antialias);
std::vector<std::string> preset_names();

/// JSON document with fields k, ksize, std, nonlinearity, base_method,
/// layers [{alpha, beta}...], term_order.
std::string params_to_json(const MullerParams& params, int indent = 2);
MullerParams params_from_json(const std::string& text);

}  // namespace muller
