#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "muller/image.hpp"
#include "muller/resizer.hpp"

namespace muller {

/// Gradients of a scalar loss with respect to the resizer parameters and,
/// when requested, the input image.
struct GradBuffer {
  std::vector<double> d_alpha;
  std::vector<double> d_beta;
  std::optional<Image> d_input;
};

/// Parameter gradients from a cached decomposition. The resized subbands
/// carry everything d/d(alpha, beta) needs.
GradBuffer muller_param_grads(const MullerDecomposition& parts, const MullerParams& params,
                              const Image& cotangent);

/// Reverse-mode gradients of muller_forward for the given output cotangent.
/// The input gradient is
///   R^T(cot) + sum_l (W_l - W_(l+1))^T R^T(alpha_l sigma'(u_l) cot)
/// and is only available for the bilinear base method.
GradBuffer muller_vjp(const Image& img, const MullerParams& params, int out_h, int out_w,
                      const Image& cotangent, bool want_input = false);

using LossFn = std::function<double(const Image&)>;

/// Central differences (f(theta + eps) - f(theta - eps)) / (2 eps) of
/// loss(muller_forward(...)) for every alpha, beta and optionally every
/// input sample.
GradBuffer finite_diff_grads(const Image& img, const MullerParams& params, int out_h, int out_w,
                             const LossFn& loss, double eps, bool want_input = false);

/// |a - b| / max(|a|, |b|, 1e-8)
double relative_error(double analytic, double numeric);

struct GradcheckOptions {
  std::uint64_t seed = 0;
  int instances = 20;        // random parameter-gradient instances
  int image_size = 16;
  int input_instances = 20;  // random input-gradient instances
  int input_size = 8;
  // Steps near the minimum of truncation plus roundoff error for these sizes.
  double param_eps = 3e-5;
  double input_eps = 1e-5;
  double param_tolerance = 1e-6;
  double input_tolerance = 1e-5;
  /// Perturbs the analytic alpha gradient by 1% so the check must fail.
  bool inject_bug = false;
};

struct GradcheckEntry {
  int instance = 0;
  std::string name;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct GradcheckReport {
  std::vector<GradcheckEntry> entries;
  double max_param_error = 0.0;
  double max_input_error = 0.0;

  bool passed() const;
};

/// Compares muller_vjp against finite_diff_grads on random instances with a
/// random-projection loss sum(r * z).
GradcheckReport run_gradcheck(const GradcheckOptions& options);

}  // namespace muller
