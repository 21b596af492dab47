#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

namespace muller {

/// Branch-free tanh built on a Pade-form exp. Within a few ulp of std::tanh,
/// odd, and exactly zero at zero. With
/// y = 2|x| = n ln2 + r and e^r = (Q + rP) / (Q - rP),
///   tanh|x| = ((2^n - 1) Q + (2^n + 1) rP) / ((2^n + 1) Q + (2^n - 1) rP).
inline double tanh_kernel(double x) {
  constexpr double kLog2e = 1.4426950408889634074;
  constexpr double kLn2Hi = 6.93145751953125e-1;
  constexpr double kLn2Lo = 1.42860682030941723212e-6;
  constexpr double kShifter = 6755399441055744.0;  // 2^52 + 2^51, rounds to integer
  constexpr double kP0 = 1.26177193074810590878e-4;
  constexpr double kP1 = 3.02994407707441961300e-2;
  constexpr double kP2 = 9.99999999999999999910e-1;
  constexpr double kQ0 = 3.00198505138664455042e-6;
  constexpr double kQ1 = 2.52448340349684104192e-3;
  constexpr double kQ2 = 2.27265548208155028766e-1;
  constexpr double kQ3 = 2.00000000000000000009e0;

  // tanh(20) rounds to 1.
  const double y = std::min(2.0 * std::fabs(x), 40.0);
  const double shifted = y * kLog2e + kShifter;
  const double n = shifted - kShifter;
  const double r = (y - n * kLn2Hi) - n * kLn2Lo;
  const double rr = r * r;
  const double p = r * ((kP0 * rr + kP1) * rr + kP2);
  const double q = ((kQ0 * rr + kQ1) * rr + kQ2) * rr + kQ3;
  const std::uint64_t exponent = (std::bit_cast<std::uint64_t>(shifted) + 1023) << 52;
  const double scale = std::bit_cast<double>(exponent);
  // scale - 1 and scale + 1 are exact, so n = 0 reduces to p / q.
  const double num = (scale - 1.0) * q + (scale + 1.0) * p;
  const double den = (scale + 1.0) * q + (scale - 1.0) * p;
  return std::copysign(num / den, x);
}

}  // namespace muller
