#pragma once

#include "muller/image.hpp"
#include "muller/resizer.hpp"

namespace muller {

struct TimingStats {
  double median_ms = 0.0;
  double p90_ms = 0.0;
};

struct BenchReport {
  TimingStats bilinear;
  TimingStats muller;
  /// muller.median_ms / bilinear.median_ms
  double overhead_ratio = 0.0;
  int reps = 0;
};

/// Wall-clock comparison of the plain bilinear resize against the full
/// multilayer resizer on the same input. Each measurement is repeated reps
/// times after one warm-up call, alternating between the two.
BenchReport bench_resizer(const Image& img, const MullerParams& params, int out_h, int out_w,
                          int reps);

}  // namespace muller
