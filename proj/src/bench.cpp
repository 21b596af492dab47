#include "muller/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "muller/error.hpp"

namespace muller {

namespace {

template <typename Fn>
double time_once(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

TimingStats summarize(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  TimingStats stats;
  stats.median_ms = n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  // Nearest-rank percentile.
  const std::size_t rank = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(n)));
  stats.p90_ms = samples[std::max<std::size_t>(rank, 1) - 1];
  return stats;
}

}  // namespace

BenchReport bench_resizer(const Image& img, const MullerParams& params, int out_h, int out_w,
                          int reps) {
  if (reps < 1) {
    fail(ErrorCode::InvalidArgument, "benchmark needs at least one repetition");
  }
  params.validate();
  BenchReport report;
  report.reps = reps;
  double sink = 0.0;
  auto bilinear = [&] { sink += resize_bilinear(img, out_h, out_w).values()[0]; };
  auto full = [&] { sink += muller_forward(img, params, out_h, out_w).values()[0]; };
  bilinear();  // warm-up
  full();
  // Interleaved so that slow drift in machine speed hits both alike.
  std::vector<double> bilinear_ms;
  std::vector<double> muller_ms;
  for (int i = 0; i < reps; ++i) {
    bilinear_ms.push_back(time_once(bilinear));
    muller_ms.push_back(time_once(full));
  }
  report.bilinear = summarize(std::move(bilinear_ms));
  report.muller = summarize(std::move(muller_ms));
  report.overhead_ratio =
      report.bilinear.median_ms > 0.0 ? report.muller.median_ms / report.bilinear.median_ms : 0.0;
  if (std::isnan(sink)) {
    report.overhead_ratio = 0.0;
  }
  return report;
}

}  // namespace muller
