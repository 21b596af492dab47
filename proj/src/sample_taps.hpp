#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace muller::detail {

struct LinearTap {
  int i0;
  int i1;
  double f;
};

inline std::vector<LinearTap> linear_taps(int in, int out) {
  std::vector<LinearTap> taps(static_cast<std::size_t>(out));
  const double ratio = static_cast<double>(in) / static_cast<double>(out);
  const double last = static_cast<double>(in - 1);
  for (int t = 0; t < out; ++t) {
    const double s = std::clamp((static_cast<double>(t) + 0.5) * ratio - 0.5, 0.0, last);
    const int i0 = static_cast<int>(std::floor(s));
    taps[static_cast<std::size_t>(t)] = {i0, std::min(i0 + 1, in - 1), s - static_cast<double>(i0)};
  }
  return taps;
}

inline std::vector<int> nearest_index(int in, int out) {
  std::vector<int> index(static_cast<std::size_t>(out));
  const double ratio = static_cast<double>(in) / static_cast<double>(out);
  for (int t = 0; t < out; ++t) {
    // floor(s + 0.5) with s the half-pixel coordinate.
    const int i = static_cast<int>(std::floor((static_cast<double>(t) + 0.5) * ratio));
    index[static_cast<std::size_t>(t)] = std::clamp(i, 0, in - 1);
  }
  return index;
}

}  // namespace muller::detail
