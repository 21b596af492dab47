#pragma once

#include <algorithm>
#include <thread>
#include <vector>

#include "muller/parallel.hpp"

namespace muller::detail {

// Calls fn(begin, end) over disjoint chunks of [0, count).
template <typename Fn>
void parallel_rows(int count, Fn&& fn) {
  const int threads = std::min(num_threads(), count / 16);
  if (threads <= 1) {
    fn(0, count);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(static_cast<std::size_t>(threads - 1));
  const int chunk = (count + threads - 1) / threads;
  for (int t = 1; t < threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(count, begin + chunk);
    if (begin < end) {
      workers.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
  }
  fn(0, std::min(count, chunk));
}

}  // namespace muller::detail
