#include "muller/parallel.hpp"

#include <atomic>
#include <cstdlib>

namespace muller {

namespace {

int threads_from_env() {
  const char* value = std::getenv("MULLER_THREADS");
  if (value == nullptr) {
    return 1;
  }
  const int parsed = std::atoi(value);
  return parsed >= 1 ? parsed : 1;
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> setting{threads_from_env()};
  return setting;
}

}  // namespace

int num_threads() { return thread_setting().load(std::memory_order_relaxed); }

void set_num_threads(int threads) {
  thread_setting().store(threads >= 1 ? threads : 1, std::memory_order_relaxed);
}

}  // namespace muller
