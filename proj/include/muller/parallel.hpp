#pragma once

namespace muller {

/// Upper bound on worker threads used inside row-parallel operations.
/// Defaults to MULLER_THREADS from the environment, or 1 when unset.
/// Results are identical for every thread count: rows are independent.
int num_threads();
void set_num_threads(int threads);

}  // namespace muller
