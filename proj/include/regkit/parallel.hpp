#pragma once

#include <cstddef>
#include <functional>

namespace regkit {

/// Worker count: an explicit override if set, else REGKIT_THREADS, else the
/// hardware concurrency.
int thread_count();
/// n <= 0 clears the override.
void set_thread_count(int n);

/// Runs body(i) for i in [0, count). The first exception thrown by any
/// iteration is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace regkit
