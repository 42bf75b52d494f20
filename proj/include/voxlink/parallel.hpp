#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace voxlink {

/// Worker count from an explicit request, the VOXLINK_WORKERS environment
/// variable, or 1.
inline int resolve_workers(int requested = 0) {
  if (requested >= 1) return requested;
  if (const char* env = std::getenv("VOXLINK_WORKERS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

/// Run fn(i) for i in [0, n) on `workers` threads. Items are assigned by
/// fixed round-robin so any per-item outputs are schedule-independent.
inline void parallel_for(std::size_t n, int workers,
                         const std::function<void(std::size_t)>& fn) {
  workers = resolve_workers(workers);
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = static_cast<std::size_t>(w); i < n;
           i += static_cast<std::size_t>(workers)) {
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace voxlink
