#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace levi {

/// Process-wide worker count for data-parallel loops. 1 by default; the
/// command line sets it. Results never depend on this value: workers write
/// disjoint, index-addressed slots.
inline std::atomic<int>& thread_count() {
  static std::atomic<int> n{1};
  return n;
}

/// Runs fn(0..n-1), chunked over the configured worker count.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(thread_count().load(), n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = w * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace levi
