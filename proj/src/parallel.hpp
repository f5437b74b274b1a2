#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace outperf::detail {

/// Runs body(0..n-1) across up to `workers` threads. Bodies must write to
/// disjoint state only; iteration results may not depend on scheduling.
inline void run_over_paths(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
  std::size_t n_workers = workers < 1 ? 1 : static_cast<std::size_t>(workers);
  const unsigned hw = std::thread::hardware_concurrency();
  n_workers = std::min<std::size_t>(n_workers, hw == 0 ? 64 : hw * 4);
  if (n_workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += n_workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace outperf::detail
