#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace sgdg {

// Chunked parallel loop over [0, n). Work items must write to disjoint
// locations. Results are independent of the thread count because every
// reduction in this codebase is done as a second, serial pass.
inline void parallel_for(int n, int n_threads, const std::function<void(int)>& body) {
  if (n_threads <= 1 || n < 64) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  n_threads = std::min(n_threads, n);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  const int chunk = (n + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    const int b = t * chunk;
    const int e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e]() {
      for (int i = b; i < e; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace sgdg
