#ifndef WEYLAB_PARALLEL_HPP
#define WEYLAB_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace weylab {

/// Deterministic work splitting: the index space is cut into fixed blocks
/// independent of the thread count, each block is processed by exactly one
/// worker, and callers combine per-block results in block order. Results are
/// therefore identical for any `threads`.
template <class Fn>
void parallel_blocks(int n_blocks, int threads, Fn&& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || n_blocks <= 1) {
    for (int b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < std::min(threads, n_blocks); ++t) {
    pool.emplace_back([&] {
      for (;;) {
        int b = next.fetch_add(1);
        if (b >= n_blocks) return;
        fn(b);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace weylab

#endif  // WEYLAB_PARALLEL_HPP
