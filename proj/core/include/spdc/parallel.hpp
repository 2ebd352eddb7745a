#pragma once
#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spdc {

/// Runs f(i) for i in [0, n) on `workers` threads with static contiguous chunks.
/// Each index is independent, so results do not depend on the worker count.
/// The first exception thrown by any worker is rethrown on the caller.
template <class F> void parallel_for(std::size_t n, int workers, F &&f) {
  std::size_t nw = static_cast<std::size_t>(std::max(1, workers));
  nw = std::min(nw, std::max<std::size_t>(n, 1));
  if (nw == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w) {
    std::size_t lo = n * w / nw, hi = n * (w + 1) / nw;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto &t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

} // namespace spdc
