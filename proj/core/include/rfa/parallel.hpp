#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rfa {

/// Apply fn(i) for i in [0, n). With threads <= 1 this is a plain loop.
/// Work items must be independent; results should be written to per-index
/// slots so the output does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const int nt = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      try {
        // Contiguous blocks keep per-site caches warm and make chunk
        // boundaries deterministic.
        const std::size_t lo = n * static_cast<std::size_t>(t) / static_cast<std::size_t>(nt);
        const std::size_t hi = n * (static_cast<std::size_t>(t) + 1) / static_cast<std::size_t>(nt);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline int default_threads() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace rfa
