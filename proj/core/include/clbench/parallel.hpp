#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace clbench {

namespace detail {
inline std::atomic<std::size_t>& thread_cap() {
  static std::atomic<std::size_t> cap{0};  // 0 = hardware concurrency
  return cap;
}
}  // namespace detail

/// Caps worker parallelism process-wide (0 restores the hardware default).
inline void set_max_threads(std::size_t n) { detail::thread_cap().store(n); }

inline std::size_t max_threads() {
  std::size_t cap = detail::thread_cap().load();
  if (cap == 0) {
    cap = std::thread::hardware_concurrency();
    if (cap == 0) cap = 1;
  }
  return cap;
}

/// Runs fn(begin, end) over disjoint chunks of [0, n). Workers write disjoint
/// outputs only; results are independent of the thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  const std::size_t workers = std::min(max_threads(), n == 0 ? std::size_t{1} : n);
  if (workers <= 1 || n < 2) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace clbench
