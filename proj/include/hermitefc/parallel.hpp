#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hermitefc {

/// Worker count from HERMITEFC_THREADS (default 1).
inline int thread_count() {
  static const int n = [] {
    const char* env = std::getenv("HERMITEFC_THREADS");
    if (env == nullptr) return 1;
    const int v = std::atoi(env);
    if (v <= 0) return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return v;
  }();
  return n;
}

/// Calls fn(i) for i in [0, n), split into contiguous chunks across workers.
/// The first exception thrown by any chunk is rethrown on the caller.
template <class Fn>
void parallel_for(int n, Fn&& fn) {
  const int workers = std::min(thread_count(), std::max(1, n / 64));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const int lo = static_cast<int>(static_cast<long long>(n) * w / workers);
    const int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
    pool.emplace_back([&, lo, hi] {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace hermitefc
