#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace iongrad {

/// Worker count: IONGRAD_THREADS if set and positive, else hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("IONGRAD_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Run fn(0..n-1) on up to `threads` workers. The first exception (lowest
/// index) is rethrown after all workers finish.
inline void parallel_for(int n, const std::function<void(int)>& fn, int threads = 0) {
  if (threads <= 0) threads = worker_count();
  threads = std::min(threads, n);
  std::vector<std::exception_ptr> errors(n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace iongrad
