#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace vqdemark {

/// Worker cap from VQDEMARK_THREADS. 0 or 1 means sequential; unset means
/// one worker per hardware thread.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("VQDEMARK_THREADS"); env != nullptr && *env != '\0') {
    try {
      long v = std::stol(env);
      return v <= 1 ? 1 : static_cast<std::size_t>(v);
    } catch (...) {
      return 1;
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(begin, end) over contiguous chunks of [0, n). Each index is
/// handled by exactly one call, so any per-index result is independent of
/// the worker count. Callers must not reduce across chunks.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t workers = worker_count()) {
  workers = std::min(workers, n);
  if (workers <= 1) {
    if (n > 0) fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace vqdemark
