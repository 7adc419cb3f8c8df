#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace surpmark {

/// Worker count: `requested` when nonzero, otherwise hardware concurrency,
/// capped by the SURPMARK_THREADS environment variable when set.
std::size_t thread_count(std::size_t requested = 0);

/// Runs body(i) for i in [0, n) on up to `threads` workers with static
/// interleaved assignment. Each index is visited exactly once; the first
/// exception thrown by any worker is rethrown after all workers join.
template <typename Body>
void parallel_for(std::size_t n, std::size_t threads, Body&& body) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t workers = threads < n ? threads : n;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace surpmark
