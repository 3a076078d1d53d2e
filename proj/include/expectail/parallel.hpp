#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace expectail {

/// Runs body(i) for i in [0, count) on up to `workers` threads. Work items
/// write to disjoint slots, so results are identical for any worker count;
/// the first exception thrown by a work item is rethrown on the caller.
template <typename Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const int thread_count = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(thread_count));
  for (int t = 0; t < thread_count; ++t) pool.emplace_back(run);
  pool.clear();  // join
  if (error) std::rethrow_exception(error);
}

}  // namespace expectail
