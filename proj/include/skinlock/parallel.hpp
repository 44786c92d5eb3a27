#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace skinlock {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Results are
/// written by index, so output order never depends on completion order.
/// Exceptions are captured per index and returned; they are not rethrown.
template <typename Fn>
std::vector<std::exception_ptr> parallel_for(std::size_t count, int threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t pool =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (pool <= 1) {
    worker();
    return errors;
  }
  std::vector<std::thread> workers;
  workers.reserve(pool);
  for (std::size_t t = 0; t < pool; ++t) workers.emplace_back(worker);
  for (auto& w : workers) w.join();
  return errors;
}

}  // namespace skinlock
