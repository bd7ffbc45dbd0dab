#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wustat {

/// Process-wide cap on worker threads (0 = hardware concurrency).
void set_max_threads(unsigned n) noexcept;
unsigned max_threads() noexcept;

namespace detail {
inline thread_local bool t_in_parallel = false;
}

/// Calls fn(i) for i in [0, count). Work is handed out dynamically, so fn must
/// write only to slots owned by i; callers reduce in index order afterwards,
/// which keeps results independent of the schedule. Nested calls from inside
/// a worker run serially.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned threads = 0) {
  unsigned workers = threads == 0 ? max_threads() : threads;
  if (workers > count) workers = static_cast<unsigned>(count);
  if (detail::t_in_parallel) workers = 1;
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    const bool outer = detail::t_in_parallel;
    detail::t_in_parallel = true;
    struct Reset {
      bool v;
      ~Reset() { detail::t_in_parallel = v; }
    } reset{outer};
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace wustat
