#pragma once

// Tiny index-parallel loop; worker count capped by RABI_SPECTRA_THREADS.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rabi {

inline int worker_cap() {
  if (const char* env = std::getenv("RABI_SPECTRA_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(0..n-1) across workers; rethrows the first exception after all
// workers drain. Callers index into pre-sized output slots, so results
// are ordered regardless of schedule.
template <class F>
void parallel_for(std::size_t n, F&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(worker_cap()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace rabi
