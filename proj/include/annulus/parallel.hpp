#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace annulus {

// Thread cap for row-parallel assembly. Reads ANNULUS_BEM_THREADS once;
// values < 1 or unset fall back to the hardware count.
inline int assembly_thread_cap() {
  static const int cap = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("ANNULUS_BEM_THREADS")) {
      int v = std::atoi(env);
      if (v >= 1) return v < hw ? v : hw;
    }
    return hw;
  }();
  return cap;
}

// Runs fn(row) for row in [0, rows). Each row is written by exactly one
// thread, so results are bitwise identical for any thread count.
inline void parallel_rows(int rows, const std::function<void(int)>& fn) {
  const int threads = std::min(assembly_thread_cap(), rows);
  if (threads <= 1 || rows < 64) {
    for (int i = 0; i < rows; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int chunk = (rows + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(rows, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace annulus
