#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace simcr {

// Runs fn(i) for i in [0, n). With jobs > 1, indices are distributed over
// worker threads; each index writes only its own output slot, so results are
// identical to the sequential order. First thrown exception is rethrown.
inline void parallel_for_indexed(int n, int jobs,
                                 const std::function<void(int)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  int workers = std::min(jobs, n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (int i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errs) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace simcr
