#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace pamlab {

/// Calls fn(i) for i in [0, count) on up to `workers` threads, each thread
/// taking one contiguous block. Callers write results by index, so any
/// reduction done afterwards is independent of the worker count.
template <class F>
void parallel_for(std::size_t count, int workers, F&& fn) {
  const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(workers < 1 ? 1 : workers, count));
  if (w <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(w);
  const std::size_t chunk = (count + w - 1) / w;
  for (std::size_t t = 0; t < w; ++t) {
    threads.emplace_back([&, t] {
      try {
        const std::size_t lo = t * chunk, hi = std::min(count, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

} // namespace pamlab
