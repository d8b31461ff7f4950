#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace cayley {

// Runs fn(i) for i in [0, n) on up to hardware_concurrency() threads.
// Callers write results into slot i so the outcome is order-independent.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
}

}  // namespace cayley
