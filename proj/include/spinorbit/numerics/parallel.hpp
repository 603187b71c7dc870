#pragma once

// Static-partition parallel loop. Each index writes only its own slot, so
// results do not depend on the worker count or on scheduling.

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace spinorbit::numerics {

/// Worker count from SPINORBIT_WORKERS, else the hardware concurrency.
inline int default_workers() {
  if (const char* env = std::getenv("SPINORBIT_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(worker, begin, end) on contiguous chunks of [0, n).
/// The first exception (lowest chunk) is rethrown after all workers join.
template <class Body>
void parallel_chunks(std::size_t n, int workers, Body&& body) {
  if (n == 0) return;
  const std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (w == 1) {
    body(0, std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  {
    std::vector<std::jthread> pool;
    pool.reserve(w);
    for (std::size_t k = 0; k < w; ++k) {
      const std::size_t begin = n * k / w;
      const std::size_t end = n * (k + 1) / w;
      pool.emplace_back([&, k, begin, end] {
        try {
          body(static_cast<int>(k), begin, end);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  parallel_chunks(n, workers, [&](int, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) body(i);
  });
}

}  // namespace spinorbit::numerics
