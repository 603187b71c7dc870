#pragma once

// Radix-2 iterative FFT at working precision.
//
// Forward: c_k = (1/L) sum_j x_j e^{-2 pi i j k / L}, output ordered
// k = 0, 1, ..., L/2-1, -L/2, ..., -1.  Inverse: x_j = sum_k c_k e^{2 pi i j k / L}.

#include "spinorbit/numerics/complex.hpp"
#include "spinorbit/numerics/precision.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace spinorbit::numerics {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

/// Roots e^{-2 pi i m / L}, m < L/2, cached per (L, mantissa bits).
template <class T>
std::shared_ptr<const std::vector<Complex<T>>> fft_roots(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, long>, std::shared_ptr<const std::vector<Complex<T>>>> cache;
  const auto key = std::make_pair(n, precision_bits<T>());
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto roots = std::make_shared<std::vector<Complex<T>>>(n / 2);
  const T two_pi = 2 * pi<T>();
  for (std::size_t m = 0; m < n / 2; ++m) {
    T angle = -two_pi * static_cast<long>(m) / static_cast<long>(n);
    (*roots)[m] = unit(angle);
  }
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(roots)).first->second;
}

}  // namespace detail

template <class T>
void fft_inplace(std::vector<Complex<T>>& data, bool inverse) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) throw std::invalid_argument("fft length must be a power of two");
  if (n == 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const auto roots = detail::fft_roots<T>(n);
  Complex<T> w, t;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    const std::size_t half = len / 2;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t m = 0; m < half; ++m) {
        const auto& r = (*roots)[m * stride];
        w.re = r.re;
        w.im = inverse ? T(-r.im) : r.im;
        t = data[start + m + half] * w;
        data[start + m + half] = data[start + m] - t;
        data[start + m] += t;
      }
    }
  }
  if (!inverse) {
    const T scale = T(1) / static_cast<long>(n);
    for (auto& z : data) z *= scale;
  }
}

template <class T>
std::vector<Complex<T>> fft(std::vector<Complex<T>> data, bool inverse = false) {
  fft_inplace(data, inverse);
  return data;
}

}  // namespace spinorbit::numerics
