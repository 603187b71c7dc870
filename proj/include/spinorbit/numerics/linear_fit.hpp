#pragma once

#include "spinorbit/numerics/kahan.hpp"

#include <span>
#include <stdexcept>
#include <utility>

namespace spinorbit::numerics {

template <class T>
struct LineFit {
  T slope;
  T intercept;
};

/// Ordinary least squares through (x_i, y_i), using centred sums.
template <class T>
LineFit<T> linear_fit(std::span<const std::pair<T, T>> points) {
  if (points.size() < 2) throw std::invalid_argument("linear_fit needs at least two points");
  KahanAccumulator<T> sx, sy;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  const long n = static_cast<long>(points.size());
  const T mx = sx.sum() / n;
  const T my = sy.sum() / n;
  KahanAccumulator<T> sxx, sxy;
  for (const auto& [x, y] : points) {
    const T dx = x - mx;
    sxx += dx * dx;
    sxy += dx * (y - my);
  }
  if (sxx.sum() == 0) throw std::invalid_argument("linear_fit: all abscissae coincide");
  T slope = sxy.sum() / sxx.sum();
  T intercept = my - slope * mx;
  return {std::move(slope), std::move(intercept)};
}

}  // namespace spinorbit::numerics
