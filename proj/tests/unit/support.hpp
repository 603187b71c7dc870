#pragma once

#include "spinorbit/numerics/precision.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

namespace spinorbit::testing {

/// Sets the run precision for the current test.
inline void use_digits(int digits) { numerics::set_precision(digits); }

template <class T>
double rel_err(const T& a, const T& b) {
  using std::abs;
  const T scale = abs(b) > 0 ? T(abs(b)) : T(1);
  return numerics::to_double(T(abs(a - b) / scale));
}

template <class T>
double abs_err(const T& a, const T& b) {
  using std::abs;
  return numerics::to_double(T(abs(a - b)));
}

/// log10 of |a - b| (or -inf), handy when the error underflows a double.
template <class T>
double log_err(const T& a, const T& b) {
  return numerics::log10_abs(T(a - b));
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

}  // namespace spinorbit::testing
