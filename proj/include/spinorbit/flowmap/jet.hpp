#pragma once

#include <array>
#include <cstddef>

namespace spinorbit::flow {

/// A value with its first partials along the seed directions (x0, y0, e).
template <class T>
struct Jet {
  T value{0};
  T d_x0{0};
  T d_y0{0};
  T d_e{0};

  /// 0: value, 1: d/dx0, 2: d/dy0, 3: d/de.
  T& operator[](std::size_t i) { return i == 0 ? value : i == 1 ? d_x0 : i == 2 ? d_y0 : d_e; }
  const T& operator[](std::size_t i) const {
    return i == 0 ? value : i == 1 ? d_x0 : i == 2 ? d_y0 : d_e;
  }

  static Jet constant(T v) { return {std::move(v), T(0), T(0), T(0)}; }

  Jet& operator+=(const Jet& o) {
    for (std::size_t i = 0; i < 4; ++i) (*this)[i] += o[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t i = 0; i < 4; ++i) (*this)[i] -= o[i];
    return *this;
  }
  Jet& operator*=(const T& s) {
    for (std::size_t i = 0; i < 4; ++i) (*this)[i] *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const T& s) { return a *= s; }
  friend Jet operator*(const T& s, Jet a) { return a *= s; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    return {a.value * b.value, a.value * b.d_x0 + a.d_x0 * b.value, a.value * b.d_y0 + a.d_y0 * b.value,
            a.value * b.d_e + a.d_e * b.value};
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    Jet r;
    r.value = a.value / b.value;
    r.d_x0 = (a.d_x0 - r.value * b.d_x0) / b.value;
    r.d_y0 = (a.d_y0 - r.value * b.d_y0) / b.value;
    r.d_e = (a.d_e - r.value * b.d_e) / b.value;
    return r;
  }
};

template <class T>
using JetState = std::array<Jet<T>, 4>;

}  // namespace spinorbit::flow
