#pragma once

// Real 1-periodic functions f(theta) = sum_k c_k e^{2 pi i k theta}, stored
// as L complex coefficients in FFT order (k = 0..L/2-1, then -L/2..-1).
// The k = -L/2 slot is kept at zero.

#include "spinorbit/numerics/complex.hpp"
#include "spinorbit/numerics/fft.hpp"
#include "spinorbit/numerics/precision.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace spinorbit::fourier {

using numerics::Complex;

/// e^{2 pi i x}, reducing x mod 1 first so large arguments keep full precision.
template <class T>
Complex<T> cis2pi(const T& x) {
  using std::floor;
  const T frac = x - floor(x);
  return numerics::unit(T(2 * numerics::pi<T>() * frac));
}

template <class T>
class FourierSeries {
 public:
  FourierSeries() = default;
  explicit FourierSeries(std::size_t length) : c_(length) {
    if (!numerics::is_power_of_two(length) || length < 2)
      throw std::invalid_argument("fourier length must be a power of two >= 2");
  }

  std::size_t size() const { return c_.size(); }
  /// Largest representable |k| (L/2 - 1).
  long kmax() const { return static_cast<long>(c_.size() / 2) - 1; }

  const Complex<T>& operator[](long k) const { return c_[slot(k)]; }
  /// Sets c_k and c_{-k} = conj(c_k); the imaginary part of c_0 is dropped.
  void set(long k, const Complex<T>& value) {
    if (k == 0) {
      c_[0] = Complex<T>(value.re);
      return;
    }
    if (k < 0) {
      set(-k, numerics::conj(value));
      return;
    }
    c_[slot(k)] = value;
    c_[slot(-k)] = numerics::conj(value);
  }

  const std::vector<Complex<T>>& coeffs() const { return c_; }

  static FourierSeries from_grid(std::span<const T> samples) {
    FourierSeries f(samples.size());
    std::vector<Complex<T>> data(samples.begin(), samples.end());
    numerics::fft_inplace(data, false);
    const long L = static_cast<long>(samples.size());
    f.c_[0] = Complex<T>(data[0].re);
    for (long k = 1; k < L / 2; ++k) {
      const auto& a = data[static_cast<std::size_t>(k)];
      const auto& b = data[static_cast<std::size_t>(L - k)];
      f.set(k, {(a.re + b.re) / 2, (a.im - b.im) / 2});
    }
    return f;
  }

  /// Values at theta_j = j/L.
  std::vector<T> to_grid() const {
    auto data = numerics::fft(c_, true);
    std::vector<T> out;
    out.reserve(data.size());
    for (auto& z : data) out.push_back(std::move(z.re));
    return out;
  }

  T operator()(const T& theta) const {
    T acc = c_[0].re;
    const Complex<T> z = cis2pi(theta);
    Complex<T> zk = z;
    for (long k = 1; k <= kmax(); ++k) {
      const auto& a = (*this)[k];
      acc += 2 * (a.re * zk.re - a.im * zk.im);
      zk *= z;
    }
    return acc;
  }

  /// f(theta + omega): c_k -> c_k e^{2 pi i k omega}.
  FourierSeries shift(const T& omega) const {
    FourierSeries out(size());
    out.c_[0] = c_[0];
    for (long k = 1; k <= kmax(); ++k) out.set(k, (*this)[k] * cis2pi(T(k * omega)));
    return out;
  }

  /// d/dtheta: c_k -> 2 pi i k c_k.
  FourierSeries derivative() const {
    FourierSeries out(size());
    const T two_pi = 2 * numerics::pi<T>();
    for (long k = 1; k <= kmax(); ++k) {
      const auto& a = (*this)[k];
      const T w = two_pi * k;
      out.set(k, {-w * a.im, w * a.re});
    }
    return out;
  }

  /// Zero-pads or truncates to a new power-of-two length.
  FourierSeries resized(std::size_t length) const {
    FourierSeries out(length);
    const long km = std::min(kmax(), out.kmax());
    out.c_[0] = c_[0];
    for (long k = 1; k <= km; ++k) out.set(k, (*this)[k]);
    return out;
  }

  const T& mean() const { return c_[0].re; }
  void set_mean(const T& v) { c_[0] = Complex<T>(v); }

  FourierSeries& operator+=(const FourierSeries& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  FourierSeries& operator-=(const FourierSeries& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  FourierSeries& operator*=(const T& s) {
    for (auto& z : c_) z *= s;
    return *this;
  }
  friend FourierSeries operator+(FourierSeries a, const FourierSeries& b) { return a += b; }
  friend FourierSeries operator-(FourierSeries a, const FourierSeries& b) { return a -= b; }
  friend FourierSeries operator*(FourierSeries a, const T& s) { return a *= s; }
  friend FourierSeries operator*(const T& s, FourierSeries a) { return a *= s; }

 private:
  std::size_t slot(long k) const {
    const long L = static_cast<long>(c_.size());
    if (k <= -L / 2 || k >= L / 2) throw std::out_of_range("fourier mode out of range");
    return static_cast<std::size_t>(k >= 0 ? k : L + k);
  }
  void check_same(const FourierSeries& o) const {
    if (o.size() != size()) throw std::invalid_argument("fourier length mismatch");
  }

  std::vector<Complex<T>> c_;
};

template <class T>
FourierSeries<T> from_grid(std::span<const T> samples) {
  return FourierSeries<T>::from_grid(samples);
}

template <class T>
FourierSeries<T> from_grid(const std::vector<T>& samples) {
  return FourierSeries<T>::from_grid(std::span<const T>(samples));
}

template <class T>
std::vector<T> to_grid(const FourierSeries<T>& f) {
  return f.to_grid();
}

template <class T>
FourierSeries<T> shift(const FourierSeries<T>& f, const T& omega) {
  return f.shift(omega);
}

/// g(theta) = f(eta theta) / beta on a grid eta times finer.
template <class T>
FourierSeries<T> rescale(const FourierSeries<T>& f, long eta, const T& beta) {
  if (eta < 1) throw std::invalid_argument("rescale: eta must be >= 1");
  FourierSeries<T> g(f.size() * static_cast<std::size_t>(eta));
  g.set_mean(f.mean() / beta);
  for (long k = 1; k <= f.kmax(); ++k) g.set(eta * k, f[k] / beta);
  return g;
}

}  // namespace spinorbit::fourier
