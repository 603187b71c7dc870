#pragma once

// Minimal complex arithmetic over any real scalar (std::complex is only
// specified for the built-in floating types).

#include <cmath>

namespace spinorbit::numerics {

template <class T>
struct Complex {
  T re{0};
  T im{0};

  Complex() = default;
  Complex(T r) : re(std::move(r)), im(0) {}
  Complex(T r, T i) : re(std::move(r)), im(std::move(i)) {}

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    T r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  Complex& operator*=(const T& s) {
    re *= s;
    im *= s;
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    const T d = o.re * o.re + o.im * o.im;
    T r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = std::move(r);
    return *this;
  }
  Complex& operator/=(const T& s) {
    re /= s;
    im /= s;
    return *this;
  }

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator*(Complex a, const T& s) { return a *= s; }
  friend Complex operator*(const T& s, Complex a) { return a *= s; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator/(Complex a, const T& s) { return a /= s; }
  friend Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
};

template <class T>
Complex<T> conj(const Complex<T>& z) {
  return {z.re, -z.im};
}

/// |z|^2
template <class T>
T norm2(const Complex<T>& z) {
  return z.re * z.re + z.im * z.im;
}

template <class T>
T abs(const Complex<T>& z) {
  using std::sqrt;
  return sqrt(norm2(z));
}

template <class T>
T arg(const Complex<T>& z) {
  using std::atan2;
  return atan2(z.im, z.re);
}

/// e^{i angle}
template <class T>
Complex<T> unit(const T& angle) {
  using std::cos;
  using std::sin;
  return {cos(angle), sin(angle)};
}

}  // namespace spinorbit::numerics
