#pragma once

// Run-wide working precision and the decimal text form used by every
// persisted file.

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace spinorbit {

/// Arbitrary precision real used for every run above double precision.
/// Expression templates are off so that `auto` never binds a dangling
/// expression.
using Mp = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                         boost::multiprecision::et_off>;

namespace numerics {

template <class T>
inline constexpr bool is_mpfr_v = std::is_same_v<T, Mp>;

/// Largest precision (in decimal digits) served by the `double` backend.
inline constexpr int kDoubleDigits = 17;

namespace detail {
inline int& global_digits() {
  static int digits = 70;
  return digits;
}
}  // namespace detail

/// Decimal digits requested for this run (the text serialization width).
inline int precision_digits() { return detail::global_digits(); }

/// Sets the run precision. The MPFR mantissa is chosen as the widest one for
/// which `digits` significant decimal digits still round-trip losslessly.
/// Must be called before any worker threads are started.
inline void set_precision(int digits) {
  if (digits < 6 || digits > 2000)
    throw std::invalid_argument("precision_digits must be in [6, 2000]");
  detail::global_digits() = digits;
  for (int d10 = digits; d10 > 1; --d10) {
    Mp::default_precision(static_cast<unsigned>(d10));
    Mp probe(0);
    const auto bits = mpfr_get_prec(probe.backend().data());
    if (static_cast<double>(bits) * std::log10(2.0) < digits - 1) return;
  }
}

/// Binary mantissa bits of T at the current run precision.
template <class T>
long precision_bits() {
  if constexpr (is_mpfr_v<T>) {
    T probe(0);
    return static_cast<long>(mpfr_get_prec(probe.backend().data()));
  } else {
    return std::numeric_limits<T>::digits;
  }
}

/// Decimal digits actually carried by T (floor of bits * log10 2).
template <class T>
int working_digits() {
  return static_cast<int>(std::floor(precision_bits<T>() * std::log10(2.0)));
}

/// Significant digits used when writing a T as text.
template <class T>
int text_digits() {
  if constexpr (is_mpfr_v<T>)
    return precision_digits();
  else
    return std::numeric_limits<T>::max_digits10;
}

template <class T>
T from_string(std::string_view text) {
  std::string s(text);
  if constexpr (is_mpfr_v<T>) {
    T x;
    if (mpfr_set_str(x.backend().data(), s.c_str(), 10, MPFR_RNDN) != 0)
      throw std::invalid_argument("not a decimal number: '" + s + "'");
    return x;
  } else {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
      throw std::invalid_argument("not a decimal number: '" + s + "'");
    return static_cast<T>(v);
  }
}

/// Scientific notation with `text_digits<T>()` significant digits.
template <class T>
std::string to_string(const T& x) {
  const int digits = text_digits<T>();
  if constexpr (is_mpfr_v<T>) {
    const int n = mpfr_snprintf(nullptr, 0, "%.*Re", digits - 1, x.backend().data());
    std::string out(static_cast<std::size_t>(n) + 1, '\0');
    mpfr_snprintf(out.data(), out.size(), "%.*Re", digits - 1, x.backend().data());
    out.resize(static_cast<std::size_t>(n));
    return out;
  } else {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, static_cast<double>(x));
    return buf;
  }
}

template <class T>
T pi() {
  if constexpr (is_mpfr_v<T>) {
    T r;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
  } else {
    return std::numbers::pi_v<T>;
  }
}

/// Correctly rounded 10^n.
template <class T>
T pow10(int n) {
  return from_string<T>("1e" + std::to_string(n));
}

/// 10^(-working_digits + shift): the roundoff scale used in tolerances.
template <class T>
T roundoff(int shift = 0) {
  return pow10<T>(-working_digits<T>() + shift);
}

template <class T>
double to_double(const T& x) {
  if constexpr (is_mpfr_v<T>)
    return mpfr_get_d(x.backend().data(), MPFR_RNDN);
  else
    return static_cast<double>(x);
}

/// log10|x| in double range even when |x| underflows a double.
template <class T>
double log10_abs(const T& x) {
  if constexpr (is_mpfr_v<T>) {
    if (mpfr_zero_p(x.backend().data())) return -std::numeric_limits<double>::infinity();
    long exp2 = 0;
    const double mant = mpfr_get_d_2exp(&exp2, x.backend().data(), MPFR_RNDN);
    return std::log10(std::fabs(mant)) + static_cast<double>(exp2) * std::log10(2.0);
  } else {
    return std::log10(std::fabs(static_cast<double>(x)));
  }
}

}  // namespace numerics
}  // namespace spinorbit
