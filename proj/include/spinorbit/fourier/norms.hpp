#pragma once

#include "spinorbit/fourier/series.hpp"
#include "spinorbit/numerics/kahan.hpp"
#include "spinorbit/numerics/linear_fit.hpp"
#include "spinorbit/numerics/precision.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace spinorbit::fourier {

/// (sum_k (2 pi k)^{2r} |c_k|^2)^{1/2} over all stored modes, summed in
/// ascending |k|.
template <class T>
T sobolev_seminorm(const FourierSeries<T>& f, const T& r) {
  using std::exp;
  using std::log;
  using std::sqrt;
  if (r < 0) throw std::invalid_argument("sobolev_seminorm: r must be >= 0");
  const T two_pi = 2 * numerics::pi<T>();
  numerics::KahanAccumulator<T> acc;
  for (long k = 1; k <= f.kmax(); ++k) {
    const T weight = r == 0 ? T(1) : T(exp(2 * r * log(two_pi * k)));
    acc.add(2 * weight * numerics::norm2(f[k]));
  }
  if (r == 0) acc.add(numerics::norm2(f[0]));
  return sqrt(acc.sum());
}

/// max |c_k| over the top `fraction` of |k| in [0, L/2).
template <class T>
T tail_fraction_norm(const FourierSeries<T>& f, const T& fraction) {
  using std::ceil;
  if (!(fraction > 0) || fraction > 1) throw std::invalid_argument("tail fraction must lie in (0, 1]");
  const long half = static_cast<long>(f.size() / 2);
  const long k0 = static_cast<long>(std::ceil(numerics::to_double(T((1 - fraction) * half))));
  T m = 0;
  for (long k = std::max(k0, 0L); k <= f.kmax(); ++k) {
    const T a = numerics::abs(f[k]);
    if (a > m) m = a;
  }
  return m;
}

template <class T>
T tail_fraction_norm(const FourierSeries<T>& f) {
  return tail_fraction_norm(f, T(1) / 4);
}

/// Least-squares decay rate of log10 |c_k| over k in [L/8, 3L/8], ignoring
/// modes at the roundoff floor, converted to a strip half-width
/// -slope ln 10 / (2 pi).
template <class T>
T analyticity_width(const FourierSeries<T>& f) {
  const long L = static_cast<long>(f.size());
  const double floor = -numerics::working_digits<T>() + 10;
  std::vector<std::pair<T, T>> pts;
  for (long k = std::max(L / 8, 1L); k <= std::min(3 * L / 8, f.kmax()); ++k) {
    const T a = numerics::abs(f[k]);
    const double lg = numerics::log10_abs(a);
    if (!(lg > floor)) continue;
    pts.emplace_back(T(k), T(lg));
  }
  if (pts.size() < 4) throw std::domain_error("analyticity_width: too few usable modes");
  const auto fit = numerics::linear_fit<T>(pts);
  return -fit.slope * std::log(10.0) / (2 * numerics::pi<T>());
}

}  // namespace spinorbit::fourier
