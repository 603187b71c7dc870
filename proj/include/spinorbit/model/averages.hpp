#pragma once

// Orbit-averaged tidal coefficients and the conformal factor of the
// period map. Both are exact closed forms in e.

#include "spinorbit/numerics/precision.hpp"

#include <cmath>
#include <stdexcept>

namespace spinorbit::model {

template <class T>
struct TidalAverages {
  T Lbar;
  T Nbar;
  T dLbar_de;
  T dNbar_de;
};

/// Lbar(e) = (1 + 3e^2 + 3e^4/8) / (1-e^2)^{9/2}
/// Nbar(e) = (1 + 15e^2/2 + 45e^4/8 + 5e^6/16) / (1-e^2)^6
/// together with their e-derivatives.
template <class T>
TidalAverages<T> lbar_nbar(const T& ecc) {
  using std::pow;
  using std::sqrt;
  if (ecc < 0 || ecc >= 1) throw std::invalid_argument("lbar_nbar: e must lie in [0, 1)");
  const T e2 = ecc * ecc;
  const T w = 1 - e2;
  const T w_half = sqrt(w);
  const T w4 = w * w * w * w;
  const T w_9_2 = w4 * w_half;
  const T w6 = w4 * w * w;

  const T p = 1 + 3 * e2 + T(3) / 8 * e2 * e2;
  const T dp = 6 * ecc + T(3) / 2 * e2 * ecc;
  const T q = 1 + T(15) / 2 * e2 + T(45) / 8 * e2 * e2 + T(5) / 16 * e2 * e2 * e2;
  const T dq = 15 * ecc + T(45) / 2 * e2 * ecc + T(15) / 8 * e2 * e2 * ecc;

  TidalAverages<T> r;
  r.Lbar = p / w_9_2;
  r.Nbar = q / w6;
  // d/de w^{-a} = 2 a e w^{-a-1}
  r.dLbar_de = dp / w_9_2 + p * 9 * ecc / (w_9_2 * w);
  r.dNbar_de = dq / w6 + q * 12 * ecc / (w6 * w);
  return r;
}

/// lambda = exp(-mu pi (3e^4 + 24e^2 + 8) / (4 (1-e^2)^{9/2})) = exp(-2 pi mu Lbar(e)).
template <class T>
struct ConformalFactor {
  T lambda;
};

template <class T>
ConformalFactor<T> conformal_factor(const T& ecc, const T& mu) {
  using std::exp;
  using std::sqrt;
  if (ecc < 0 || ecc >= 1) throw std::invalid_argument("conformal_factor: e must lie in [0, 1)");
  const T e2 = ecc * ecc;
  const T w = 1 - e2;
  const T w_9_2 = w * w * w * w * sqrt(w);
  return {exp(-mu * numerics::pi<T>() * (3 * e2 * e2 + 24 * e2 + 8) / (4 * w_9_2))};
}

/// d lambda / d e
template <class T>
T conformal_factor_de(const T& ecc, const T& mu) {
  const auto avg = lbar_nbar(ecc);
  return -2 * numerics::pi<T>() * mu * avg.dLbar_de * conformal_factor(ecc, mu).lambda;
}

/// Eccentricity whose averaged-torque equilibrium spin Nbar/Lbar equals omega.
/// Nbar/Lbar increases monotonically from 1 at e = 0, so omega must exceed 1.
template <class T>
T averaged_drift_for(const T& omega) {
  using std::abs;
  if (!(omega > 1)) throw std::invalid_argument("averaged_drift_for: omega must exceed 1");
  auto ratio = [](const T& e) {
    const auto a = lbar_nbar(e);
    return a.Nbar / a.Lbar;
  };
  T lo = 0, hi = T(99) / 100;
  if (ratio(hi) < omega) throw std::invalid_argument("averaged_drift_for: omega out of range");
  T e = (lo + hi) / 2;
  const T tol = numerics::roundoff<T>(2);
  for (int it = 0; it < 400; ++it) {
    const auto a = lbar_nbar(e);
    const T f = a.Nbar / a.Lbar - omega;
    if (f > 0) hi = e; else lo = e;
    const T df = (a.dNbar_de * a.Lbar - a.Nbar * a.dLbar_de) / (a.Lbar * a.Lbar);
    T next = e - f / df;
    if (!(next > lo && next < hi)) next = (lo + hi) / 2;
    if (abs(next - e) <= tol) return next;
    e = next;
  }
  return e;
}

}  // namespace spinorbit::model
