#pragma once

#include "spinorbit/numerics/precision.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace spinorbit::model {

/// Eccentric anomaly u with u - e sin u = t (mean motion 1, t0 = 0).
/// Damped Newton from u = t; the step is clipped to [-1, 1].
template <class T>
T solve_kepler(const T& t, const T& ecc) {
  using std::abs;
  using std::cos;
  using std::sin;
  if (ecc < 0 || ecc >= 1) throw std::invalid_argument("solve_kepler: e must lie in [0, 1)");
  if (ecc == 0) return t;
  const T tol = numerics::roundoff<T>(5) * (abs(t) > 1 ? T(abs(t)) : T(1));
  T u = t;
  for (int it = 0; it < 200; ++it) {
    const T f = u - ecc * sin(u) - t;
    T du = f / (1 - ecc * cos(u));
    if (du > 1) du = 1;
    if (du < -1) du = -1;
    u -= du;
    if (abs(f) <= tol) return u;  // the last correction is taken anyway
  }
  throw std::runtime_error("solve_kepler: no convergence in 200 iterations");
}

template <class T>
struct TrueAnomalyTrig {
  T cos_f;
  T sin_f;
};

/// cos f and sin f from the eccentric anomaly.
template <class T>
TrueAnomalyTrig<T> true_anomaly_trig(const T& u, const T& ecc) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const T cu = cos(u);
  const T d = 1 - ecc * cu;
  return {(cu - ecc) / d, sqrt(1 - ecc * ecc) * sin(u) / d};
}

}  // namespace spinorbit::model
