#pragma once

// Pointwise right-hand sides of the spin-orbit equations. The Taylor
// integrator has its own recurrence form of these; the functions here are
// the reference evaluations (and drive the low-order oracle integrator).

#include "spinorbit/model/averages.hpp"
#include "spinorbit/model/kepler.hpp"
#include "spinorbit/model/params.hpp"

#include <array>
#include <cmath>

namespace spinorbit::model {

template <class T>
using State4 = std::array<T, 4>;

/// NonAveraged: state (beta, gamma, s, c) in the eccentric anomaly u, with
///   beta' = gamma,
///   gamma' = (a/r) e sin u gamma - eps (a/r) s - mu (a/r)^5 (gamma - df/du),
///   s' = (2 gamma - 2 df/du) c,  c' = -(2 gamma - 2 df/du) s,
/// where a/r = 1/(1 - e cos u) and df/du = sqrt(1-e^2) (a/r).
///
/// Averaged: state (x, y, s, c) in time t (u from Kepler's equation), with
///   x' = y,  y' = -eps (a/r)^3 s - mu (Lbar y - Nbar),
///   s' = (2y - 2 df/dt) c,  c' = -(2y - 2 df/dt) s,  df/dt = sqrt(1-e^2) (a/r)^2.
template <class T>
State4<T> vector_field(const State4<T>& state, const T& indep, const ModelParams<T>& p) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const T root = sqrt(1 - p.ecc * p.ecc);
  const auto& [a, b, s, c] = state;
  if (p.variant == Variant::NonAveraged) {
    const T& u = indep;
    const T rho = 1 / (1 - p.ecc * cos(u));
    const T dfdu = root * rho;
    const T rho5 = rho * rho * rho * rho * rho;
    const T g = 2 * b - 2 * dfdu;
    return {b, rho * p.ecc * sin(u) * b - p.eps * rho * s - p.mu * rho5 * (b - dfdu), g * c, -g * s};
  }
  const T u = solve_kepler(indep, p.ecc);
  const T rho = 1 / (1 - p.ecc * cos(u));
  const T dfdt = root * rho * rho;
  const auto avg = lbar_nbar(p.ecc);
  const T g = 2 * b - 2 * dfdt;
  return {b, -p.eps * rho * rho * rho * s - p.mu * (avg.Lbar * b - avg.Nbar), g * c, -g * s};
}

/// Physical-time field (x', y') of either variant, evaluating sin(2x - 2f)
/// directly from the true anomaly. Independent of the (s, c) closure.
template <class T>
std::array<T, 2> time_field(const T& x, const T& y, const T& t, const ModelParams<T>& p) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const T u = solve_kepler(t, p.ecc);
  const auto [cf, sf] = true_anomaly_trig(u, p.ecc);
  const T rho = 1 / (1 - p.ecc * cos(u));
  const T rho3 = rho * rho * rho;
  const T cos2f = 2 * cf * cf - 1;
  const T sin2f = 2 * sf * cf;
  const T torque_arg = sin(2 * x) * cos2f - cos(2 * x) * sin2f;
  T ydot = -p.eps * rho3 * torque_arg;
  if (p.variant == Variant::NonAveraged) {
    const T fdot = sqrt(1 - p.ecc * p.ecc) * rho * rho;
    ydot -= p.mu * rho3 * rho3 * (y - fdot);
  } else {
    const auto avg = lbar_nbar(p.ecc);
    ydot -= p.mu * (avg.Lbar * y - avg.Nbar);
  }
  return {y, ydot};
}

}  // namespace spinorbit::model
