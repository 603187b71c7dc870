#pragma once

// The period-2pi map P_e in physical coordinates (x, y) = (spin angle, spin
// rate), with jets in (x0, y0, e). The angle x is returned unreduced (as a
// lift), which is what torus parameterizations need.

#include "spinorbit/flowmap/jet.hpp"
#include "spinorbit/flowmap/taylor.hpp"
#include "spinorbit/model/averages.hpp"
#include "spinorbit/model/params.hpp"
#include "spinorbit/numerics/precision.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace spinorbit::flow {

template <class T>
struct MapResult {
  Jet<T> x;
  Jet<T> y;
};

/// Reusable map evaluator; keeps the integrator work buffers between calls.
/// One instance per thread.
template <class T>
class PoincareMap {
 public:
  PoincareMap(const model::ModelParams<T>& params, const TaylorConfig<T>& config, bool jets = true)
      : integ_(params, config, jets), two_pi_(2 * numerics::pi<T>()) {}

  const model::ModelParams<T>& params() const { return integ_.params(); }
  long steps_taken() const { return integ_.steps_taken(); }

  MapResult<T> operator()(const T& x0, const T& y0) {
    using std::cos;
    using std::sin;
    const auto& p = integ_.params();
    const bool nonavg = p.variant == model::Variant::NonAveraged;
    const T scale = nonavg ? T(1 - p.ecc) : T(1);

    JetState<T> st;
    st[0] = {x0, T(1), T(0), T(0)};
    st[1] = {scale * y0, T(0), scale, nonavg ? T(-y0) : T(0)};
    const T s2 = sin(2 * x0);
    const T c2 = cos(2 * x0);
    st[2] = {s2, 2 * c2, T(0), T(0)};
    st[3] = {c2, -2 * s2, T(0), T(0)};

    integ_.integrate(st, T(0), two_pi_);

    MapResult<T> r;
    r.x = st[0];
    if (nonavg) {
      const Jet<T>& g = st[1];
      r.y = g * T(1 / scale);
      r.y.d_e += g.value / (scale * scale);
    } else {
      r.y = st[1];
    }
    if (!integ_.jets()) r.x.d_x0 = r.x.d_y0 = r.x.d_e = r.y.d_x0 = r.y.d_y0 = r.y.d_e = T(0);
    return r;
  }

  std::pair<T, T> values(const T& x0, const T& y0) {
    auto r = (*this)(x0, y0);
    return {std::move(r.x.value), std::move(r.y.value)};
  }

 private:
  TaylorIntegrator<T> integ_;
  T two_pi_;
};

template <class T>
MapResult<T> poincare_map(const T& x0, const T& y0, const model::ModelParams<T>& params,
                          const TaylorConfig<T>& config) {
  PoincareMap<T> map(params, config, true);
  return map(x0, y0);
}

/// max-entry norm of D^T J D - lambda J for the (x0, y0) block D.
template <class T>
T conformality_check(const T& x0, const T& y0, const model::ModelParams<T>& params,
                     const TaylorConfig<T>& config) {
  using std::abs;
  const auto r = poincare_map(x0, y0, params, config);
  const T a = r.x.d_x0, b = r.x.d_y0, c = r.y.d_x0, d = r.y.d_y0;
  const T lambda = model::conformal_factor(params.ecc, params.mu).lambda;
  // D^T J D with J = [[0, 1], [-1, 0]]
  const T m00 = a * c - c * a;
  const T m01 = a * d - c * b;
  const T m10 = b * c - d * a;
  const T m11 = b * d - d * b;
  return std::max<T>({abs(m00), abs(m01 - lambda), abs(m10 + lambda), abs(m11)});
}

}  // namespace spinorbit::flow
