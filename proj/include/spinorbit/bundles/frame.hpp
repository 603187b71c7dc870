#pragma once

// Adapted frame M = [DK | J^{-1} DK N] along a torus, the torsion S, and the
// invariant tangent / stable bundles obtained from it.
//
// DK is the derivative with respect to the angle 2 pi theta, so the
// unperturbed torus has DK = (1, 0).

#include "spinorbit/fourier/cohomology.hpp"
#include "spinorbit/fourier/series.hpp"
#include "spinorbit/kam/invariance.hpp"
#include "spinorbit/kam/torus.hpp"
#include "spinorbit/numerics/precision.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace spinorbit::bundles {

using fourier::FourierSeries;

class FrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-major 2x2 differential of the period map at one grid point.
template <class T>
using Mat2 = std::array<T, 4>;

template <class T>
struct AdaptedFrame {
  std::vector<T> dk1, dk2, N;        // at theta_j
  std::vector<T> dk1_w, dk2_w, N_w;  // at theta_j + omega
  std::vector<T> S;
  FourierSeries<T> S_series;
  std::vector<Mat2<T>> DP;
};

/// DK as two Fourier series (d/d(2 pi theta) of the lifted embedding).
template <class T>
std::array<FourierSeries<T>, 2> tangent_series(const kam::TorusSolution<T>& sol) {
  const T inv_two_pi = 1 / (2 * numerics::pi<T>());
  auto d1 = sol.u.derivative() * inv_two_pi;
  d1.set_mean(T(1));
  auto d2 = sol.K2.derivative() * inv_two_pi;
  return {std::move(d1), std::move(d2)};
}

template <class T>
AdaptedFrame<T> adapted_frame(const kam::TorusSolution<T>& sol, const kam::GridEvaluation<T>& ev) {
  using std::abs;
  const std::size_t L = sol.size();
  if (ev.image.size() != L) throw std::invalid_argument("adapted_frame: evaluation/grid size mismatch");
  const auto dk = tangent_series(sol);
  AdaptedFrame<T> fr;
  fr.dk1 = dk[0].to_grid();
  fr.dk2 = dk[1].to_grid();
  fr.dk1_w = dk[0].shift(sol.omega).to_grid();
  fr.dk2_w = dk[1].shift(sol.omega).to_grid();
  fr.N.resize(L);
  fr.N_w.resize(L);
  fr.S.resize(L);
  fr.DP.resize(L);
  const T floor = numerics::pow10<T>(-numerics::precision_digits() / 2);
  for (std::size_t j = 0; j < L; ++j) {
    const T n2 = fr.dk1[j] * fr.dk1[j] + fr.dk2[j] * fr.dk2[j];
    const T n2w = fr.dk1_w[j] * fr.dk1_w[j] + fr.dk2_w[j] * fr.dk2_w[j];
    if (n2 < floor || n2w < floor) throw FrameError("adapted frame is singular (DK vanishes)");
    fr.N[j] = 1 / n2;
    fr.N_w[j] = 1 / n2w;
    const auto& im = ev.image[j];
    fr.DP[j] = {im.x.d_x0, im.x.d_y0, im.y.d_x0, im.y.d_y0};
    const auto& D = fr.DP[j];
    // v = DP J^{-1} DK N,  J^{-1}(a, b) = (-b, a)
    const T v1 = (-D[0] * fr.dk2[j] + D[1] * fr.dk1[j]) * fr.N[j];
    const T v2 = (-D[2] * fr.dk2[j] + D[3] * fr.dk1[j]) * fr.N[j];
    fr.S[j] = (fr.dk1_w[j] * v1 + fr.dk2_w[j] * v2) * fr.N_w[j];
  }
  fr.S_series = fourier::from_grid(fr.S);
  return fr;
}

template <class T>
AdaptedFrame<T> adapted_frame(const kam::TorusSolution<T>& sol, const flow::TaylorConfig<T>& taylor,
                              kam::EvalOptions opt = {}) {
  opt.jets = true;
  return adapted_frame(sol, kam::evaluate_torus(sol, taylor, opt));
}

template <class T>
struct BundlePair {
  std::vector<std::array<T, 2>> Ec;
  std::vector<std::array<T, 2>> Es;
  FourierSeries<T> B;
  std::vector<T> alpha;
  FourierSeries<T> alpha_series;
};

/// B solves B(theta) - lambda B(theta + omega) = -S(theta); then
/// Ec = DK and Es = B DK + N J^{-1} DK, and alpha = atan2(N, B).
template <class T>
BundlePair<T> reduce_bundles(const AdaptedFrame<T>& fr, const T& lambda, const T& omega) {
  using std::abs;
  using std::atan2;
  if (!(abs(lambda) < 1)) throw std::invalid_argument("reduce_bundles: need |lambda| < 1");
  BundlePair<T> bp;
  bp.B = fourier::solve_cohomology_contractive(fr.S_series, lambda, omega);
  const auto b = bp.B.to_grid();
  const std::size_t L = b.size();
  bp.Ec.resize(L);
  bp.Es.resize(L);
  bp.alpha.resize(L);
  for (std::size_t j = 0; j < L; ++j) {
    bp.Ec[j] = {fr.dk1[j], fr.dk2[j]};
    bp.Es[j] = {b[j] * fr.dk1[j] - fr.N[j] * fr.dk2[j], b[j] * fr.dk2[j] + fr.N[j] * fr.dk1[j]};
    bp.alpha[j] = atan2(fr.N[j], b[j]);
  }
  bp.alpha_series = fourier::from_grid(bp.alpha);
  return bp;
}

/// min_j |alpha_j| / pi
template <class T>
T min_angle_over_pi(const BundlePair<T>& bp) {
  using std::abs;
  T m = std::numeric_limits<double>::infinity();
  for (const auto& a : bp.alpha) {
    const T v = abs(a);
    if (v < m) m = v;
  }
  return m / numerics::pi<T>();
}

template <class T>
struct AxisAngles {
  std::vector<T> theta_c;
  std::vector<T> theta_s;
};

template <class T>
std::vector<T> unwrapped_atan2(const std::vector<std::array<T, 2>>& v) {
  using std::atan2;
  using std::round;
  const T two_pi = 2 * numerics::pi<T>();
  std::vector<T> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j][0] == 0 && v[j][1] == 0) throw std::domain_error("bundle_angles_vs_axis: zero vector");
    out[j] = atan2(v[j][1], v[j][0]);
    if (j > 0) out[j] -= two_pi * round((out[j] - out[j - 1]) / two_pi);
  }
  return out;
}

/// Angles of Ec and Es with the positive x semi-axis, continuous in theta.
template <class T>
AxisAngles<T> bundle_angles_vs_axis(const BundlePair<T>& bp) {
  return {unwrapped_atan2(bp.Ec), unwrapped_atan2(bp.Es)};
}

/// Series of a grid field shifted by omega, sampled back on the grid.
template <class T>
std::vector<T> shifted_grid(const std::vector<T>& g, const T& omega) {
  return fourier::from_grid(g).shift(omega).to_grid();
}

/// max_j |DP M(theta_j) - M(theta_j + omega) [[1, S], [0, lambda]]|.
template <class T>
T reducibility_defect(const AdaptedFrame<T>& fr, const T& lambda) {
  using std::abs;
  T m = 0;
  for (std::size_t j = 0; j < fr.S.size(); ++j) {
    const auto& D = fr.DP[j];
    const T m00 = fr.dk1[j], m10 = fr.dk2[j];
    const T m01 = -fr.dk2[j] * fr.N[j], m11 = fr.dk1[j] * fr.N[j];
    const T w00 = fr.dk1_w[j], w10 = fr.dk2_w[j];
    const T w01 = -fr.dk2_w[j] * fr.N_w[j], w11 = fr.dk1_w[j] * fr.N_w[j];
    const std::array<T, 4> lhs = {D[0] * m00 + D[1] * m10, D[0] * m01 + D[1] * m11, D[2] * m00 + D[3] * m10,
                                  D[2] * m01 + D[3] * m11};
    const std::array<T, 4> rhs = {w00, w00 * fr.S[j] + w01 * lambda, w10, w10 * fr.S[j] + w11 * lambda};
    for (int i = 0; i < 4; ++i) {
      const T d = abs(lhs[i] - rhs[i]);
      if (d > m) m = d;
    }
  }
  return m;
}

/// max_j |DP E(theta_j) - mult E(theta_j + omega)| / |E(theta_j)| for
/// (E, mult) = (Ec, 1) and (Es, lambda).
template <class T>
T bundle_invariance_defect(const AdaptedFrame<T>& fr, const BundlePair<T>& bp, const T& lambda, const T& omega) {
  using std::sqrt;
  const std::size_t L = bp.Ec.size();
  T m = 0;
  auto check = [&](const std::vector<std::array<T, 2>>& E, const T& mult) {
    std::vector<T> e1(L), e2(L);
    for (std::size_t j = 0; j < L; ++j) {
      e1[j] = E[j][0];
      e2[j] = E[j][1];
    }
    const auto s1 = shifted_grid(e1, omega);
    const auto s2 = shifted_grid(e2, omega);
    for (std::size_t j = 0; j < L; ++j) {
      const auto& D = fr.DP[j];
      const T r1 = D[0] * e1[j] + D[1] * e2[j] - mult * s1[j];
      const T r2 = D[2] * e1[j] + D[3] * e2[j] - mult * s2[j];
      const T d = sqrt((r1 * r1 + r2 * r2) / (e1[j] * e1[j] + e2[j] * e2[j]));
      if (d > m) m = d;
    }
  };
  check(bp.Ec, T(1));
  check(bp.Es, lambda);
  return m;
}

/// Rows "theta Ec_x Ec_y Es_x Es_y alpha"; with `normalized` both bundle
/// vectors are scaled to unit length.
template <class T>
void export_bundles(std::ostream& out, const BundlePair<T>& bp, bool normalized) {
  using std::sqrt;
  const std::size_t L = bp.Ec.size();
  out << "theta Ec_x Ec_y Es_x Es_y alpha\n";
  for (std::size_t j = 0; j < L; ++j) {
    std::array<T, 2> c = bp.Ec[j], s = bp.Es[j];
    if (normalized) {
      const T nc = sqrt(c[0] * c[0] + c[1] * c[1]);
      const T ns = sqrt(s[0] * s[0] + s[1] * s[1]);
      for (auto& x : c) x /= nc;
      for (auto& x : s) x /= ns;
    }
    const T theta = T(static_cast<long>(j)) / static_cast<long>(L);
    out << numerics::to_string(theta) << ' ' << numerics::to_string(c[0]) << ' ' << numerics::to_string(c[1]) << ' '
        << numerics::to_string(s[0]) << ' ' << numerics::to_string(s[1]) << ' ' << numerics::to_string(bp.alpha[j])
        << '\n';
  }
}

}  // namespace spinorbit::bundles
