#pragma once

// Taylor integrator for the spin-orbit system in the eccentric anomaly u,
// with first-order jet transport in (x0, y0, e).
//
// Both variants are integrated in u. The averaged system is written with
// dt = (1 - e cos u) du so that its right-hand side is rational in
// (cos u, sin u) like the non-averaged one; the period map is unchanged.
//
// Every series carries a value part and up to three partial parts; a mask
// records which partials are structurally nonzero (the orbit series such as
// a/r depend on e only).

#include "spinorbit/flowmap/jet.hpp"
#include "spinorbit/model/averages.hpp"
#include "spinorbit/model/params.hpp"
#include "spinorbit/numerics/kernels.hpp"
#include "spinorbit/numerics/precision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace spinorbit::flow {

template <class T>
struct TaylorConfig {
  int order = 20;
  T abs_tol{1e-16};
  T rel_tol{1e-16};
  long max_steps = 100000;

  void validate() const {
    if (order < 4) throw std::invalid_argument("taylor order must be >= 4");
    if (!(abs_tol > 0) || !(rel_tol > 0)) throw std::invalid_argument("taylor tolerances must be positive");
    if (max_steps <= 0) throw std::invalid_argument("max_steps must be positive");
  }
};

/// order = ceil(D ln10 / 2) capped at 40, tolerances 10^-D, D = working digits.
template <class T>
TaylorConfig<T> default_taylor_config() {
  const int digits = numerics::working_digits<T>();
  TaylorConfig<T> cfg;
  cfg.order = std::clamp(static_cast<int>(std::ceil(digits * std::log(10.0) / 2)), 4, 40);
  cfg.abs_tol = numerics::pow10<T>(-digits);
  cfg.rel_tol = cfg.abs_tol;
  return cfg;
}

class TaylorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline constexpr unsigned kMaskE = 1u << 3;
inline constexpr unsigned kMaskAll = (1u << 1) | (1u << 2) | (1u << 3);

template <class T>
struct Series {
  std::array<std::vector<T>, 4> c;
  unsigned mask = 0;

  void allocate(int order) {
    for (auto& v : c) v.assign(static_cast<std::size_t>(order) + 1, T(0));
  }
  bool has(int i) const { return i == 0 || ((mask >> i) & 1u); }
};

/// out[k] = (a*b)[k] on every part active in out.
template <class T>
void mul_k(Series<T>& out, const Series<T>& a, const Series<T>& b, int k) {
  for (int i = 0; i < 4; ++i) {
    if (!out.has(i)) continue;
    T& r = out.c[i][k];
    r = 0;
    if (i == 0) {
      numerics::conv_add(r, a.c[0].data(), b.c[0].data(), 0, k);
      continue;
    }
    if (b.has(i)) numerics::conv_add(r, a.c[0].data(), b.c[i].data(), 0, k);
    if (a.has(i)) numerics::conv_add(r, a.c[i].data(), b.c[0].data(), 0, k);
  }
}

/// out[k] = (s*a)[k] for a constant s carrying an e-partial only.
template <class T>
void scale_k(Series<T>& out, const Jet<T>& s, const Series<T>& a, int k) {
  for (int i = 0; i < 4; ++i) {
    if (!out.has(i)) continue;
    T& r = out.c[i][k];
    r = a.has(i) ? T(s.value * a.c[i][k]) : T(0);
    if (i == 3) r += s.d_e * a.c[0][k];
  }
}

}  // namespace detail

template <class T>
class TaylorIntegrator {
 public:
  TaylorIntegrator(const model::ModelParams<T>& params, const TaylorConfig<T>& config, bool jets = true)
      : p_(params), cfg_(config), jets_(jets) {
    using std::sqrt;
    p_.validate();
    cfg_.validate();
    const int n = cfg_.order;
    const unsigned me = jets_ ? detail::kMaskE : 0u;
    const unsigned ma = jets_ ? detail::kMaskAll : 0u;
    for (auto* s : {&D_, &rho_, &rho2_, &rho4_, &rho5_, &eS_, &A_, &q_}) {
      s->allocate(n);
      s->mask = me;
    }
    for (auto* s : {&h_, &w_, &P0_, &P1_, &P2_, &P3_, &P4_, &P5_}) {
      s->allocate(n);
      s->mask = ma;
    }
    for (auto& x : X_) {
      x.allocate(n);
      x.mask = ma;
    }
    C_.assign(n + 1, T(0));
    S_.assign(n + 1, T(0));

    const T& e = p_.ecc;
    root_.value = sqrt(1 - e * e);
    root_.d_e = -e / root_.value;
    if (p_.variant == model::Variant::Averaged) {
      const auto avg = model::lbar_nbar(e);
      lbar_.value = avg.Lbar;
      lbar_.d_e = avg.dLbar_de;
      nbar_.value = avg.Nbar;
      nbar_.d_e = avg.dNbar_de;
    }
  }

  const model::ModelParams<T>& params() const { return p_; }
  const TaylorConfig<T>& config() const { return cfg_; }
  bool jets() const { return jets_; }
  long steps_taken() const { return steps_; }

  /// Advances `state` from u0 by one step, never past u_end; returns the advance.
  T step(JetState<T>& state, const T& u0, const T& u_end) {
    load(state);
    orbit_series(u0);
    if (p_.variant == model::Variant::NonAveraged)
      state_series_nonaveraged();
    else
      state_series_averaged();

    const T remaining = u_end - u0;
    const double h_est = step_estimate();
    T h = remaining;
    if (h_est < numerics::to_double(remaining)) {
      if (!(h_est >= 1e-15)) throw TaylorError("taylor step underflow (singular data?)");
      h = T(h_est);
    }
    evaluate(state, h);
    ++steps_;
    return h;
  }

  /// Integrates from u0 to u1 (u1 > u0).
  void integrate(JetState<T>& state, const T& u0, const T& u1) {
    T u = u0;
    long count = 0;
    while (u < u1) {
      if (++count > cfg_.max_steps) throw TaylorError("taylor integration exceeded max_steps");
      const T h = step(state, u, u1);
      if (h == u1 - u)
        u = u1;
      else
        u += h;
    }
  }

 private:
  void load(const JetState<T>& state) {
    for (int v = 0; v < 4; ++v)
      for (int i = 0; i < 4; ++i)
        if (X_[v].has(i)) X_[v].c[i][0] = state[v][i];
  }

  /// Coefficients of cos u, sin u, D = 1 - e cos u, a/r = 1/D and its powers at u0.
  void orbit_series(const T& u0) {
    using std::cos;
    using std::sin;
    const int n = cfg_.order;
    const T& e = p_.ecc;
    C_[0] = cos(u0);
    S_[0] = sin(u0);
    for (int k = 1; k <= n; ++k) {
      C_[k] = -S_[k - 1] / k;
      S_[k] = C_[k - 1] / k;
    }
    for (int k = 0; k <= n; ++k) {
      D_.c[0][k] = -e * C_[k];
      if (jets_) D_.c[3][k] = -C_[k];
    }
    D_.c[0][0] += 1;

    const T& d0 = D_.c[0][0];
    for (int k = 0; k <= n; ++k) {
      T q = 0;
      numerics::conv_add(q, D_.c[0].data(), rho_.c[0].data(), 1, k);
      rho_.c[0][k] = ((k == 0 ? T(1) : T(0)) - q) / d0;
      if (jets_) {
        T qe = 0;
        numerics::conv_add(qe, D_.c[0].data(), rho_.c[3].data(), 1, k);
        numerics::conv_add(qe, D_.c[3].data(), rho_.c[0].data(), 1, k);
        rho_.c[3][k] = (-qe - rho_.c[0][k] * D_.c[3][0]) / d0;
      }
    }
    for (int k = 0; k <= n; ++k) detail::mul_k(rho2_, rho_, rho_, k);
    for (int k = 0; k <= n; ++k) detail::scale_k(q_, root_, rho_, k);
    if (p_.variant == model::Variant::NonAveraged) {
      for (int k = 0; k <= n; ++k) {
        detail::mul_k(rho4_, rho2_, rho2_, k);
        eS_.c[0][k] = e * S_[k];
        if (jets_) eS_.c[3][k] = S_[k];
      }
      for (int k = 0; k <= n; ++k) {
        detail::mul_k(rho5_, rho4_, rho_, k);
        detail::mul_k(A_, eS_, rho_, k);
      }
    }
  }

  // (beta, gamma, s, c):
  //   beta' = gamma,  gamma' = A gamma - eps rho s - mu rho^5 (gamma - q),
  //   s' = 2 (gamma - q) c,  c' = -2 (gamma - q) s,
  // with A = e sin u rho and q = sqrt(1-e^2) rho.
  void state_series_nonaveraged() {
    auto& [beta, gamma, s, c] = X_;
    const int n = cfg_.order;
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < 4; ++i)
        if (h_.has(i)) h_.c[i][k] = q_.has(i) ? T(gamma.c[i][k] - q_.c[i][k]) : gamma.c[i][k];
      detail::mul_k(P1_, A_, gamma, k);
      detail::mul_k(P2_, rho_, s, k);
      detail::mul_k(P3_, rho5_, h_, k);
      detail::mul_k(P4_, c, h_, k);
      detail::mul_k(P5_, s, h_, k);
      const int k1 = k + 1;
      for (int i = 0; i < 4; ++i) {
        if (!gamma.has(i)) continue;
        beta.c[i][k1] = gamma.c[i][k] / k1;
        gamma.c[i][k1] = (P1_.c[i][k] - p_.eps * P2_.c[i][k] - p_.mu * P3_.c[i][k]) / k1;
        s.c[i][k1] = 2 * P4_.c[i][k] / k1;
        c.c[i][k1] = -2 * P5_.c[i][k] / k1;
      }
    }
  }

  // (x, y, s, c) with t' = D:
  //   x' = y D,  y' = -eps rho^2 s - mu D (Lbar y - Nbar),
  //   s' = 2 (y D - q) c,  c' = -2 (y D - q) s.
  void state_series_averaged() {
    auto& [x, y, s, c] = X_;
    const int n = cfg_.order;
    for (int k = 0; k < n; ++k) {
      detail::mul_k(P0_, y, D_, k);
      for (int i = 0; i < 4; ++i) {
        if (!h_.has(i)) continue;
        h_.c[i][k] = q_.has(i) ? T(P0_.c[i][k] - q_.c[i][k]) : P0_.c[i][k];
      }
      detail::scale_k(w_, lbar_, y, k);
      if (k == 0) {
        w_.c[0][0] -= nbar_.value;
        if (w_.has(3)) w_.c[3][0] -= nbar_.d_e;
      }
      detail::mul_k(P2_, rho2_, s, k);
      detail::mul_k(P3_, D_, w_, k);
      detail::mul_k(P4_, c, h_, k);
      detail::mul_k(P5_, s, h_, k);
      const int k1 = k + 1;
      for (int i = 0; i < 4; ++i) {
        if (!y.has(i)) continue;
        x.c[i][k1] = P0_.c[i][k] / k1;
        y.c[i][k1] = (-p_.eps * P2_.c[i][k] - p_.mu * P3_.c[i][k]) / k1;
        s.c[i][k1] = 2 * P4_.c[i][k] / k1;
        c.c[i][k1] = -2 * P5_.c[i][k] / k1;
      }
    }
  }

  double coefficient_log_norm(int k) const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& x : X_)
      for (int i = 0; i < 4; ++i)
        if (x.has(i)) m = std::max(m, numerics::log10_abs(x.c[i][k]));
    return m;
  }

  /// Jorba-Zou step from the last two coefficients.
  double step_estimate() const {
    const int n = cfg_.order;
    const double norm0 = coefficient_log_norm(0);
    const double log_abs = numerics::log10_abs(cfg_.abs_tol);
    const double log_rel = numerics::log10_abs(cfg_.rel_tol) + norm0;
    const double log_tol = std::max(log_abs, std::isfinite(log_rel) ? log_rel : log_abs);
    double log_h = std::numeric_limits<double>::infinity();
    for (int k : {n - 1, n}) {
      const double mk = coefficient_log_norm(k);
      if (std::isfinite(mk)) log_h = std::min(log_h, (log_tol - mk) / k);
    }
    if (!std::isfinite(log_h)) return std::numeric_limits<double>::infinity();
    return std::pow(10.0, log_h) * std::exp(-0.7 / (n - 1));
  }

  void evaluate(JetState<T>& state, const T& h) const {
    const int n = cfg_.order;
    for (int v = 0; v < 4; ++v) {
      for (int i = 0; i < 4; ++i) {
        if (!X_[v].has(i)) continue;
        const auto& a = X_[v].c[i];
        T acc = a[n];
        for (int k = n - 1; k >= 0; --k) {
          acc *= h;
          acc += a[k];
        }
        state[v][i] = std::move(acc);
      }
    }
  }

  model::ModelParams<T> p_;
  TaylorConfig<T> cfg_;
  bool jets_;
  long steps_ = 0;
  Jet<T> root_, lbar_, nbar_;
  std::vector<T> C_, S_;
  detail::Series<T> D_, rho_, rho2_, rho4_, rho5_, eS_, A_, q_;
  detail::Series<T> h_, w_, P0_, P1_, P2_, P3_, P4_, P5_;
  std::array<detail::Series<T>, 4> X_;
};

/// One step from u0 (capped at u0 + 2 pi); returns the new state and the advance.
template <class T>
std::pair<JetState<T>, T> taylor_step(JetState<T> state, const T& u0, const TaylorConfig<T>& config,
                                      const model::ModelParams<T>& params) {
  TaylorIntegrator<T> integ(params, config, true);
  const T advance = integ.step(state, u0, u0 + 2 * numerics::pi<T>());
  return {std::move(state), advance};
}

}  // namespace spinorbit::flow
