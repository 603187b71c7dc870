#pragma once

// Quasi-Newton correction of (K, e) for P_e(K(theta)) = K(theta + omega),
// reduced to constant coefficients by the adapted frame.

#include "spinorbit/bundles/frame.hpp"
#include "spinorbit/fourier/cohomology.hpp"
#include "spinorbit/fourier/norms.hpp"
#include "spinorbit/kam/invariance.hpp"
#include "spinorbit/kam/torus.hpp"
#include "spinorbit/model/averages.hpp"
#include "spinorbit/numerics/kahan.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinorbit::kam {

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
T grid_mean(const std::vector<T>& g) {
  numerics::KahanAccumulator<T> acc;
  for (const auto& v : g) acc.add(v);
  return acc.sum() / static_cast<long>(g.size());
}

/// W with lambda W(theta) - W(theta + omega) = R(theta), via the contractive
/// form applied to R(theta - omega) with frequency -omega.
template <class T>
FourierSeries<T> solve_lambda_shift(const FourierSeries<T>& R, const T& lambda, const T& omega) {
  return fourier::solve_cohomology_contractive(R.shift(T(-omega)), lambda, T(-omega));
}

/// Shifts the parameterization so that the mean of u is zero.
template <class T>
void normalize_phase(TorusSolution<T>& sol) {
  const T tau = -sol.u.mean() / (2 * numerics::pi<T>());
  sol.u = sol.u.shift(tau);
  sol.K2 = sol.K2.shift(tau);
  sol.u.set_mean(T(0));
}

template <class T>
struct NewtonUpdate {
  TorusSolution<T> sol;
  T delta_e;
};

/// One correction from an evaluation (with jets) of the current torus.
template <class T>
NewtonUpdate<T> newton_update(const TorusSolution<T>& sol, const GridEvaluation<T>& ev) {
  using std::abs;
  const std::size_t L = sol.size();
  const auto fr = bundles::adapted_frame(sol, ev);

  std::vector<T> Et1(L), Et2(L), At1(L), At2(L);
  for (std::size_t j = 0; j < L; ++j) {
    // M(theta + omega) has det 1: inverse [[d, -b], [-c, a]]
    const T& a = fr.dk1_w[j];
    const T& c = fr.dk2_w[j];
    const T b = -fr.dk2_w[j] * fr.N_w[j];
    const T d = fr.dk1_w[j] * fr.N_w[j];
    const T& e1 = ev.E1[j];
    const T& e2 = ev.E2[j];
    const T& p1 = ev.image[j].x.d_e;
    const T& p2 = ev.image[j].y.d_e;
    Et1[j] = d * e1 - b * e2;
    Et2[j] = -c * e1 + a * e2;
    At1[j] = d * p1 - b * p2;
    At2[j] = -c * p1 + a * p2;
  }
  for (auto& v : Et2) v = -v;
  for (auto& v : At2) v = -v;
  const auto W2a = solve_lambda_shift(fourier::from_grid(Et2), sol.lambda, sol.omega).to_grid();
  const auto W2b = solve_lambda_shift(fourier::from_grid(At2), sol.lambda, sol.omega).to_grid();

  std::vector<T> num(L), den(L);
  for (std::size_t j = 0; j < L; ++j) {
    num[j] = Et1[j] + fr.S[j] * W2a[j];
    den[j] = fr.S[j] * W2b[j] + At1[j];
  }
  const T den_mean = grid_mean(den);
  if (!(abs(den_mean) > numerics::roundoff<T>(5))) throw NonConvergence("newton: vanishing twist denominator");
  const T delta_e = -grid_mean(num) / den_mean;

  std::vector<T> W2(L), R1(L);
  for (std::size_t j = 0; j < L; ++j) {
    W2[j] = W2a[j] + delta_e * W2b[j];
    R1[j] = -Et1[j] - fr.S[j] * W2[j] - At1[j] * delta_e;
  }
  const auto W1 = fourier::solve_cohomology_neutral(fourier::from_grid(R1), sol.omega).to_grid();

  std::vector<T> dK1(L), dK2(L);
  for (std::size_t j = 0; j < L; ++j) {
    dK1[j] = fr.dk1[j] * W1[j] - fr.dk2[j] * fr.N[j] * W2[j];
    dK2[j] = fr.dk2[j] * W1[j] + fr.dk1[j] * fr.N[j] * W2[j];
  }

  NewtonUpdate<T> out{sol, delta_e};
  out.sol.u += fourier::from_grid(dK1);
  out.sol.K2 += fourier::from_grid(dK2);
  out.sol.ecc = sol.ecc + delta_e;
  if (!(out.sol.ecc >= 0 && out.sol.ecc < 1)) throw NonConvergence("newton: drift left [0, 1)");
  out.sol.params.ecc = out.sol.ecc;
  out.sol.lambda = model::conformal_factor(out.sol.ecc, sol.params.mu).lambda;
  out.sol.residual = std::numeric_limits<double>::quiet_NaN();
  normalize_phase(out.sol);
  return out;
}

/// One full step: evaluate, correct, and re-evaluate to store the new residual.
template <class T>
NewtonUpdate<T> newton_step(const TorusSolution<T>& sol, const flow::TaylorConfig<T>& taylor, EvalOptions opt = {}) {
  opt.jets = true;
  const auto ev = evaluate_torus(sol, taylor, opt);
  auto up = newton_update(sol, ev);
  opt.jets = false;
  up.sol.residual = evaluate_torus(up.sol, taylor, opt).norm;
  return up;
}

template <class T>
struct ContinuationConfig {
  T newton_tol = numerics::from_string<T>("1e-35");
  T tail_lo = numerics::from_string<T>("1e-55");
  T tail_hi = numerics::from_string<T>("1e-28");
  std::size_t L_max = 65536;
  std::size_t L_min = 64;
  T eps_step_init = numerics::from_string<T>("1e-4");
  T eps_step_min = numerics::from_string<T>("1e-7");
  T eps_step_max = numerics::from_string<T>("1e-3");
  int max_newton_iters = 10;
  /// Residual above which an iteration is declared divergent.
  T divergence_bound = numerics::from_string<T>("1e-1");

  void validate() const {
    if (!(newton_tol > 0 && tail_lo > 0 && tail_hi > 0)) throw std::invalid_argument("tolerances must be positive");
    if (tail_lo > tail_hi) throw std::invalid_argument("tail_lo must not exceed tail_hi");
    if (!numerics::is_power_of_two(L_max) || !numerics::is_power_of_two(L_min) || L_min > L_max)
      throw std::invalid_argument("L_min, L_max must be powers of two with L_min <= L_max");
    if (!(eps_step_min > 0 && eps_step_init >= eps_step_min && eps_step_max >= eps_step_init))
      throw std::invalid_argument("need 0 < eps_step_min <= eps_step_init <= eps_step_max");
    if (max_newton_iters < 1) throw std::invalid_argument("max_newton_iters must be >= 1");
  }
};

template <class T>
struct SolveResult {
  TorusSolution<T> sol;
  GridEvaluation<T> eval;  // with jets, of `sol`
  int iterations = 0;
  bool converged = false;
  std::vector<T> residuals;
};

template <class T>
T torus_tail(const TorusSolution<T>& sol) {
  const T a = fourier::tail_fraction_norm(sol.u);
  const T b = fourier::tail_fraction_norm(sol.K2);
  return a > b ? a : b;
}

/// Newton iteration at a fixed mesh. Stagnation or the iteration limit end
/// the loop with converged = false and the best iterate; divergence throws.
template <class T>
SolveResult<T> newton_solve(TorusSolution<T> sol, const ContinuationConfig<T>& cfg,
                            const flow::TaylorConfig<T>& taylor, EvalOptions opt = {}) {
  opt.jets = true;
  SolveResult<T> out;
  for (int it = 0;; ++it) {
    auto ev = evaluate_torus(sol, taylor, opt);
    sol.residual = ev.norm;
    out.residuals.push_back(ev.norm);
    if (!(ev.norm == ev.norm) || ev.norm > cfg.divergence_bound)
      throw NonConvergence("newton: residual diverged");
    const bool stalled = it >= 2 && ev.norm > out.residuals[out.residuals.size() - 2];
    if (stalled && out.residuals.size() >= 2) {
      // keep the previous (better) iterate
      out.iterations = it;
      return out;
    }
    out.sol = sol;
    out.eval = std::move(ev);
    out.iterations = it;
    if (sol.residual < cfg.newton_tol) {
      out.converged = true;
      return out;
    }
    if (it >= cfg.max_newton_iters) return out;
    try {
      sol = newton_update(sol, out.eval).sol;
    } catch (const fourier::CohomologyError& e) {
      throw NonConvergence(std::string("newton: ") + e.what());
    } catch (const bundles::FrameError& e) {
      throw NonConvergence(std::string("newton: ") + e.what());
    }
  }
}

/// Newton plus mesh control: doubles L while the top-quarter tail exceeds
/// tail_hi (also when Newton stagnates on a truncation floor), halves it once
/// when the tail is below tail_lo.
template <class T>
SolveResult<T> solve_torus(const TorusSolution<T>& guess, const ContinuationConfig<T>& cfg,
                           const flow::TaylorConfig<T>& taylor, EvalOptions opt = {}) {
  cfg.validate();
  TorusSolution<T> sol = guess;
  bool shrunk = false;
  std::optional<SolveResult<T>> before_shrink;
  int total = 0;
  for (;;) {
    SolveResult<T> res;
    try {
      res = newton_solve(sol, cfg, taylor, opt);
    } catch (const NonConvergence&) {
      if (before_shrink) return std::move(*before_shrink);
      throw;
    }
    total += res.iterations;
    res.iterations = total;
    const T tail = torus_tail(res.sol);
    const std::size_t L = res.sol.size();
    if (tail > cfg.tail_hi) {
      if (before_shrink) return std::move(*before_shrink);
      if (2 * L > cfg.L_max) throw NonConvergence("mesh limit L_max exceeded");
      sol = res.sol.resized(2 * L);
      continue;
    }
    if (!res.converged) {
      if (before_shrink) return std::move(*before_shrink);
      throw NonConvergence("newton: no convergence");
    }
    if (tail < cfg.tail_lo && !shrunk && L / 2 >= cfg.L_min) {
      shrunk = true;
      sol = res.sol.resized(L / 2);
      before_shrink = std::move(res);
      continue;
    }
    return res;
  }
}

}  // namespace spinorbit::kam
