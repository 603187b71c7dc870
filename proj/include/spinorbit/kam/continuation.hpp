#pragma once

// Continuation of a torus family in eps with the drift e corrected at every
// step. Predictor: Lagrange extrapolation through the last (up to four)
// accepted tori.

#include "spinorbit/bundles/frame.hpp"
#include "spinorbit/fourier/norms.hpp"
#include "spinorbit/kam/newton.hpp"
#include "spinorbit/kam/torus.hpp"
#include "spinorbit/numerics/precision.hpp"

#include <array>
#include <chrono>
#include <deque>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinorbit::kam {

inline constexpr int kSeminormOrders = 8;

template <class T>
struct ContinuationRecord {
  T eps;
  T ecc;
  T residual;
  std::size_t L = 0;
  std::array<T, kSeminormOrders> H;  // H_1 .. H_8 of u
  T min_angle;                       // min |alpha| / pi
  T width;                           // analyticity width of u (NaN if unavailable)
  double wall_time = 0;              // seconds spent on this step
};

/// Diagnostics of a solved torus; `eval` must carry jets.
template <class T>
ContinuationRecord<T> make_record(const TorusSolution<T>& sol, const GridEvaluation<T>& eval, double wall) {
  ContinuationRecord<T> r;
  r.eps = sol.params.eps;
  r.ecc = sol.ecc;
  r.residual = sol.residual;
  r.L = sol.size();
  for (int k = 0; k < kSeminormOrders; ++k) r.H[k] = fourier::sobolev_seminorm(sol.u, T(k + 1));
  const T nan = std::numeric_limits<double>::quiet_NaN();
  r.min_angle = nan;
  if (sol.lambda < 1) {
    const auto fr = bundles::adapted_frame(sol, eval);
    r.min_angle = bundles::min_angle_over_pi(bundles::reduce_bundles(fr, sol.lambda, sol.omega));
  }
  try {
    r.width = fourier::analyticity_width(sol.u);
  } catch (const std::domain_error&) {
    r.width = nan;
  }
  r.wall_time = wall;
  return r;
}

inline std::string continuation_log_header() {
  std::string h = "eps,ecc,residual,L";
  for (int k = 1; k <= kSeminormOrders; ++k) h += ",H" + std::to_string(k);
  return h + ",min_angle,width,wall_time";
}

template <class T>
void write_log_row(std::ostream& out, const ContinuationRecord<T>& r) {
  using numerics::to_string;
  out << to_string(r.eps) << ',' << to_string(r.ecc) << ',' << to_string(r.residual) << ',' << r.L;
  for (const auto& h : r.H) out << ',' << to_string(h);
  out << ',' << to_string(r.min_angle) << ',' << to_string(r.width) << ',' << r.wall_time << '\n';
}

template <class T>
std::vector<ContinuationRecord<T>> read_log(std::istream& in) {
  std::vector<ContinuationRecord<T>> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("eps,", 0) == 0) continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 4 + kSeminormOrders + 3) throw std::runtime_error("continuation log: bad row '" + line + "'");
    ContinuationRecord<T> r;
    r.eps = numerics::from_string<T>(f[0]);
    r.ecc = numerics::from_string<T>(f[1]);
    r.residual = numerics::from_string<T>(f[2]);
    r.L = static_cast<std::size_t>(std::stoul(f[3]));
    for (int k = 0; k < kSeminormOrders; ++k) r.H[k] = numerics::from_string<T>(f[4 + k]);
    r.min_angle = numerics::from_string<T>(f[4 + kSeminormOrders]);
    r.width = numerics::from_string<T>(f[5 + kSeminormOrders]);
    r.wall_time = std::stod(f[6 + kSeminormOrders]);
    out.push_back(std::move(r));
  }
  return out;
}

/// Lagrange extrapolation of (u, K2, e) to `eps` through `history`, all at
/// mesh L.
template <class T>
TorusSolution<T> extrapolate(const std::deque<TorusSolution<T>>& history, const T& eps, std::size_t L) {
  TorusSolution<T> out = history.back().resized(L);
  const std::size_t n = history.size();
  out.u = FourierSeries<T>(L);
  out.K2 = FourierSeries<T>(L);
  out.ecc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    T w = 1;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) w *= (eps - history[j].params.eps) / (history[i].params.eps - history[j].params.eps);
    out.u += history[i].u.resized(L) * w;
    out.K2 += history[i].K2.resized(L) * w;
    out.ecc += history[i].ecc * w;
  }
  out.params.eps = eps;
  out.params.ecc = out.ecc;
  out.lambda = model::conformal_factor(out.ecc, out.params.mu).lambda;
  out.residual = std::numeric_limits<double>::quiet_NaN();
  return out;
}

enum class ContinuationStatus { Reached, Stalled };

template <class T>
struct ContinuationOutcome {
  ContinuationStatus status = ContinuationStatus::Reached;
  std::vector<ContinuationRecord<T>> records;
  TorusSolution<T> last;  // last accepted torus (breakdown estimate when stalled)
};

/// Everything the march needs to go on: the last (up to four) accepted tori
/// and the next eps increment.
template <class T>
struct ContinuationState {
  std::deque<TorusSolution<T>> history;
  T step;
};

/// Called after every accepted torus with its record and the state the march
/// continues from (a checkpoint).
template <class T>
using AcceptCallback =
    std::function<void(const TorusSolution<T>&, const ContinuationRecord<T>&, const ContinuationState<T>&)>;

/// Marches eps from the last torus of `state` to eps_target. A failed step
/// halves the eps increment, a success grows it by 3/2; an increment below
/// eps_step_min ends the run as Stalled.
template <class T>
ContinuationOutcome<T> continue_from(ContinuationState<T> state, const T& eps_target, const ContinuationConfig<T>& cfg,
                                     const flow::TaylorConfig<T>& taylor, EvalOptions opt = {},
                                     const AcceptCallback<T>& on_accept = {}) {
  using clock = std::chrono::steady_clock;
  cfg.validate();
  if (state.history.empty()) throw std::invalid_argument("continuation: empty history");
  ContinuationOutcome<T> out;
  out.last = state.history.back();
  auto& history = state.history;
  while (history.back().params.eps < eps_target) {
    T eps = history.back().params.eps + state.step;
    if (eps > eps_target) eps = eps_target;
    const auto t0 = clock::now();
    const auto guess = extrapolate(history, eps, history.back().size());
    try {
      auto res = solve_torus(guess, cfg, taylor, opt);
      const double wall = std::chrono::duration<double>(clock::now() - t0).count();
      out.records.push_back(make_record(res.sol, res.eval, wall));
      out.last = res.sol;
      history.push_back(std::move(res.sol));
      if (history.size() > 4) history.pop_front();
      state.step = state.step * 3 / 2;
      if (state.step > cfg.eps_step_max) state.step = cfg.eps_step_max;
      if (on_accept) on_accept(out.last, out.records.back(), state);
    } catch (const NonConvergence&) {
      state.step /= 2;
    } catch (const flow::TaylorError&) {
      state.step /= 2;
    }
    if (state.step < cfg.eps_step_min) {
      out.status = ContinuationStatus::Stalled;
      return out;
    }
  }
  return out;
}

/// Solves `start` (and records it), then continues to eps_target.
template <class T>
ContinuationOutcome<T> continue_family(const TorusSolution<T>& start, const T& eps_target,
                                       const ContinuationConfig<T>& cfg, const flow::TaylorConfig<T>& taylor,
                                       EvalOptions opt = {}, const AcceptCallback<T>& on_accept = {}) {
  using clock = std::chrono::steady_clock;
  cfg.validate();
  const auto t0 = clock::now();
  auto res = solve_torus(start, cfg, taylor, opt);
  const double wall = std::chrono::duration<double>(clock::now() - t0).count();
  const auto first = make_record(res.sol, res.eval, wall);
  ContinuationState<T> state{{res.sol}, cfg.eps_step_init};
  if (on_accept) on_accept(res.sol, first, state);
  auto out = continue_from(std::move(state), eps_target, cfg, taylor, opt, on_accept);
  out.records.insert(out.records.begin(), first);
  return out;
}

}  // namespace spinorbit::kam
