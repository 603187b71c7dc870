#pragma once

#include "spinorbit/flowmap/poincare.hpp"
#include "spinorbit/fourier/series.hpp"
#include "spinorbit/kam/torus.hpp"
#include "spinorbit/numerics/parallel.hpp"
#include "spinorbit/numerics/precision.hpp"

#include <cmath>
#include <vector>

namespace spinorbit::kam {

/// The period map applied to every grid point of a torus, and the
/// invariance error E(theta_j) = P_e(K(theta_j)) - K(theta_j + omega).
template <class T>
struct GridEvaluation {
  std::vector<T> x0, y0;
  std::vector<flow::MapResult<T>> image;
  std::vector<T> E1, E2;
  T norm{0};
};

struct EvalOptions {
  bool jets = true;
  int workers = numerics::default_workers();
};

/// K1 on the grid (2 pi theta_j + u(theta_j)) and K2 on the grid.
template <class T>
void embedding_grid(const TorusSolution<T>& sol, std::vector<T>& k1, std::vector<T>& k2) {
  const long L = static_cast<long>(sol.size());
  const T two_pi = 2 * numerics::pi<T>();
  k1 = sol.u.to_grid();
  k2 = sol.K2.to_grid();
  for (long j = 0; j < L; ++j) k1[j] += two_pi * j / L;
}

template <class T>
GridEvaluation<T> evaluate_torus(const TorusSolution<T>& sol, const flow::TaylorConfig<T>& taylor,
                                 EvalOptions opt = {}) {
  using std::abs;
  GridEvaluation<T> ev;
  const std::size_t L = sol.size();
  embedding_grid(sol, ev.x0, ev.y0);
  ev.image.resize(L);
  const auto params = sol.map_params();
  numerics::parallel_chunks(L, opt.workers, [&](int, std::size_t begin, std::size_t end) {
    flow::PoincareMap<T> map(params, taylor, opt.jets);
    for (std::size_t j = begin; j < end; ++j) ev.image[j] = map(ev.x0[j], ev.y0[j]);
  });

  std::vector<T> t1, t2;
  TorusSolution<T> shifted = sol;
  shifted.u = sol.u.shift(sol.omega);
  shifted.K2 = sol.K2.shift(sol.omega);
  embedding_grid(shifted, t1, t2);
  const T advance = 2 * numerics::pi<T>() * sol.omega;
  ev.E1.resize(L);
  ev.E2.resize(L);
  ev.norm = 0;
  for (std::size_t j = 0; j < L; ++j) {
    ev.E1[j] = ev.image[j].x.value - (t1[j] + advance);
    ev.E2[j] = ev.image[j].y.value - t2[j];
    const T m = std::max<T>(abs(ev.E1[j]), abs(ev.E2[j]));
    if (m > ev.norm) ev.norm = m;
  }
  return ev;
}

template <class T>
struct InvarianceError {
  FourierSeries<T> E1;
  FourierSeries<T> E2;
  T norm;
};

template <class T>
InvarianceError<T> invariance_error(const TorusSolution<T>& sol, const flow::TaylorConfig<T>& taylor,
                                    EvalOptions opt = {}) {
  opt.jets = false;
  auto ev = evaluate_torus(sol, taylor, opt);
  return {fourier::from_grid(ev.E1), fourier::from_grid(ev.E2), ev.norm};
}

template <class T>
InvarianceError<T> invariance_error(const TorusSolution<T>& sol) {
  return invariance_error(sol, flow::default_taylor_config<T>());
}

}  // namespace spinorbit::kam
