#pragma once

// Rotation numbers from weighted Birkhoff averages of the spin rate sampled
// once per orbital period, and basins of rotation numbers on a grid of
// initial conditions.

#include "spinorbit/flowmap/poincare.hpp"
#include "spinorbit/model/averages.hpp"
#include "spinorbit/model/params.hpp"
#include "spinorbit/numerics/kahan.hpp"
#include "spinorbit/numerics/parallel.hpp"
#include "spinorbit/numerics/precision.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace spinorbit::analysis {

/// exp(-1 / (z^2 (1-z)^2)) on (0, 1), zero outside.
template <class T>
T weight(const T& z) {
  using std::exp;
  if (!(z > 0) || !(z < 1)) return T(0);
  const T w = z * (1 - z);
  return exp(-1 / (w * w));
}

enum class Weight { BumpExp, Flat };

struct RotationConfig {
  std::optional<long> n0_override;
  long n1 = 4500;
  long n2 = 4600;
  long delta = 10;
  Weight weight = Weight::BumpExp;

  void validate() const {
    if (n1 < 2 || n1 >= n2) throw std::invalid_argument("rotation: need 2 <= n1 < n2");
    if (delta < 1) throw std::invalid_argument("rotation: delta must be >= 1");
    if (n0_override && *n0_override < 0) throw std::invalid_argument("rotation: n0 must be >= 0");
  }
};

template <class T>
struct RotationResult {
  T rho;
  bool converged = false;
  long n_used = 0;
};

/// Transient length ceil(-14 / log10 lambda).
template <class T>
long transient_length(const model::ModelParams<T>& params) {
  const T lambda = model::conformal_factor(params.ecc, params.mu).lambda;
  if (!(lambda < 1)) throw std::invalid_argument("rotation: transient undefined for mu = 0 (set n0_override)");
  return static_cast<long>(std::ceil(-14.0 / numerics::log10_abs(lambda)));
}

/// sum_{j<n} phi(j/n) y_j / sum_{j<n} phi(j/n), y_j = y(2 pi j), j = 1..n-1.
template <class T>
T weighted_average(const std::vector<T>& y, long n, Weight w) {
  numerics::KahanAccumulator<T> num, den;
  for (long j = 1; j < n; ++j) {
    const T phi = w == Weight::Flat ? T(1) : weight(T(T(j) / n));
    num.add(phi * y[static_cast<std::size_t>(j)]);
    den.add(phi);
  }
  return num.sum() / den.sum();
}

/// `map` must be a value-only (or jet) evaluator for `params`.
template <class T>
RotationResult<T> rotation_number(const T& x0, const T& y0, flow::PoincareMap<T>& map, const RotationConfig& cfg) {
  using std::abs;
  using std::floor;
  cfg.validate();
  const auto& params = map.params();
  const long n0 = cfg.n0_override ? *cfg.n0_override : transient_length(params);
  const T two_pi = 2 * numerics::pi<T>();
  T x = x0, y = y0;
  auto advance = [&] {
    auto [xn, yn] = map.values(x, y);
    x = xn - two_pi * floor(xn / two_pi);
    y = yn;
  };
  for (long j = 0; j < n0; ++j) advance();
  std::vector<T> ys(static_cast<std::size_t>(cfg.n2) + 1);
  ys[0] = y;
  for (long j = 1; j <= cfg.n2; ++j) {
    advance();
    ys[static_cast<std::size_t>(j)] = y;
  }
  const T tol = numerics::pow10<T>(-numerics::working_digits<T>() / 2);
  RotationResult<T> r;
  r.rho = weighted_average(ys, cfg.n1, cfg.weight);
  r.n_used = cfg.n1;
  for (long n = cfg.n1 + cfg.delta; n <= cfg.n2; n += cfg.delta) {
    const T next = weighted_average(ys, n, cfg.weight);
    const bool same = abs(next - r.rho) <= tol;
    r.rho = next;
    r.n_used = n;
    if (same) {
      r.converged = true;
      break;
    }
  }
  return r;
}

template <class T>
RotationResult<T> rotation_number(const T& x0, const T& y0, const model::ModelParams<T>& params,
                                  const RotationConfig& cfg,
                                  const flow::TaylorConfig<T>& taylor = flow::default_taylor_config<T>()) {
  flow::PoincareMap<T> map(params, taylor, false);
  return rotation_number(x0, y0, map, cfg);
}

struct Window {
  double x_lo, x_hi, y_lo, y_hi;
};

template <class T>
struct BasinNode {
  T x;
  T y;
  T rho;
  bool converged = false;
};

/// Node (i, j) of an nx-by-ny grid with both ends included; index = j*nx + i.
template <class T>
std::pair<T, T> basin_node(const Window& w, long nx, long ny, long index) {
  const long i = index % nx;
  const long j = index / nx;
  const T x = T(w.x_lo) + (T(w.x_hi) - T(w.x_lo)) * i / (nx - 1);
  const T y = T(w.y_lo) + (T(w.y_hi) - T(w.y_lo)) * j / (ny - 1);
  return {x, y};
}

/// Nodes [begin, end) of the row-major grid (rows of constant y).
template <class T>
std::vector<BasinNode<T>> basin_grid_range(const Window& w, long nx, long ny, long begin, long end,
                                           const model::ModelParams<T>& params, const RotationConfig& cfg,
                                           const flow::TaylorConfig<T>& taylor, int workers) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("basin: need nx, ny >= 2");
  if (!(w.x_hi > w.x_lo) || !(w.y_hi > w.y_lo)) throw std::invalid_argument("basin: empty window");
  if (begin < 0 || end > nx * ny || begin > end) throw std::invalid_argument("basin: bad node range");
  cfg.validate();
  std::vector<BasinNode<T>> out(static_cast<std::size_t>(end - begin));
  numerics::parallel_chunks(out.size(), workers, [&](int, std::size_t b, std::size_t e) {
    flow::PoincareMap<T> map(params, taylor, false);
    for (std::size_t k = b; k < e; ++k) {
      auto [x, y] = basin_node<T>(w, nx, ny, begin + static_cast<long>(k));
      auto& node = out[k];
      node.x = x;
      node.y = y;
      try {
        const auto r = rotation_number(x, y, map, cfg);
        node.rho = r.rho;
        node.converged = r.converged;
      } catch (const flow::TaylorError&) {
        node.rho = std::numeric_limits<double>::quiet_NaN();
        node.converged = false;
      }
    }
  });
  return out;
}

template <class T>
std::vector<BasinNode<T>> basin_grid(const Window& w, long nx, long ny, const model::ModelParams<T>& params,
                                     const RotationConfig& cfg,
                                     const flow::TaylorConfig<T>& taylor = flow::default_taylor_config<T>(),
                                     int workers = numerics::default_workers()) {
  return basin_grid_range(w, nx, ny, 0, nx * ny, params, cfg, taylor, workers);
}

/// Rows "x,y,rho,converged".
template <class T>
void write_basin_rows(std::ostream& out, const std::vector<BasinNode<T>>& nodes) {
  for (const auto& n : nodes)
    out << numerics::to_string(n.x) << ',' << numerics::to_string(n.y) << ',' << numerics::to_string(n.rho) << ','
        << (n.converged ? 1 : 0) << '\n';
}

}  // namespace spinorbit::analysis
