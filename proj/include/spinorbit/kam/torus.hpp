#pragma once

// Invariant-torus embeddings K(theta) = (2 pi theta + u(theta), K2(theta)),
// theta in [0, 1), in physical coordinates (x = spin angle in radians,
// y = spin rate). Invariance reads P_e(K(theta)) = K(theta + omega).

#include "spinorbit/fourier/series.hpp"
#include "spinorbit/model/averages.hpp"
#include "spinorbit/model/params.hpp"
#include "spinorbit/numerics/precision.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinorbit::kam {

using fourier::FourierSeries;

template <class T>
struct TorusSolution {
  FourierSeries<T> u;
  FourierSeries<T> K2;
  T ecc{0};
  T omega{0};
  T residual{0};
  T lambda{1};
  model::ModelParams<T> params;

  std::size_t size() const { return u.size(); }

  /// params with the drift replaced by this torus' eccentricity.
  model::ModelParams<T> map_params() const {
    auto p = params;
    p.ecc = ecc;
    return p;
  }

  TorusSolution resized(std::size_t L) const {
    TorusSolution out = *this;
    out.u = u.resized(L);
    out.K2 = K2.resized(L);
    return out;
  }
};

/// Golden mean (sqrt 5 + 1)/2.
template <class T>
T omega1() {
  using std::sqrt;
  return (sqrt(T(5)) + 1) / 2;
}

/// 1 + 1/(2 + (sqrt 5 - 1)/2).
template <class T>
T omega2() {
  using std::sqrt;
  return 1 + 1 / (2 + (sqrt(T(5)) - 1) / 2);
}

/// "omega1", "omega2", or a continued fraction "a0;a1,a2,...". A trailing
/// ",..." (or "a0;...") continues with ones forever.
template <class T>
T frequency_from_selector(const std::string& selector) {
  using std::sqrt;
  if (selector == "omega1") return omega1<T>();
  if (selector == "omega2") return omega2<T>();
  const auto semi = selector.find(';');
  if (semi == std::string::npos) throw std::invalid_argument("bad frequency selector '" + selector + "'");
  std::vector<long> terms;
  bool noble_tail = false;
  auto parse_int = [&](const std::string& tok) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || v <= 0) throw std::invalid_argument("bad continued-fraction term '" + tok + "'");
    return v;
  };
  const std::string head = selector.substr(0, semi);
  std::size_t used = 0;
  long a0 = 0;
  try {
    a0 = std::stol(head, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (head.empty() || used != head.size()) throw std::invalid_argument("bad continued-fraction head '" + head + "'");
  std::stringstream rest(selector.substr(semi + 1));
  std::string tok;
  while (std::getline(rest, tok, ',')) {
    if (tok == "...") {
      noble_tail = true;
      if (rest.peek() != EOF) throw std::invalid_argument("'...' must end the continued fraction");
      break;
    }
    terms.push_back(parse_int(tok));
  }
  // value of [1; 1, 1, ...] is the golden mean, so its reciprocal tail is 1/phi
  T tail = noble_tail ? T(2 / (sqrt(T(5)) + 1)) : T(0);
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) tail = 1 / (*it + tail);
  return a0 + tail;
}

/// Flat attractor of the averaged system at eps = 0: u = 0, K2 = Nbar/Lbar = omega.
template <class T>
TorusSolution<T> integrable_torus(const T& omega, const model::ModelParams<T>& params, std::size_t L) {
  TorusSolution<T> sol;
  sol.params = params;
  sol.omega = omega;
  sol.ecc = model::averaged_drift_for(omega);
  sol.params.ecc = sol.ecc;
  sol.lambda = model::conformal_factor(sol.ecc, params.mu).lambda;
  sol.u = FourierSeries<T>(L);
  sol.K2 = FourierSeries<T>(L);
  const auto avg = model::lbar_nbar(sol.ecc);
  sol.K2.set_mean(avg.Nbar / avg.Lbar);
  sol.residual = std::numeric_limits<double>::quiet_NaN();
  return sol;
}

/// Block: "L precision_digits", then L lines "k re im" in FFT order.
template <class T>
void write_series(std::ostream& out, const FourierSeries<T>& f) {
  const long L = static_cast<long>(f.size());
  out << L << ' ' << numerics::precision_digits() << '\n';
  for (long i = 0; i < L; ++i) {
    const long k = i < L / 2 ? i : i - L;
    const auto& c = k == -L / 2 ? numerics::Complex<T>() : f[k];
    out << k << ' ' << numerics::to_string(c.re) << ' ' << numerics::to_string(c.im) << '\n';
  }
}

template <class T>
FourierSeries<T> read_series(std::istream& in) {
  long L = 0;
  int digits = 0;
  if (!(in >> L >> digits) || L < 2) throw std::runtime_error("series block: bad header");
  FourierSeries<T> f(static_cast<std::size_t>(L));
  for (long i = 0; i < L; ++i) {
    long k = 0;
    std::string re, im;
    if (!(in >> k >> re >> im)) throw std::runtime_error("series block: truncated");
    if (k <= -L / 2 || k >= L / 2) continue;
    if (k >= 0) f.set(k, {numerics::from_string<T>(re), numerics::from_string<T>(im)});
  }
  return f;
}

/// Header "omega eps ecc mu lambda L precision variant residual", then the u
/// and K2 blocks.
template <class T>
void write_torus(std::ostream& out, const TorusSolution<T>& sol) {
  using numerics::to_string;
  out << to_string(sol.omega) << ' ' << to_string(sol.params.eps) << ' ' << to_string(sol.ecc) << ' '
      << to_string(sol.params.mu) << ' ' << to_string(sol.lambda) << ' ' << sol.size() << ' '
      << numerics::precision_digits() << ' ' << model::to_string(sol.params.variant) << ' '
      << to_string(sol.residual) << '\n';
  write_series(out, sol.u);
  write_series(out, sol.K2);
}

template <class T>
TorusSolution<T> read_torus(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("torus file: missing header");
  std::istringstream h(header);
  std::string omega, eps, ecc, mu, lambda, variant, residual;
  std::size_t L = 0;
  int digits = 0;
  if (!(h >> omega >> eps >> ecc >> mu >> lambda >> L >> digits >> variant))
    throw std::runtime_error("torus file: malformed header");
  TorusSolution<T> sol;
  sol.omega = numerics::from_string<T>(omega);
  sol.params.eps = numerics::from_string<T>(eps);
  sol.ecc = numerics::from_string<T>(ecc);
  sol.params.ecc = sol.ecc;
  sol.params.mu = numerics::from_string<T>(mu);
  sol.params.variant = model::variant_from_string(variant);
  sol.lambda = numerics::from_string<T>(lambda);
  sol.residual = (h >> residual) ? numerics::from_string<T>(residual) : T(std::numeric_limits<double>::quiet_NaN());
  sol.u = read_series<T>(in);
  sol.K2 = read_series<T>(in);
  if (sol.u.size() != L || sol.K2.size() != L) throw std::runtime_error("torus file: block length mismatch");
  return sol;
}

template <class T>
void save_torus(const std::string& path, const TorusSolution<T>& sol) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  write_torus(out, sol);
  if (!out) throw std::ios_base::failure("write failed: " + path);
}

template <class T>
TorusSolution<T> load_torus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read " + path);
  return read_torus<T>(in);
}

}  // namespace spinorbit::kam
