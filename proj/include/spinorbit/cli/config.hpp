#pragma once

// Flat "key = value" run configuration. Scalars stay decimal strings until a
// run fixes the precision, so nothing binary is ever persisted.

#include "spinorbit/flowmap/taylor.hpp"
#include "spinorbit/kam/newton.hpp"
#include "spinorbit/kam/torus.hpp"
#include "spinorbit/model/params.hpp"
#include "spinorbit/numerics/parallel.hpp"
#include "spinorbit/numerics/precision.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace spinorbit::cli {

struct RunConfig {
  int precision_digits = 70;
  std::string variant = "nonaveraged";
  std::string mu = "1e-3";
  std::string omega = "omega1";
  int taylor_order = 0;        // 0: chosen from the precision
  std::string taylor_tol;      // empty: 10^-working digits
  std::string newton_tol = "1e-35";
  std::string tail_lo = "1e-55";
  std::string tail_hi = "1e-28";
  std::size_t L_max = 65536;
  std::size_t L_min = 64;
  std::size_t L_start = 64;
  std::string eps_step_init = "1e-4";
  std::string eps_step_min = "1e-7";
  std::string eps_step_max = "1e-3";
  int max_newton_iters = 10;
  long n1 = 4500;
  long n2 = 4600;
  long delta = 10;
  long n0 = -1;  // negative: transient from the contraction rate
  int workers = numerics::default_workers();
  std::string output_dir = ".";

  void set(const std::string& key, const std::string& value);
  void validate() const;
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

namespace detail {
inline long parse_long(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long out = 0;
  try {
    out = std::stol(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

inline std::string parse_scalar(const std::string& key, const std::string& v) {
  // syntax check at double precision; the text itself is kept
  std::size_t pos = 0;
  try {
    (void)std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
  return v;
}
}  // namespace detail

inline void RunConfig::set(const std::string& key, const std::string& value) {
  using detail::parse_long;
  using detail::parse_scalar;
  const std::string v = trim(value);
  if (key == "precision_digits") precision_digits = static_cast<int>(parse_long(key, v));
  else if (key == "variant") variant = std::string(model::to_string(model::variant_from_string(v)));
  else if (key == "mu") mu = parse_scalar(key, v);
  else if (key == "omega") omega = v;
  else if (key == "taylor_order") taylor_order = static_cast<int>(parse_long(key, v));
  else if (key == "taylor_tol") taylor_tol = v.empty() ? v : parse_scalar(key, v);
  else if (key == "newton_tol") newton_tol = parse_scalar(key, v);
  else if (key == "tail_lo") tail_lo = parse_scalar(key, v);
  else if (key == "tail_hi") tail_hi = parse_scalar(key, v);
  else if (key == "L_max") L_max = static_cast<std::size_t>(parse_long(key, v));
  else if (key == "L_min") L_min = static_cast<std::size_t>(parse_long(key, v));
  else if (key == "L_start") L_start = static_cast<std::size_t>(parse_long(key, v));
  else if (key == "eps_step_init") eps_step_init = parse_scalar(key, v);
  else if (key == "eps_step_min") eps_step_min = parse_scalar(key, v);
  else if (key == "eps_step_max") eps_step_max = parse_scalar(key, v);
  else if (key == "max_newton_iters") max_newton_iters = static_cast<int>(parse_long(key, v));
  else if (key == "n1") n1 = parse_long(key, v);
  else if (key == "n2") n2 = parse_long(key, v);
  else if (key == "delta") delta = parse_long(key, v);
  else if (key == "n0") n0 = parse_long(key, v);
  else if (key == "workers") workers = static_cast<int>(parse_long(key, v));
  else if (key == "output_dir") output_dir = v;
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

inline void RunConfig::validate() const {
  if (precision_digits < 6 || precision_digits > 2000) throw std::invalid_argument("config: precision_digits must be in [6, 2000]");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (taylor_order != 0 && taylor_order < 4) throw std::invalid_argument("config: taylor_order must be 0 or >= 4");
  if (!numerics::is_power_of_two(L_start)) throw std::invalid_argument("config: L_start must be a power of two");
  for (const auto* s : {&newton_tol, &tail_lo, &tail_hi, &eps_step_init, &eps_step_min, &eps_step_max})
    if (!(std::stod(*s) > 0)) throw std::invalid_argument("config: tolerances and steps must be positive");
  if (!taylor_tol.empty() && !(std::stod(taylor_tol) > 0)) throw std::invalid_argument("config: taylor_tol must be positive");
  if (std::stod(mu) < 0) throw std::invalid_argument("config: mu must be >= 0");
}

/// Reads "key = value" lines; '#' starts a comment.
inline void parse_config(std::istream& in, RunConfig& cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read config " + path);
  RunConfig cfg;
  parse_config(in, cfg);
  return cfg;
}

/// Inline override "key=value".
inline void apply_override(RunConfig& cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("override '" + kv + "' is not key=value");
  cfg.set(trim(kv.substr(0, eq)), kv.substr(eq + 1));
}

inline void write_config(std::ostream& out, const RunConfig& c) {
  out << "precision_digits = " << c.precision_digits << '\n'
      << "variant = " << c.variant << '\n'
      << "mu = " << c.mu << '\n'
      << "omega = " << c.omega << '\n'
      << "taylor_order = " << c.taylor_order << '\n'
      << "taylor_tol = " << c.taylor_tol << '\n'
      << "newton_tol = " << c.newton_tol << '\n'
      << "tail_lo = " << c.tail_lo << '\n'
      << "tail_hi = " << c.tail_hi << '\n'
      << "L_max = " << c.L_max << '\n'
      << "L_min = " << c.L_min << '\n'
      << "L_start = " << c.L_start << '\n'
      << "eps_step_init = " << c.eps_step_init << '\n'
      << "eps_step_min = " << c.eps_step_min << '\n'
      << "eps_step_max = " << c.eps_step_max << '\n'
      << "max_newton_iters = " << c.max_newton_iters << '\n'
      << "n1 = " << c.n1 << '\n'
      << "n2 = " << c.n2 << '\n'
      << "delta = " << c.delta << '\n'
      << "n0 = " << c.n0 << '\n'
      << "workers = " << c.workers << '\n'
      << "output_dir = " << c.output_dir << '\n';
}

/// Manifest: the full configuration plus the command that used it.
inline void write_manifest(const std::string& path, const RunConfig& cfg, const std::string& command) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write manifest " + path);
  out << "# " << command << '\n';
  write_config(out, cfg);
  if (!out) throw std::ios_base::failure("write failed: " + path);
}

template <class T>
flow::TaylorConfig<T> taylor_config(const RunConfig& c) {
  auto t = flow::default_taylor_config<T>();
  if (c.taylor_order) t.order = c.taylor_order;
  if (!c.taylor_tol.empty()) t.abs_tol = t.rel_tol = numerics::from_string<T>(c.taylor_tol);
  return t;
}

template <class T>
kam::ContinuationConfig<T> continuation_config(const RunConfig& c) {
  using numerics::from_string;
  kam::ContinuationConfig<T> k;
  k.newton_tol = from_string<T>(c.newton_tol);
  k.tail_lo = from_string<T>(c.tail_lo);
  k.tail_hi = from_string<T>(c.tail_hi);
  k.L_max = c.L_max;
  k.L_min = c.L_min;
  k.eps_step_init = from_string<T>(c.eps_step_init);
  k.eps_step_min = from_string<T>(c.eps_step_min);
  k.eps_step_max = from_string<T>(c.eps_step_max);
  k.max_newton_iters = c.max_newton_iters;
  k.validate();
  return k;
}

template <class T>
model::ModelParams<T> model_params(const RunConfig& c, const T& eps, const T& ecc) {
  model::ModelParams<T> p{eps, ecc, numerics::from_string<T>(c.mu), model::variant_from_string(c.variant)};
  p.validate();
  return p;
}

}  // namespace spinorbit::cli
