#pragma once

// Converged tori shared by the kam, bundles and analysis tests. Built in
// double, where a short continuation takes well under a second.

#include "spinorbit/kam/continuation.hpp"
#include "support.hpp"

#include <map>
#include <string>
#include <utility>

namespace spinorbit::testing {

inline kam::ContinuationConfig<double> double_config() {
  kam::ContinuationConfig<double> c;
  c.newton_tol = 1e-12;
  c.tail_hi = 1e-12;
  c.tail_lo = 1e-20;
  c.L_min = 32;
  c.eps_step_init = 5e-4;
  c.eps_step_max = 1e-3;
  return c;
}

/// Converged torus of the given family at eps, mu = 1e-3 unless stated.
inline const kam::TorusSolution<double>& converged_torus(const std::string& omega, double eps,
                                                         model::Variant v = model::Variant::NonAveraged,
                                                         double mu = 1e-3) {
  static std::map<std::string, kam::TorusSolution<double>> cache;
  const std::string key = omega + "/" + std::to_string(eps) + "/" + std::string(model::to_string(v)) + "/" +
                          std::to_string(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  use_digits(17);
  const model::ModelParams<double> p{0.0, 0.0, mu, v};
  const auto start = kam::integrable_torus(kam::frequency_from_selector<double>(omega), p, 32);
  auto out = kam::continue_family(start, eps, double_config(), flow::default_taylor_config<double>());
  if (out.status != kam::ContinuationStatus::Reached) throw std::runtime_error("fixture continuation stalled");
  return cache.emplace(key, std::move(out.last)).first->second;
}

}  // namespace spinorbit::testing
