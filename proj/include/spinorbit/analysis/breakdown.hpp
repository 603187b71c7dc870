#pragma once

// Summary of a continuation log: seminorm growth, regression trends, and
// whether the run shows loss of regularity with separated bundles.

#include "spinorbit/kam/continuation.hpp"
#include "spinorbit/numerics/linear_fit.hpp"
#include "spinorbit/numerics/precision.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spinorbit::analysis {

enum class BreakdownSignature { None, LossOfRegularity, BundleCollapse };

inline std::string to_string(BreakdownSignature s) {
  switch (s) {
    case BreakdownSignature::LossOfRegularity:
      return "loss-of-regularity";
    case BreakdownSignature::BundleCollapse:
      return "bundle-collapse";
    default:
      return "none";
  }
}

struct BreakdownOptions {
  double growth_threshold = 1e3;  // on H_8, last over baseline record
  double angle_floor = 0.99;      // on min |alpha| / pi
};

template <class T>
struct BreakdownReport {
  /// First record with eps > 0; the unperturbed torus is flat (H_r ~ 0).
  std::size_t baseline = 0;
  /// growth[i][r-1] = H_r(record i) / H_r(baseline)
  std::vector<std::array<T, kam::kSeminormOrders>> growth;
  /// slope of log10 H_r against eps from the baseline on
  std::array<T, kam::kSeminormOrders> log_h_slope;
  std::optional<T> width_slope;
  std::optional<T> angle_slope;
  T h8_growth;
  std::optional<T> min_angle;
  BreakdownSignature signature = BreakdownSignature::None;
};

namespace detail {
template <class T>
std::optional<T> slope_of(const std::vector<std::pair<T, T>>& pts) {
  if (pts.size() < 2) return std::nullopt;
  try {
    return numerics::linear_fit<T>(pts).slope;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}
}  // namespace detail

template <class T>
BreakdownReport<T> breakdown_report(const std::vector<kam::ContinuationRecord<T>>& log,
                                    const BreakdownOptions& opt = {}) {
  if (log.size() < 4) throw std::invalid_argument("breakdown_report: need at least 4 records");
  BreakdownReport<T> rep;
  while (rep.baseline + 1 < log.size() && !(log[rep.baseline].eps > 0)) ++rep.baseline;
  const auto& first = log[rep.baseline];
  for (const auto& rec : log) {
    std::array<T, kam::kSeminormOrders> g;
    for (int k = 0; k < kam::kSeminormOrders; ++k) g[k] = rec.H[k] / first.H[k];
    rep.growth.push_back(g);
  }
  for (int k = 0; k < kam::kSeminormOrders; ++k) {
    std::vector<std::pair<T, T>> pts;
    for (std::size_t i = rep.baseline; i < log.size(); ++i)
      if (const auto& rec = log[i]; rec.H[k] > 0) pts.emplace_back(rec.eps, T(numerics::log10_abs(rec.H[k])));
    rep.log_h_slope[k] = detail::slope_of(pts).value_or(T(0));
  }
  std::vector<std::pair<T, T>> wpts, apts;
  for (const auto& rec : log) {
    if (rec.width == rec.width) wpts.emplace_back(rec.eps, rec.width);
    if (rec.min_angle == rec.min_angle) {
      apts.emplace_back(rec.eps, rec.min_angle);
      if (!rep.min_angle || rec.min_angle < *rep.min_angle) rep.min_angle = rec.min_angle;
    }
  }
  rep.width_slope = detail::slope_of(wpts);
  rep.angle_slope = detail::slope_of(apts);
  rep.h8_growth = rep.growth.back()[kam::kSeminormOrders - 1];
  if (rep.h8_growth >= T(opt.growth_threshold)) {
    const bool separated = !rep.min_angle || *rep.min_angle >= T(opt.angle_floor);
    rep.signature = separated ? BreakdownSignature::LossOfRegularity : BreakdownSignature::BundleCollapse;
  }
  return rep;
}

template <class T>
void write_report(std::ostream& out, const std::vector<kam::ContinuationRecord<T>>& log,
                  const BreakdownReport<T>& rep) {
  using numerics::to_string;
  out << "# breakdown report\n";
  out << "records " << log.size() << '\n';
  out << "eps_range " << to_string(log.front().eps) << ' ' << to_string(log.back().eps) << '\n';
  out << "baseline_eps " << to_string(log[rep.baseline].eps) << '\n';
  out << "H8_growth " << to_string(rep.h8_growth) << '\n';
  for (int k = 0; k < kam::kSeminormOrders; ++k)
    out << "log10_H" << k + 1 << "_slope " << to_string(rep.log_h_slope[k]) << '\n';
  out << "width_slope " << (rep.width_slope ? to_string(*rep.width_slope) : std::string("nan")) << '\n';
  out << "angle_slope " << (rep.angle_slope ? to_string(*rep.angle_slope) : std::string("nan")) << '\n';
  out << "min_angle_over_pi " << (rep.min_angle ? to_string(*rep.min_angle) : std::string("nan")) << '\n';
  out << "signature " << to_string(rep.signature) << '\n';
  out << "# eps";
  for (int k = 1; k <= kam::kSeminormOrders; ++k) out << " G" << k;
  out << '\n';
  for (std::size_t i = 0; i < log.size(); ++i) {
    out << to_string(log[i].eps);
    for (const auto& g : rep.growth[i]) out << ' ' << to_string(g);
    out << '\n';
  }
}

}  // namespace spinorbit::analysis
