#pragma once

// Products of Sobolev seminorms prod_j H(r_j)^{gamma_j} that do not change
// under u -> u(eta theta) / beta, which requires sum gamma = 0 and
// sum gamma r = 0.

#include "spinorbit/numerics/precision.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spinorbit::analysis {

template <class T>
class ObservableSpec {
 public:
  ObservableSpec(std::vector<T> gammas, std::vector<T> orders, std::string name = {})
      : gammas_(std::move(gammas)), orders_(std::move(orders)), name_(std::move(name)) {
    using std::abs;
    if (gammas_.empty() || gammas_.size() != orders_.size())
      throw std::invalid_argument("observable: exponent and order lists must be nonempty and of equal length");
    T sg = 0, sgr = 0, scale = 0;
    for (std::size_t i = 0; i < gammas_.size(); ++i) {
      sg += gammas_[i];
      sgr += gammas_[i] * orders_[i];
      scale += abs(gammas_[i]) * (1 + abs(orders_[i]));
    }
    const T tol = numerics::roundoff<T>(3) * scale;
    if (abs(sg) > tol) throw std::invalid_argument("observable: exponents must sum to zero");
    if (abs(sgr) > tol) throw std::invalid_argument("observable: exponent-weighted orders must sum to zero");
  }

  const std::vector<T>& gammas() const { return gammas_; }
  const std::vector<T>& orders() const { return orders_; }
  const std::string& name() const { return name_; }

 private:
  std::vector<T> gammas_;
  std::vector<T> orders_;
  std::string name_;
};

/// H maps an order r to the seminorm H_r; every order of the spec must be present.
template <class T>
T scale_invariant_observable(const std::vector<std::pair<T, T>>& H, const ObservableSpec<T>& spec) {
  using std::log;
  using std::exp;
  T log_value = 0;
  for (std::size_t i = 0; i < spec.gammas().size(); ++i) {
    const T& r = spec.orders()[i];
    const T* h = nullptr;
    for (const auto& [order, value] : H)
      if (order == r) h = &value;
    if (!h) throw std::invalid_argument("observable: missing seminorm of order " + numerics::to_string(r));
    if (!(*h > 0)) throw std::domain_error("observable: seminorms must be positive");
    log_value += spec.gammas()[i] * log(*h);
  }
  return exp(log_value);
}

/// The ratios plotted against the continuation parameter, written as the
/// unsimplified products in which they are labelled.
template <class T>
std::vector<ObservableSpec<T>> figure_observables() {
  auto spec = [](std::vector<std::pair<int, int>> terms, std::string name) {
    std::vector<T> g, r;
    for (auto [gamma, order] : terms) {
      g.emplace_back(gamma);
      r.emplace_back(order);
    }
    return ObservableSpec<T>(std::move(g), std::move(r), std::move(name));
  };
  return {
      spec({{1, 1}, {1, 4}, {-1, 2}, {-1, 3}}, "H1H4/(H2H3)"),
      spec({{1, 1}, {1, 2}, {2, 5}, {-2, 2}, {-1, 4}, {-1, 5}}, "H1H2H5^2/(H2^2H4H5)"),
      spec({{1, 1}, {1, 3}, {2, 4}, {2, 5}, {-2, 2}, {-2, 4}, {-2, 5}}, "H1H3H4^2H5^2/(H2^2H4^2H5^2)"),
      spec({{3, 1}, {2, 3}, {2, 4}, {-1, 1}, {-4, 2}, {-2, 4}}, "H1^3H3^2H4^2/(H1H2^4H4^2)"),
      spec({{4, 1}, {1, 3}, {-3, 1}, {-2, 2}}, "H1^4H3/(H1^3H2^2)"),
      spec({{5, 1}, {2, 4}, {-4, 1}, {-1, 2}, {-1, 3}, {-1, 4}}, "H1^5H4^2/(H1^4H2H3H4)"),
  };
}

}  // namespace spinorbit::analysis
