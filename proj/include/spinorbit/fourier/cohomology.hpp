#pragma once

// Mode-wise solvers of the two difference equations on the circle:
//   contractive  B(theta) - lambda B(theta + omega) = -S(theta),  |lambda| != 1
//   neutral      W(theta) - W(theta + omega) = R(theta),          mean R = 0

#include "spinorbit/fourier/series.hpp"
#include "spinorbit/numerics/precision.hpp"

#include <cmath>
#include <stdexcept>

namespace spinorbit::fourier {

class CohomologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
FourierSeries<T> solve_cohomology_contractive(const FourierSeries<T>& S, const T& lambda, const T& omega) {
  using numerics::abs;
  using std::abs;
  const T floor = numerics::pow10<T>(-numerics::precision_digits() / 2);
  FourierSeries<T> B(S.size());
  const T d0 = 1 - lambda;
  if (abs(d0) < floor) throw CohomologyError("contractive cohomology: degenerate lambda");
  B.set_mean(-S.mean() / d0);
  for (long k = 1; k <= S.kmax(); ++k) {
    const Complex<T> d = Complex<T>(T(1)) - cis2pi(T(k * omega)) * lambda;
    if (abs(d) < floor) throw CohomologyError("contractive cohomology: degenerate lambda");
    B.set(k, -S[k] / d);
  }
  return B;
}

/// `mean_tol` bounds |R_0| relative to max(1, max_k |R_k|); by default
/// 10^(-working_digits + 10).
template <class T>
FourierSeries<T> solve_cohomology_neutral(const FourierSeries<T>& R, const T& omega, const T* mean_tol = nullptr) {
  using numerics::abs;
  using std::abs;
  T scale = 1;
  for (const auto& z : R.coeffs()) {
    const T m = abs(z);
    if (m > scale) scale = m;
  }
  const T tol = mean_tol ? *mean_tol : numerics::roundoff<T>(10);
  if (abs(R.mean()) > tol * scale) throw CohomologyError("neutral cohomology: right side has nonzero mean");
  const T floor = numerics::roundoff<T>(0);
  FourierSeries<T> W(R.size());
  for (long k = 1; k <= R.kmax(); ++k) {
    const Complex<T> d = Complex<T>(T(1)) - cis2pi(T(k * omega));
    if (abs(d) < floor) throw CohomologyError("neutral cohomology: divisor underflow");
    W.set(k, R[k] / d);
  }
  return W;
}

}  // namespace spinorbit::fourier
