#include "spinorbit/fourier/cohomology.hpp"
#include "spinorbit/fourier/norms.hpp"
#include "spinorbit/fourier/series.hpp"
#include "spinorbit/kam/torus.hpp"
#include "support.hpp"

#include <functional>

using namespace spinorbit;
using namespace spinorbit::fourier;
using numerics::Complex;
using numerics::log10_abs;
using numerics::pi;
using numerics::pow10;
using spinorbit::testing::log_err;
using spinorbit::testing::uniform;
using spinorbit::testing::use_digits;

namespace {

FourierSeries<Mp> random_series(std::size_t L, double decay = 0.0, bool zero_mean = false) {
  FourierSeries<Mp> f(L);
  if (!zero_mean) f.set_mean(Mp(uniform(-1, 1)));
  for (long k = 1; k <= f.kmax(); ++k) {
    const Mp s = exp(Mp(-decay * k));
    f.set(k, {Mp(uniform(-1, 1)) * s, Mp(uniform(-1, 1)) * s});
  }
  return f;
}

Mp max_diff(const std::vector<Mp>& a, const std::vector<Mp>& b) {
  Mp m(0);
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max<Mp>(m, abs(a[i] - b[i]));
  return m;
}

std::vector<Mp> sample(std::size_t L, const std::function<Mp(const Mp&)>& f) {
  std::vector<Mp> g(L);
  for (std::size_t j = 0; j < L; ++j) g[j] = f(Mp(static_cast<long>(j)) / static_cast<long>(L));
  return g;
}

}  // namespace

TEST(FourierSeries, DeltaHasFlatSpectrum) {
  use_digits(30);
  std::vector<Mp> d(16, Mp(0));
  d[0] = 1;
  const auto f = from_grid(d);
  for (long k = -7; k <= 7; ++k) EXPECT_LT(log_err(f[k].re, Mp(Mp(1) / 16)), -29);
}

TEST(FourierSeries, CosineHasHalfCoefficients) {
  use_digits(30);
  const auto f = from_grid(sample(32, [](const Mp& t) { return cos(2 * pi<Mp>() * t); }));
  EXPECT_LT(log_err(f[1].re, Mp(Mp(1) / 2)), -29);
  EXPECT_LT(log_err(f[-1].re, Mp(Mp(1) / 2)), -29);
  EXPECT_LT(log10_abs(f[1].im), -28);
  EXPECT_LT(log10_abs(numerics::abs(f[2])), -29);
}

TEST(FourierSeries, GridRoundTripAndHermitianSymmetry) {
  use_digits(40);
  std::vector<Mp> g(128);
  for (auto& x : g) x = Mp(uniform(-1, 1));
  const auto f = from_grid(g);
  for (long k = 1; k <= f.kmax(); ++k) {
    EXPECT_EQ(f[-k].re, f[k].re);
    EXPECT_EQ(f[-k].im, -f[k].im);
  }
  EXPECT_EQ(f.coeffs()[64].re, 0);  // k = -L/2 slot
  // The Nyquist mode is dropped, so compare against the band-limited samples.
  auto h = g;
  Mp nyq(0);
  for (std::size_t j = 0; j < h.size(); ++j) nyq += (j % 2 ? -h[j] : h[j]);
  nyq /= 128;
  for (std::size_t j = 0; j < h.size(); ++j) h[j] -= (j % 2 ? -nyq : nyq);
  EXPECT_LT(log10_abs(max_diff(f.to_grid(), h)), -(numerics::working_digits<Mp>() - 3));
  EXPECT_THROW(FourierSeries<Mp>(12), std::invalid_argument);
}

TEST(FourierSeries, PointEvaluationMatchesDirectSum) {
  use_digits(30);
  const auto f = random_series(32);
  const Mp theta = Mp(3) / 17;
  Mp direct = f[0].re;
  for (long k = 1; k <= f.kmax(); ++k) {
    const Mp a = 2 * pi<Mp>() * k * theta;
    direct += 2 * (f[k].re * cos(a) - f[k].im * sin(a));
  }
  EXPECT_LT(log_err(f(theta), direct), -26);
}

TEST(FourierSeries, ShiftCases) {
  use_digits(40);
  const auto c = from_grid(sample(16, [](const Mp& t) { return cos(2 * pi<Mp>() * t); }));
  const auto s = c.shift(Mp(1) / 2).to_grid();
  const auto expect = sample(16, [](const Mp& t) { return Mp(-cos(2 * pi<Mp>() * t)); });
  EXPECT_LT(log10_abs(max_diff(s, expect)), -37);
  const auto f = random_series(64);
  EXPECT_LT(log10_abs(max_diff(f.shift(Mp(0)).to_grid(), f.to_grid())), -37);
  const Mp w = kam::omega1<Mp>();
  EXPECT_LT(log10_abs(max_diff(f.shift(w).shift(w).to_grid(), f.shift(Mp(2 * w)).to_grid())), -36);
}

TEST(FourierSeries, DerivativeCommutesWithShift) {
  use_digits(40);
  const auto sn = from_grid(sample(32, [](const Mp& t) { return sin(2 * pi<Mp>() * t); }));
  const auto d = sn.derivative().to_grid();
  const auto expect = sample(32, [](const Mp& t) { return Mp(2 * pi<Mp>() * cos(2 * pi<Mp>() * t)); });
  EXPECT_LT(log10_abs(max_diff(d, expect)), -35);
  const auto f = random_series(64);
  const Mp w = kam::omega2<Mp>();
  EXPECT_LT(log10_abs(max_diff(f.derivative().shift(w).to_grid(), f.shift(w).derivative().to_grid())), -34);
}

TEST(FourierSeries, ResizePreservesModes) {
  use_digits(30);
  const auto f = random_series(16);
  const auto g = f.resized(64);
  for (long k = 0; k <= f.kmax(); ++k) EXPECT_EQ(g[k].re, f[k].re);
  EXPECT_EQ(g[20].re, 0);
  const auto h = g.resized(16);
  for (long k = 0; k <= f.kmax(); ++k) EXPECT_EQ(h[k].im, f[k].im);
}

TEST(Contractive, ConstantRightSide) {
  use_digits(30);
  FourierSeries<Mp> S(8);
  S.set_mean(Mp(1));
  const auto B = solve_cohomology_contractive(S, Mp(1) / 2, kam::omega1<Mp>());
  for (const auto& v : B.to_grid()) EXPECT_LT(log_err(v, Mp(-2)), -29);
}

TEST(Contractive, SingleMode) {
  use_digits(30);
  const Mp w = kam::omega1<Mp>();
  const auto S = from_grid(sample(16, [](const Mp& t) { return cos(2 * pi<Mp>() * t); }));
  const auto B = solve_cohomology_contractive(S, Mp(1) / 2, w);
  const Complex<Mp> expect = Complex<Mp>(Mp(-1) / 2) / (Complex<Mp>(Mp(1)) - cis2pi(w) * Mp(Mp(1) / 2));
  EXPECT_LT(log10_abs(numerics::abs(Complex<Mp>(B[1] - expect))), -29);
}

TEST(Contractive, MatchesGeometricSeries) {
  use_digits(50);
  const Mp lambda = Mp(9) / 10, w = kam::omega1<Mp>();
  for (int trial = 0; trial < 3; ++trial) {
    const auto S = random_series(32, 0.3);
    const auto B = solve_cohomology_contractive(S, lambda, w).to_grid();
    std::vector<Mp> acc(32, Mp(0));
    Mp lj(1);
    for (int j = 0; lj > pow10<Mp>(-42); ++j, lj *= lambda) {
      const auto s = S.shift(Mp(j * w)).to_grid();
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] -= lj * s[i];
    }
    EXPECT_LT(log10_abs(max_diff(B, acc)), -39);
  }
}

TEST(Contractive, GridResidualAndLinearity) {
  use_digits(40);
  const Mp lambda = Mp(3) / 10, w = kam::omega2<Mp>();
  const auto S = random_series(64), T2 = random_series(64);
  const auto B = solve_cohomology_contractive(S, lambda, w);
  const auto b = B.to_grid(), bw = B.shift(w).to_grid(), s = S.to_grid();
  Mp res(0);
  for (std::size_t i = 0; i < b.size(); ++i) res = std::max<Mp>(res, abs(b[i] - lambda * bw[i] + s[i]));
  EXPECT_LT(log10_abs(res), -(numerics::precision_digits() - 5));
  auto sum = S;
  sum += T2 * Mp(3);
  auto lin = solve_cohomology_contractive(T2, lambda, w) * Mp(3);
  lin += B;
  EXPECT_LT(log10_abs(max_diff(solve_cohomology_contractive(sum, lambda, w).to_grid(), lin.to_grid())), -36);
  EXPECT_THROW(solve_cohomology_contractive(S, Mp(1), w), CohomologyError);
}

TEST(Neutral, SingleModeAndZero) {
  use_digits(30);
  const Mp w = kam::omega1<Mp>();
  const auto R = from_grid(sample(16, [](const Mp& t) { return cos(2 * pi<Mp>() * t); }));
  const auto W = solve_cohomology_neutral(R, w);
  const Complex<Mp> expect = Complex<Mp>(Mp(1) / 2) / (Complex<Mp>(Mp(1)) - cis2pi(w));
  EXPECT_LT(log10_abs(numerics::abs(Complex<Mp>(W[1] - expect))), -28);
  const auto Z = solve_cohomology_neutral(FourierSeries<Mp>(16), w);
  for (const auto& v : Z.to_grid()) EXPECT_EQ(v, 0);
}

TEST(Neutral, SubstituteBackResidual) {
  use_digits(40);
  const Mp w = kam::omega1<Mp>();
  const auto R = random_series(256, 0.05, true);
  const auto W = solve_cohomology_neutral(R, w);
  const auto a = W.to_grid(), b = W.shift(w).to_grid(), r = R.to_grid();
  Mp res(0);
  for (std::size_t i = 0; i < a.size(); ++i) res = std::max<Mp>(res, abs(a[i] - b[i] - r[i]));
  EXPECT_LT(log10_abs(res), -(numerics::precision_digits() - 8));
  EXPECT_EQ(W.mean(), 0);
}

TEST(Neutral, RejectsNonzeroMeanAndIsLinear) {
  use_digits(30);
  const Mp w = kam::omega2<Mp>();
  auto R = random_series(32, 0.1, true);
  R.set_mean(Mp(1) / 1000);
  EXPECT_THROW(solve_cohomology_neutral(R, w), CohomologyError);
  const auto A = random_series(32, 0.1, true), B = random_series(32, 0.1, true);
  auto sum = A;
  sum += B;
  auto lin = solve_cohomology_neutral(A, w);
  lin += solve_cohomology_neutral(B, w);
  EXPECT_LT(log10_abs(max_diff(solve_cohomology_neutral(sum, w).to_grid(), lin.to_grid())), -26);
}

TEST(Seminorm, SimpleCases) {
  use_digits(30);
  FourierSeries<Mp> c(16);
  c.set_mean(Mp(5));
  EXPECT_EQ(sobolev_seminorm(c, Mp(1)), 0);
  EXPECT_LT(log_err(sobolev_seminorm(c, Mp(0)), Mp(5)), -29);
  const auto s = from_grid(sample(16, [](const Mp& t) { return sin(2 * pi<Mp>() * t); }));
  EXPECT_LT(log_err(sobolev_seminorm(s, Mp(1)), Mp(2 * pi<Mp>() / sqrt(Mp(2)))), -27);
  EXPECT_THROW(sobolev_seminorm(s, Mp(-1)), std::invalid_argument);
}

TEST(Seminorm, ParsevalAgainstAnalyticSecondDerivative) {
  use_digits(40);
  const int K = 20;
  std::vector<Mp> a(K + 1), b(K + 1);
  for (int k = 1; k <= K; ++k) {
    a[k] = Mp(uniform(-1, 1)) * exp(Mp(-k) / 4);
    b[k] = Mp(uniform(-1, 1)) * exp(Mp(-k) / 4);
  }
  auto f = [&](const Mp& t) {
    Mp v(0);
    for (int k = 1; k <= K; ++k) v += a[k] * cos(2 * pi<Mp>() * k * t) + b[k] * sin(2 * pi<Mp>() * k * t);
    return v;
  };
  auto f2 = [&](const Mp& t) {
    Mp v(0);
    for (int k = 1; k <= K; ++k) {
      const Mp w = 2 * pi<Mp>() * k;
      v -= w * w * (a[k] * cos(w * t) + b[k] * sin(w * t));
    }
    return v;
  };
  const auto series = from_grid(sample(64, f));
  const auto fine = sample(256, f2);
  Mp l2(0);
  for (const auto& v : fine) l2 += v * v;
  l2 /= 256;
  EXPECT_LT(std::abs(numerics::to_double(Mp(sobolev_seminorm(series, Mp(2)) / sqrt(l2) - 1))), 1e-30);
}

TEST(Seminorm, ScalingIsExactForIntegerRefinement) {
  // periodic rescaling g(theta) = f(eta theta) / beta multiplies H_r^2 by
  // eta^{2r} / beta^2
  use_digits(40);
  const auto f = random_series(32, 0.2);
  const Mp beta = Mp(3) / 2;
  for (long eta : {2L, 4L})
    for (int r : {1, 2, 3}) {
      const auto g = rescale(f, eta, beta);
      const Mp lhs = pow(sobolev_seminorm(g, Mp(r)), 2);
      const Mp rhs = pow(Mp(eta), 2 * r) / (beta * beta) * pow(sobolev_seminorm(f, Mp(r)), 2);
      EXPECT_LT(log10_abs(Mp(lhs / rhs - 1)), -36) << "eta=" << eta << " r=" << r;
    }
}

TEST(TailNorm, Cases) {
  use_digits(40);
  auto f = random_series(64);
  for (long k = 24; k <= f.kmax(); ++k) f.set(k, {Mp(0), Mp(0)});
  EXPECT_EQ(tail_fraction_norm(f), 0);
  FourierSeries<Mp> g(64);
  g.set(31, {pow10<Mp>(-30), Mp(0)});
  EXPECT_LT(log_err(tail_fraction_norm(g), pow10<Mp>(-30)), -68);
  const auto h = random_series(64);
  Mp m(0);
  for (long k = 24; k < 32; ++k) m = std::max<Mp>(m, numerics::abs(h[k]));
  EXPECT_EQ(tail_fraction_norm(h), m);
}

TEST(AnalyticityWidth, ExactExponentialDecay) {
  use_digits(40);
  const Mp rho = Mp(5) / 100;
  FourierSeries<Mp> f(256);
  for (long k = 1; k <= f.kmax(); ++k) f.set(k, {Mp(exp(-2 * pi<Mp>() * rho * k)), Mp(0)});
  EXPECT_LT(log_err(analyticity_width(f), rho), -10);
}

TEST(AnalyticityWidth, SingleHarmonicHasTooFewModes) {
  use_digits(40);
  const auto f = from_grid(sample(64, [](const Mp& t) { return cos(2 * pi<Mp>() * t); }));
  EXPECT_THROW(analyticity_width(f), std::domain_error);
}
