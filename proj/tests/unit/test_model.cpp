#include "spinorbit/kam/torus.hpp"
#include "spinorbit/model/averages.hpp"
#include "spinorbit/model/kepler.hpp"
#include "spinorbit/model/params.hpp"
#include "spinorbit/model/vector_field.hpp"
#include "support.hpp"

using namespace spinorbit;
using namespace spinorbit::model;
using numerics::log10_abs;
using numerics::pi;
using spinorbit::testing::log_err;
using spinorbit::testing::use_digits;

namespace {

// Periodic trapezoid in the eccentric anomaly: (1/2pi) int_0^{2pi} g(u) du.
// Exponentially convergent for the analytic integrands used here.
template <class F>
Mp periodic_mean(F&& g, int n) {
  Mp acc(0);
  for (int j = 0; j < n; ++j) acc += g(2 * pi<Mp>() * j / n);
  return acc / n;
}

// (1/2pi) int (a/r)^6 dt with dt = (1 - e cos u) du
Mp lbar_quadrature(const Mp& e) {
  return periodic_mean([&](const Mp& u) { return pow(1 - e * cos(u), -5); }, 256);
}

// (1/2pi) int (a/r)^6 (df/dt) dt, df/dt = sqrt(1-e^2) (a/r)^2
Mp nbar_quadrature(const Mp& e) {
  return periodic_mean([&](const Mp& u) { return sqrt(1 - e * e) * pow(1 - e * cos(u), -7); }, 256);
}

}  // namespace

TEST(Kepler, TrivialCases) {
  use_digits(40);
  EXPECT_EQ(solve_kepler(Mp(1), Mp(0)), 1);
  EXPECT_EQ(solve_kepler(Mp(0), Mp(3) / 10), 0);
}

TEST(Kepler, MatchesBisectionAt70Digits) {
  use_digits(70);
  const Mp e = Mp(3) / 10, t(1);
  const Mp u = solve_kepler(t, e);
  EXPECT_LT(log10_abs(Mp(u - e * sin(u) - t)), -60);
  Mp lo = t - e, hi = t + e;
  for (int i = 0; i < 260; ++i) {
    const Mp mid = (lo + hi) / 2;
    (mid - e * sin(mid) - t > 0 ? hi : lo) = mid;
  }
  EXPECT_LT(log_err(u, lo), -60);
  EXPECT_LE(abs(u - t), e);
}

TEST(Kepler, RejectsBadEccentricity) {
  EXPECT_THROW(solve_kepler(1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(solve_kepler(1.0, -0.1), std::invalid_argument);
}

TEST(TrueAnomaly, SpecialValuesAndIdentities) {
  use_digits(40);
  for (Mp e : {Mp(0), Mp(1) / 5, Mp(7) / 10}) {
    auto a = true_anomaly_trig(Mp(0), e);
    EXPECT_LT(log_err(a.cos_f, Mp(1)), -38);
    EXPECT_LT(log10_abs(a.sin_f), -38);
    a = true_anomaly_trig(pi<Mp>(), e);
    EXPECT_LT(log_err(a.cos_f, Mp(-1)), -38);
    EXPECT_LT(log10_abs(a.sin_f), -38);
  }
  const auto z = true_anomaly_trig(Mp(1), Mp(0));
  EXPECT_LT(log_err(z.cos_f, Mp(cos(Mp(1)))), -38);
  EXPECT_LT(log_err(z.sin_f, Mp(sin(Mp(1)))), -38);
  // tan(f/2) = sqrt((1+e)/(1-e)) tan(u/2) and cos^2 + sin^2 = 1
  for (double ud : {0.3, 1.1, 2.5, -2.0}) {
    const Mp u(ud), e = Mp(1) / 4;
    const auto t = true_anomaly_trig(u, e);
    EXPECT_LT(log10_abs(Mp(t.cos_f * t.cos_f + t.sin_f * t.sin_f - 1)), -37);
    const Mp tan_half_f = t.sin_f / (1 + t.cos_f);
    EXPECT_LT(log_err(tan_half_f, Mp(sqrt((1 + e) / (1 - e)) * tan(u / 2))), -37);
  }
}

TEST(Averages, CircularOrbit) {
  use_digits(40);
  const auto a = lbar_nbar(Mp(0));
  EXPECT_EQ(a.Lbar, 1);
  EXPECT_EQ(a.Nbar, 1);
}

TEST(Averages, MatchQuadratureAt40Digits) {
  use_digits(40);
  for (Mp e : {Mp(1) / 5, Mp(1) / 20, Mp(35) / 100}) {
    const auto a = lbar_nbar(e);
    EXPECT_LT(log_err(a.Lbar, lbar_quadrature(e)), -30);
    EXPECT_LT(log_err(a.Nbar, nbar_quadrature(e)), -30);
    EXPECT_GE(a.Lbar, 1);
    EXPECT_GE(a.Nbar, 1);
  }
}

TEST(Averages, DerivativesMatchCentredDifferences) {
  use_digits(40);
  const Mp e = Mp(3) / 10, h = numerics::pow10<Mp>(-12);
  const auto a = lbar_nbar(e);
  const auto p = lbar_nbar(Mp(e + h)), m = lbar_nbar(Mp(e - h));
  EXPECT_LT(log_err(a.dLbar_de, Mp((p.Lbar - m.Lbar) / (2 * h))), -20);
  EXPECT_LT(log_err(a.dNbar_de, Mp((p.Nbar - m.Nbar) / (2 * h))), -20);
  const Mp mu = Mp(1) / 1000;
  const Mp dl = (conformal_factor(Mp(e + h), mu).lambda - conformal_factor(Mp(e - h), mu).lambda) / (2 * h);
  EXPECT_LT(log_err(conformal_factor_de(e, mu), dl), -20);
}

TEST(Averages, Omega2DriftNearFigureValue) {
  use_digits(30);
  const Mp e = averaged_drift_for(kam::omega2<Mp>());
  EXPECT_GT(e, Mp("0.250205"));
  EXPECT_LT(e, Mp("0.250209"));
  const auto a = lbar_nbar(e);
  EXPECT_LT(log_err(Mp(a.Nbar / a.Lbar), kam::omega2<Mp>()), -27);
  EXPECT_THROW(averaged_drift_for(Mp(1) / 2), std::invalid_argument);
}

TEST(ConformalFactor, ClosedFormCases) {
  use_digits(40);
  EXPECT_EQ(conformal_factor(Mp(1) / 5, Mp(0)).lambda, 1);
  const Mp mu = Mp(1) / 1000;
  EXPECT_LT(log_err(conformal_factor(Mp(0), mu).lambda, Mp(exp(-2 * pi<Mp>() * mu))), -39);
}

TEST(ConformalFactor, MatchesContractionIntegral) {
  use_digits(40);
  const Mp e = Mp(1) / 5, mu = Mp(1) / 1000;
  const Mp integral = 2 * pi<Mp>() * lbar_quadrature(e);
  EXPECT_LT(log_err(conformal_factor(e, mu).lambda, Mp(exp(-mu * integral))), -30);
}

TEST(ConformalFactor, AdditiveInMu) {
  use_digits(40);
  const Mp e = Mp(3) / 10, m1 = Mp(1) / 1000, m2 = Mp(3) / 10000;
  const Mp prod = conformal_factor(e, m1).lambda * conformal_factor(e, m2).lambda;
  EXPECT_LT(log_err(prod, conformal_factor(e, Mp(m1 + m2)).lambda), -38);
  EXPECT_GT(conformal_factor(e, m1).lambda, 0);
  EXPECT_LT(conformal_factor(e, m1).lambda, 1);
}

TEST(VectorField, IntegrableLimitIsCoordinateChangeOnly) {
  use_digits(30);
  ModelParams<Mp> p{Mp(0), Mp(1) / 5, Mp(0), Variant::NonAveraged};
  const Mp u(1), g = Mp(14) / 10;
  const auto f = vector_field<Mp>({Mp(1) / 10, g, Mp(0), Mp(1)}, u, p);
  EXPECT_LT(log_err(f[1], Mp(p.ecc * sin(u) * g / (1 - p.ecc * cos(u)))), -28);
  EXPECT_EQ(f[0], g);
}

TEST(VectorField, CircularOrbit) {
  use_digits(30);
  ModelParams<Mp> p{Mp(1) / 1000, Mp(0), Mp(1) / 1000, Variant::NonAveraged};
  const Mp s = Mp(3) / 5, c = Mp(4) / 5, g = Mp(13) / 10;
  const auto f = vector_field<Mp>({Mp(0), g, s, c}, Mp(7) / 10, p);
  EXPECT_LT(log_err(f[1], Mp(-p.eps * s - p.mu * (g - 1))), -28);
  EXPECT_LT(log_err(f[2], Mp((2 * g - 2) * c)), -28);
  EXPECT_LT(log_err(f[3], Mp(-(2 * g - 2) * s)), -28);
}

TEST(VectorField, SpotValueAgainstDirectFormulaAtDoubledPrecision) {
  // gamma' from the physical equation by the chain rule at 140 digits:
  // x(t) = beta(u), gamma = (r/a) xdot, so gamma' = (r/a)' xdot + (r/a)^2 xddot
  use_digits(140);
  const Mp beta = Mp(1) / 10, gamma = Mp(14) / 10, u = Mp(1) / 2;
  ModelParams<Mp> hp{Mp(1) / 1000, Mp(1) / 5, Mp(1) / 1000, Variant::NonAveraged};
  const Mp e = hp.ecc, r = 1 - e * cos(u);  // r/a
  const Mp xdot = gamma / r;
  const auto [cf, sf] = true_anomaly_trig(u, e);
  const Mp f = atan2(sf, cf);
  const Mp fdot = sqrt(1 - e * e) / (r * r);
  const Mp xddot = -hp.eps / (r * r * r) * sin(2 * beta - 2 * f) - hp.mu / pow(r, 6) * (xdot - fdot);
  const Mp rdot_u = e * sin(u);  // d(r/a)/du
  const Mp oracle = rdot_u * xdot + r * r * xddot;
  const Mp s_oracle = sin(2 * beta - 2 * f), c_oracle = cos(2 * beta - 2 * f);

  use_digits(70);
  ModelParams<Mp> p{Mp(1) / 1000, Mp(1) / 5, Mp(1) / 1000, Variant::NonAveraged};
  const Mp s(s_oracle), c(c_oracle);
  const auto out = vector_field<Mp>({Mp(1) / 10, Mp(14) / 10, s, c}, Mp(1) / 2, p);
  EXPECT_LT(log_err(out[1], Mp(oracle)), -65);
  EXPECT_EQ(out[0], Mp(14) / 10);
}

TEST(VectorField, TimeFieldAgreesWithAnomalyForm) {
  use_digits(30);
  ModelParams<Mp> p{Mp(1) / 1000, Mp(1) / 5, Mp(1) / 1000, Variant::NonAveraged};
  const Mp t = Mp(9) / 10, x = Mp(1) / 3, y = Mp(13) / 10;
  const Mp u = solve_kepler(t, p.ecc);
  const Mp r = 1 - p.ecc * cos(u);
  const auto [cf, sf] = true_anomaly_trig(u, p.ecc);
  const Mp f = atan2(sf, cf);
  const auto g = vector_field<Mp>({x, Mp(r * y), Mp(sin(2 * x - 2 * f)), Mp(cos(2 * x - 2 * f))}, u, p);
  const auto tf = time_field(x, y, t, p);
  // ydot = d/dt (gamma / r) = (gamma' - (r/a)' y) / r^2, since du/dt = 1/r
  const Mp ydot = (g[1] - p.ecc * sin(u) * y) / (r * r);
  EXPECT_LT(log_err(tf[1], ydot), -27);
}

TEST(ModelParams, Validation) {
  ModelParams<double> p{0.0, 0.2, 1e-3, Variant::NonAveraged};
  EXPECT_NO_THROW(p.validate());
  p.ecc = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.ecc = 0.2;
  p.mu = -1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_EQ(variant_from_string("averaged"), Variant::Averaged);
  EXPECT_THROW(variant_from_string("mean"), std::invalid_argument);
}
