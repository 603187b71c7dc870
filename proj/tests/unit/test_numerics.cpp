#include "spinorbit/numerics/fft.hpp"
#include "spinorbit/numerics/kahan.hpp"
#include "spinorbit/numerics/kernels.hpp"
#include "spinorbit/numerics/linear_fit.hpp"
#include "spinorbit/numerics/parallel.hpp"
#include "spinorbit/numerics/precision.hpp"
#include "support.hpp"

#include <atomic>
#include <vector>

using namespace spinorbit;
using namespace spinorbit::numerics;
using spinorbit::testing::log_err;
using spinorbit::testing::uniform;
using spinorbit::testing::use_digits;

TEST(Precision, DecimalTextRoundTripIsLossless) {
  for (int digits : {20, 40, 70}) {
    use_digits(digits);
    for (int i = 0; i < 50; ++i) {
      Mp x = Mp(uniform(-1, 1)) / 3 * pow10<Mp>(static_cast<int>(uniform(-30, 30)));
      const Mp back = from_string<Mp>(to_string(x));
      EXPECT_EQ(back, x) << to_string(x);
    }
  }
  use_digits(17);
  for (int i = 0; i < 50; ++i) {
    const double x = uniform(-1e3, 1e3) / 7;
    EXPECT_EQ(from_string<double>(to_string(x)), x);
  }
}

TEST(Precision, TextUsesRequestedSignificantDigits) {
  use_digits(40);
  const std::string s = to_string(Mp(1) / 3);
  EXPECT_EQ(s.substr(0, 6), "3.3333");
  EXPECT_EQ(s.find('e') - 2, 39u);  // "3." then 39 more digits
}

TEST(Precision, RejectsGarbage) {
  use_digits(30);
  EXPECT_THROW(from_string<Mp>("1.5x"), std::invalid_argument);
  EXPECT_THROW(from_string<double>(""), std::invalid_argument);
  EXPECT_THROW(set_precision(3), std::invalid_argument);
}

TEST(Precision, MantissaIsWidestLosslessForRequest) {
  // d digits of text must round-trip, so the mantissa stays just below d digits
  for (int d : {20, 40, 70}) {
    use_digits(d);
    EXPECT_GE(working_digits<Mp>(), d - 2);
    EXPECT_LT(working_digits<Mp>(), d);
  }
}

TEST(Kahan, SmallExamples) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_EQ(kahan_sum<double>(v), 10.0);
  EXPECT_EQ(kahan_sum<double>(std::vector<double>{}), 0.0);
}

TEST(Kahan, ExactForRepresentableTerms) {
  // 1 + 2^-60 * 2^20 terms: naive summation in double loses all of them
  std::vector<double> v{1.0};
  for (int i = 0; i < (1 << 20); ++i) v.push_back(std::ldexp(1.0, -60));
  double naive = 0;
  for (double x : v) naive += x;
  EXPECT_EQ(naive, 1.0);
  EXPECT_EQ(kahan_sum<double>(v), 1.0 + std::ldexp(1.0, -40));
}

TEST(Kahan, MillionTermsAgreeWithDoubledPrecision) {
  std::vector<double> raw(1000000);
  for (auto& x : raw) x = uniform(-1, 1);
  use_digits(60);
  std::vector<Mp> hi(raw.begin(), raw.end());
  const Mp reference = kahan_sum<Mp>(hi);
  use_digits(30);
  std::vector<Mp> lo(raw.begin(), raw.end());
  const Mp sum = kahan_sum<Mp>(lo);
  use_digits(60);
  EXPECT_LT(log_err<Mp>(sum, reference) - log10_abs(reference), -28.0);
}

TEST(Fft, DeltaAndConstant) {
  use_digits(30);
  const std::size_t L = 16;
  std::vector<Complex<Mp>> d(L);
  d[0] = {Mp(1), Mp(0)};
  for (const auto& c : fft(d)) EXPECT_LT(log_err<Mp>(c.re, Mp(1) / L), -29);
  std::vector<Complex<Mp>> c(L, {Mp(3) / 7, Mp(0)});
  const auto f = fft(c);
  EXPECT_LT(log_err<Mp>(f[0].re, Mp(3) / 7), -29);
  for (std::size_t k = 1; k < L; ++k) EXPECT_LT(log10_abs(abs(f[k])), -29);
}

TEST(Fft, MatchesDirectDft) {
  use_digits(40);
  const std::size_t L = 64;
  std::vector<Complex<Mp>> x(L);
  for (auto& z : x) z = {Mp(uniform(-1, 1)), Mp(uniform(-1, 1))};
  const auto f = fft(x);
  const Mp two_pi = 2 * pi<Mp>();
  for (std::size_t k = 0; k < L; ++k) {
    Complex<Mp> acc;
    for (std::size_t j = 0; j < L; ++j) {
      const Mp ang = -two_pi * Mp(static_cast<long>(j * k % L)) / L;
      acc += x[j] * unit(ang);
    }
    acc /= Mp(static_cast<long>(L));
    EXPECT_LT(log10_abs(abs(Complex<Mp>(acc - f[k]))), -(working_digits<Mp>() - 3)) << "k=" << k;
  }
}

TEST(Fft, RoundTripDouble) {
  use_digits(17);
  for (std::size_t L = 2; L <= (1u << 16); L <<= 1) {
    std::vector<Complex<double>> x(L);
    for (auto& z : x) z = {uniform(-1, 1), uniform(-1, 1)};
    const auto back = fft(fft(x), true);
    double worst = 0;
    for (std::size_t j = 0; j < L; ++j) worst = std::max(worst, abs(Complex<double>(back[j] - x[j])));
    EXPECT_LT(worst, 1e-13) << "L=" << L;
  }
}

TEST(Fft, RoundTripMultiprecision) {
  use_digits(40);
  for (std::size_t L : {8u, 256u, 4096u}) {
    std::vector<Complex<Mp>> x(L);
    for (auto& z : x) z = {Mp(uniform(-1, 1)) / 3, Mp(uniform(-1, 1)) / 7};
    const auto back = fft(fft(x), true);
    for (std::size_t j = 0; j < L; ++j)
      ASSERT_LT(log10_abs(abs(Complex<Mp>(back[j] - x[j]))), -(working_digits<Mp>() - 3));
  }
}

TEST(Fft, RejectsNonPowerOfTwo) {
  std::vector<Complex<double>> x(12);
  EXPECT_THROW(fft(x), std::invalid_argument);
}

TEST(LinearFit, ExactLines) {
  use_digits(30);
  const std::vector<std::pair<Mp, Mp>> two{{Mp(0), Mp(1)}, {Mp(1), Mp(3)}};
  auto f = linear_fit<Mp>(two);
  EXPECT_EQ(f.slope, 2);
  EXPECT_EQ(f.intercept, 1);
  std::vector<std::pair<Mp, Mp>> line;
  for (int i = 0; i < 10; ++i) line.emplace_back(Mp(i), Mp(-i) / 2 + 4);
  f = linear_fit<Mp>(line);
  EXPECT_LT(log_err<Mp>(f.slope, Mp(-1) / 2), -28);
  EXPECT_LT(log_err<Mp>(f.intercept, Mp(4)), -28);
}

TEST(LinearFit, DegenerateAbscissae) {
  const std::vector<std::pair<double, double>> pts{{1, 2}, {1, 3}};
  EXPECT_THROW(linear_fit<double>(pts), std::invalid_argument);
  EXPECT_THROW(linear_fit<double>(std::vector<std::pair<double, double>>{{1, 2}}), std::invalid_argument);
}

TEST(LinearFit, NoisyLineMatchesNormalEquationsAtDoubledPrecision) {
  std::vector<std::pair<double, double>> raw;
  for (int i = 0; i < 100; ++i) raw.emplace_back(i * 0.37, 1.5 - 0.25 * i * 0.37 + uniform(-0.1, 0.1));
  use_digits(60);
  Mp n(100), sx(0), sy(0), sxx(0), sxy(0);
  for (auto [x, y] : raw) {
    sx += x;
    sy += y;
    sxx += Mp(x) * x;
    sxy += Mp(x) * y;
  }
  const Mp slope_ref = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const Mp icpt_ref = (sy - slope_ref * sx) / n;
  use_digits(30);
  std::vector<std::pair<Mp, Mp>> pts;
  for (auto [x, y] : raw) pts.emplace_back(Mp(x), Mp(y));
  const auto f = linear_fit<Mp>(pts);
  use_digits(60);
  EXPECT_LT(log_err<Mp>(f.slope, slope_ref), -27);
  EXPECT_LT(log_err<Mp>(f.intercept, icpt_ref), -27);

  // residuals are orthogonal to the centred abscissae
  use_digits(30);
  Mp mx(0);
  for (const auto& p : pts) mx += p.first;
  mx /= 100;
  Mp dot(0);
  for (const auto& [x, y] : pts) dot += (x - mx) * (y - (f.slope * x + f.intercept));
  EXPECT_LT(log10_abs(dot), -25);
}

TEST(Parallel, ResultsIndependentOfWorkerCount) {
  use_digits(30);
  auto run = [](int workers) {
    std::vector<Mp> out(1000);
    parallel_for(out.size(), workers, [&](std::size_t i) {
      Mp x = Mp(static_cast<long>(i)) / 7;
      for (int k = 0; k < 20; ++k) x = sin(x) + Mp(1) / (k + 1);
      out[i] = x;
    });
    return out;
  };
  const auto a = run(1);
  const auto b = run(4);
  EXPECT_EQ(a, b);
}

TEST(Parallel, CoversEveryIndexOnceAndRethrows) {
  std::vector<std::atomic<int>> hits(97);
  parallel_chunks(hits.size(), 5, [&](int, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) hits[i]++;
  });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

TEST(Kernels, ConvolutionMatchesNaiveLoop) {
  use_digits(40);
  std::vector<Mp> a(12), b(12);
  for (auto& x : a) x = Mp(uniform(-1, 1));
  for (auto& x : b) x = Mp(uniform(-1, 1));
  for (int k = 0; k < 12; ++k)
    for (int lo = 0; lo <= k; ++lo) {
      Mp fast(1), slow(1);
      conv_add(fast, a.data(), b.data(), lo, k);
      for (int j = lo; j <= k; ++j) slow += a[j] * b[k - j];
      EXPECT_LT(log_err<Mp>(fast, slow), -38);
    }
}
