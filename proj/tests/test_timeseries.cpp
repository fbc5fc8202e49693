#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "core/timeseries.hpp"
#include "support.hpp"

using namespace kardashev;
using ts::AnnualSeries;

namespace {

std::vector<double> vec(const AnnualSeries& s) { return {s.values().begin(), s.values().end()}; }

// Values on a 2^-16 grid, small enough that every difference and partial
// sum is exactly representable.
std::vector<double> dyadic_series(int n, std::uint64_t seed) {
  Rng rng = derive_stream(seed, 7);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& e : v) e = (static_cast<double>(uniform_index(rng, 1 << 24)) - (1 << 23)) / 65536.0;
  return v;
}

}  // namespace

TEST(AnnualSeries, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(AnnualSeries(2000, {}), ArgumentError);
  EXPECT_THROW(AnnualSeries(2000, {1.0, std::numeric_limits<double>::quiet_NaN()}),
               ArgumentError);
  EXPECT_THROW(AnnualSeries(2000, {std::numeric_limits<double>::infinity()}), ArgumentError);
}

TEST(AnnualSeries, YearsAreConsecutive) {
  const AnnualSeries s(1996, {0.8, 0.79, 0.78});
  EXPECT_EQ(s.end_year(), 1998);
  EXPECT_EQ(s.at_year(1997), 0.79);
  EXPECT_THROW(s.at_year(1999), ArgumentError);
}

TEST(Difference, Examples) {
  EXPECT_EQ(vec(ts::difference(AnnualSeries(2000, {5, 5, 5}), 1)), (std::vector<double>{0, 0}));
  const auto d = ts::difference(AnnualSeries(2000, {1, 2, 4}), 1);
  EXPECT_EQ(vec(d), (std::vector<double>{1, 2}));
  EXPECT_EQ(d.start_year(), 2001);
  const AnnualSeries s(2000, {3.5, -1.25, 8.0});
  EXPECT_EQ(ts::difference(s, 0), s);
}

TEST(Difference, OrderMustBeBelowLength) {
  const AnnualSeries s(2000, {1, 2, 3});
  EXPECT_THROW(ts::difference(s, 3), ArgumentError);
  EXPECT_THROW(ts::difference(s, -1), ArgumentError);
  EXPECT_NO_THROW(ts::difference(s, 2));
}

TEST(Difference, LinearRamp) {
  std::vector<double> ramp;
  for (int i = 0; i < 20; ++i) ramp.push_back(3.0 + 0.5 * i);
  const AnnualSeries s(1990, ramp);
  const auto d1 = ts::difference(s, 1);
  const auto d2 = ts::difference(s, 2);
  for (double v : d1.values()) EXPECT_EQ(v, 0.5);
  for (double v : d2.values()) EXPECT_EQ(v, 0.0);
}

TEST(Integrate, Examples) {
  const std::vector<double> head1{1.0};
  EXPECT_EQ(vec(ts::integrate(AnnualSeries(2001, {1, 2}), head1)),
            (std::vector<double>{1, 2, 4}));
  const std::vector<double> head5{5.0};
  const auto up = ts::integrate(AnnualSeries(2001, {0, 0}), head5);
  EXPECT_EQ(vec(up), (std::vector<double>{5, 5, 5}));
  EXPECT_EQ(up.start_year(), 2000);
}

TEST(Integrate, RejectsNonFiniteHead) {
  const std::vector<double> bad{std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(ts::integrate(AnnualSeries(2001, {1, 2}), bad), ArgumentError);
}

TEST(Integrate, ExactRoundTripLength50) {
  for (int d = 0; d <= 2; ++d) {
    const AnnualSeries s(1971, dyadic_series(50, 11 + d));
    const auto heads = ts::difference_heads(s, d);
    ASSERT_EQ(heads.size(), static_cast<std::size_t>(d));
    EXPECT_EQ(ts::integrate(ts::difference(s, d), heads), s) << "d=" << d;
  }
}

TEST(Integrate, ArbitraryDoublesRoundTripToRounding) {
  const AnnualSeries s(1950, kd_test::white_noise(50, 3));
  for (int d = 1; d <= 2; ++d) {
    const auto back = ts::integrate(ts::difference(s, d), ts::difference_heads(s, d));
    ASSERT_EQ(back.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(back[i], s[i], 1e-12);
  }
}

TEST(Integrate, DifferenceOfIntegrateIsIdentity) {
  const AnnualSeries diff(2001, dyadic_series(30, 5));
  const std::vector<double> heads{0.5, -2.25};
  EXPECT_EQ(ts::difference(ts::integrate(diff, heads), 2), diff);
}

TEST(Acf, LagZeroIsOne) {
  const AnnualSeries s(2000, {1.0, 3.0, 2.0, 5.0, 4.0});
  EXPECT_EQ(ts::acf(s, 0)[0], 1.0);
  EXPECT_EQ(ts::acf(s, 4)[0], 1.0);
}

TEST(Acf, HandComputedBiasedEstimator) {
  // Mean 2, deviations -1, 0, 1: c0 = 2, c1 = 0 + 0 = 0, c2 = -1.
  const AnnualSeries s(2000, {1.0, 2.0, 3.0});
  const auto r = ts::acf(s, 2);
  EXPECT_DOUBLE_EQ(r[1], 0.0);
  EXPECT_DOUBLE_EQ(r[2], -0.5);
}

TEST(Acf, Ar1Simulation) {
  const AnnualSeries s(1, kd_test::simulate_ar1(0.8, 5000, 1));
  EXPECT_NEAR(ts::acf(s, 1)[1], 0.8, 0.05);
}

TEST(Acf, WhiteNoise) {
  const AnnualSeries s(1, kd_test::white_noise(5000, 2));
  const auto r = ts::acf(s, 10);
  for (int k = 1; k <= 10; ++k) EXPECT_LT(std::abs(r[k]), 0.05) << k;
}

TEST(Acf, Errors) {
  EXPECT_THROW(ts::acf(AnnualSeries(2000, {2, 2, 2, 2}), 1), DomainError);
  EXPECT_THROW(ts::acf(AnnualSeries(2000, {1, 2, 3}), 3), ArgumentError);
  EXPECT_THROW(ts::pacf(AnnualSeries(2000, {2, 2, 2, 2}), 1), DomainError);
}

TEST(Pacf, Ar1Simulation) {
  const AnnualSeries s(1, kd_test::simulate_ar1(0.8, 5000, 1));
  const auto p = ts::pacf(s, 5);
  EXPECT_EQ(p[0], 1.0);
  EXPECT_NEAR(p[1], 0.8, 0.05);
  for (int k = 2; k <= 5; ++k) EXPECT_LT(std::abs(p[k]), 0.05) << k;
}

TEST(Pacf, FirstLagEqualsAcf) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const AnnualSeries s(1, kd_test::simulate_ar1(0.4, 200, seed));
    EXPECT_EQ(ts::pacf(s, 3)[1], ts::acf(s, 3)[1]);
  }
}

TEST(Pacf, WhiteNoise) {
  const AnnualSeries s(1, kd_test::white_noise(5000, 2));
  const auto p = ts::pacf(s, 10);
  for (int k = 1; k <= 10; ++k) EXPECT_LT(std::abs(p[k]), 0.05) << k;
}

TEST(Pacf, BoundedByOne) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const AnnualSeries s(1, kd_test::simulate_random_walk(40, seed));
    for (double v : ts::acf(s, 20)) EXPECT_LE(std::abs(v), 1.0);
    for (double v : ts::pacf(s, 20)) EXPECT_LE(std::abs(v), 1.0);
  }
}

TEST(YuleWalker, RecoversAr2Coefficients) {
  // Autocorrelations of AR(2) with phi = (0.5, 0.2).
  const double r1 = 0.5 / (1 - 0.2);
  const double r2 = 0.5 * r1 + 0.2;
  const std::vector<double> r{1.0, r1, r2};
  const auto phi = ts::yule_walker(r, 2);
  EXPECT_NEAR(phi[0], 0.5, 1e-12);
  EXPECT_NEAR(phi[1], 0.2, 1e-12);
}

TEST(SplitChronological, Examples) {
  const AnnualSeries s(2000, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  const auto [train, test] = ts::split_chronological(s, 0.2);
  EXPECT_EQ(train.size(), 8u);
  EXPECT_EQ(test.size(), 2u);
  EXPECT_EQ(test.start_year(), 2008);
  std::vector<double> joined = vec(train);
  for (double v : test.values()) joined.push_back(v);
  EXPECT_EQ(joined, vec(s));

  const auto [a, b] = ts::split_chronological(s, 0.5);
  EXPECT_EQ(a.size(), b.size());
}

TEST(SplitChronological, FractionOutsideUnitInterval) {
  const AnnualSeries s(2000, {0, 1, 2, 3});
  EXPECT_THROW(ts::split_chronological(s, 0.0), ArgumentError);
  EXPECT_THROW(ts::split_chronological(s, 1.0), ArgumentError);
  EXPECT_THROW(ts::split_chronological(s, -0.1), ArgumentError);
}
