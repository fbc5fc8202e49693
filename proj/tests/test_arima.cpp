#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "core/arima.hpp"
#include "core/error.hpp"
#include "core/ingest.hpp"
#include "support.hpp"

using namespace kardashev;
using arima::ArimaOrder;
using ts::AnnualSeries;

namespace {

// Grid used for the selection checks; matches the CLI default.
constexpr int kPMax = 1, kDMax = 2, kQMax = 1;

double half_width(const arima::ForecastPath& f, int h) {
  return (f.upper95[static_cast<std::size_t>(h)] - f.lower95[static_cast<std::size_t>(h)]) / 2.0;
}

}  // namespace

TEST(ArimaOrder, Validation) {
  EXPECT_THROW((ArimaOrder{0, 0, 0}.validate()), ArgumentError);
  EXPECT_THROW((ArimaOrder{6, 0, 0}.validate()), ArgumentError);
  EXPECT_THROW((ArimaOrder{0, 3, 0}.validate()), ArgumentError);
  EXPECT_THROW((ArimaOrder{-1, 1, 0}.validate()), ArgumentError);
  EXPECT_NO_THROW((ArimaOrder{0, 1, 0}.validate()));
  EXPECT_NO_THROW((ArimaOrder{5, 2, 5}.validate()));
}

TEST(Css, ZeroCoefficientsGiveSumOfSquares) {
  const AnnualSeries s(2000, {1.0, -2.0, 3.0, -2.0, 0.5, -0.5});
  const double ss = 1 + 4 + 9 + 4 + 0.25 + 0.25;
  EXPECT_DOUBLE_EQ(arima::css_objective({1, 0, 0}, {0.0, {0.0}, {}}, s), ss);
  EXPECT_DOUBLE_EQ(arima::css_objective({0, 0, 1}, {0.0, {}, {0.0}}, s), ss);
  EXPECT_DOUBLE_EQ(arima::css_objective({0, 0, 2}, {0.0, {}, {0.0, 0.0}}, s), ss);
}

TEST(Css, TrueParametersBeatPerturbed) {
  const AnnualSeries s(1, kd_test::simulate_ar1(0.7, 2000, 4));
  const double at_truth = arima::css_objective({1, 0, 0}, {0.0, {0.7}, {}}, s);
  const double perturbed = arima::css_objective({1, 0, 0}, {0.0, {1.0}, {}}, s);
  EXPECT_LT(at_truth, perturbed);
}

TEST(Css, ParameterShapeMustMatchOrder) {
  const AnnualSeries s(1, kd_test::white_noise(30, 1));
  EXPECT_THROW(arima::css_objective({1, 0, 0}, {0.0, {}, {}}, s), ArgumentError);
}

TEST(Fit, RecoversAr1) {
  const AnnualSeries s(1, kd_test::simulate_ar1(0.7, 2000, 1));
  const auto f = arima::fit(s, {1, 0, 0});
  ASSERT_EQ(f.ar.size(), 1u);
  EXPECT_GE(f.ar[0], 0.65);
  EXPECT_LE(f.ar[0], 0.75);
  EXPECT_NEAR(f.sigma2, 1.0, 0.1);
  EXPECT_TRUE(std::isfinite(f.aicc));
}

TEST(Fit, RecoversMa1) {
  const AnnualSeries s(1, kd_test::simulate_ma1(0.5, 2000, 1));
  const auto f = arima::fit(s, {0, 0, 1});
  ASSERT_EQ(f.ma.size(), 1u);
  EXPECT_GE(f.ma[0], 0.42);
  EXPECT_LE(f.ma[0], 0.58);
}

TEST(Fit, RandomWalkOrderHasNoArmaParameters) {
  const AnnualSeries s(1, kd_test::simulate_random_walk(60, 3));
  arima::FitOptions opts;
  opts.include_intercept = false;
  const auto f = arima::fit(s, {0, 1, 0}, opts);
  EXPECT_TRUE(f.ar.empty());
  EXPECT_TRUE(f.ma.empty());
  const auto w = ts::difference(s, 1);
  double ss = 0.0;
  for (double v : w.values()) ss += v * v;
  EXPECT_NEAR(f.sigma2, ss / static_cast<double>(w.size()), 1e-12);
  EXPECT_EQ(f.n_obs, 59);
}

TEST(Fit, DriftIsMeanOfDifferences) {
  const AnnualSeries s(1, kd_test::simulate_random_walk(60, 3));
  const auto f = arima::fit(s, {0, 1, 0});
  ASSERT_TRUE(f.has_intercept);
  const auto w = ts::difference(s, 1);
  const double mean = std::accumulate(w.values().begin(), w.values().end(), 0.0) / w.size();
  EXPECT_NEAR(f.intercept, mean, 1e-6);
  EXPECT_NEAR(f.sigma2, ts::sample_variance(w.values()), 1e-9);
}

TEST(Fit, TooShortForOrder) {
  const AnnualSeries s(1, kd_test::white_noise(11, 1));
  EXPECT_THROW(arima::fit(s, {1, 0, 1}), ArgumentError);
  EXPECT_NO_THROW(arima::fit(s, {1, 0, 0}));
}

TEST(Fit, ConstantSeriesIsDeterministic) {
  const AnnualSeries s(1, std::vector<double>(30, 0.5));
  EXPECT_THROW(arima::fit(s, {0, 1, 0}), DomainError);
}

TEST(Fit, LocationShiftEquivariance) {
  const auto v = kd_test::simulate_ar1(0.6, 400, 8);
  std::vector<double> shifted = v;
  for (auto& x : shifted) x += 10.0;
  const AnnualSeries a(1, v), b(1, shifted);

  const auto fa = arima::fit(a, {1, 0, 1});
  const auto fb = arima::fit(b, {1, 0, 1});
  EXPECT_NEAR(fa.ar[0], fb.ar[0], 1e-5);
  EXPECT_NEAR(fa.ma[0], fb.ma[0], 1e-5);
  EXPECT_NEAR(fa.sigma2, fb.sigma2, 1e-6 * fa.sigma2);
  EXPECT_NEAR(fb.intercept - fa.intercept, 10.0 * (1.0 - fa.ar[0]), 1e-4);

  const auto da = arima::fit(a, {1, 1, 0});
  const auto db = arima::fit(b, {1, 1, 0});
  EXPECT_NEAR(da.ar[0], db.ar[0], 1e-6);
  EXPECT_NEAR(da.intercept, db.intercept, 1e-6);
  EXPECT_NEAR(da.sigma2, db.sigma2, 1e-6 * da.sigma2);
}

TEST(Roots, PolynomialRoots) {
  // 1 - 0.5 z has root 2; 1 + 0.25 z has root -4.
  const auto ar = arima::polynomial_roots({0.5}, -1.0);
  ASSERT_EQ(ar.size(), 1u);
  EXPECT_NEAR(ar[0].real(), 2.0, 1e-12);
  EXPECT_NEAR(arima::min_root_modulus({0.25}, +1.0), 4.0, 1e-12);
  EXPECT_TRUE(std::isinf(arima::min_root_modulus({}, -1.0)));
  // (1 - 0.5z)(1 - 0.2z) = 1 - 0.7z + 0.1z^2: roots 2 and 5.
  EXPECT_NEAR(arima::min_root_modulus({0.7, -0.1}, -1.0), 2.0, 1e-10);
}

TEST(Roots, CommonFactorDetection) {
  EXPECT_TRUE(arima::near_common_root({0.5}, {-0.52}, 0.1));
  EXPECT_FALSE(arima::near_common_root({0.5}, {0.5}, 0.1));
  EXPECT_FALSE(arima::near_common_root({0.5}, {}, 0.1));
}

TEST(SelectDifferencing, VarianceRule) {
  const AnnualSeries rw(1, kd_test::simulate_random_walk(500, 1));
  EXPECT_EQ(arima::select_differencing(rw, 2, 0.5), 1);
  const AnnualSeries ar(1, kd_test::simulate_ar1(0.7, 2000, 1));
  EXPECT_EQ(arima::select_differencing(ar, 2, 0.5), 0);
  std::vector<double> quad;
  for (int i = 0; i < 40; ++i) quad.push_back(0.01 * i * i);
  EXPECT_EQ(arima::select_differencing(AnnualSeries(1, quad), 2, 0.5), 2);
}

TEST(SelectOrder, RandomWalk) {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const AnnualSeries s(1000, kd_test::simulate_random_walk(500, seed));
    const auto o = arima::select_order(s, kPMax, kDMax, kQMax);
    hits += o == ArimaOrder{0, 1, 0};
  }
  EXPECT_GE(hits, 18);
}

TEST(SelectOrder, StationaryAr1) {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const AnnualSeries s(1000, kd_test::simulate_ar1(0.7, 2000, seed));
    const auto o = arima::select_order(s, kPMax, kDMax, kQMax);
    hits += o == ArimaOrder{1, 0, 0};
  }
  EXPECT_GE(hits, 18);
}

TEST(SelectOrder, Deterministic) {
  const AnnualSeries s(1, kd_test::simulate_ar1(0.5, 300, 9));
  EXPECT_EQ(arima::select_order(s, 2, 2, 2), arima::select_order(s, 2, 2, 2));
}

TEST(SelectOrder, Errors) {
  EXPECT_THROW(arima::select_order(AnnualSeries(1, std::vector<double>(30, 1.0)), 1, 2, 1),
               DomainError);
  EXPECT_THROW(arima::select_order(AnnualSeries(1, kd_test::white_noise(8, 1)), 1, 2, 1),
               ArgumentError);
  EXPECT_THROW(arima::select_order(AnnualSeries(1, kd_test::white_noise(50, 1)), 6, 2, 1),
               ArgumentError);
}

TEST(Forecast, RandomWalkFlatWithSqrtWidth) {
  const AnnualSeries s(2000, kd_test::simulate_random_walk(40, 5));
  arima::FitOptions opts;
  opts.include_intercept = false;
  const auto f = arima::fit(s, {0, 1, 0}, opts);
  const auto path = arima::forecast(f, s, 10);
  EXPECT_EQ(path.start_year, 2040);
  for (int h = 0; h < 10; ++h) {
    EXPECT_EQ(path.point[static_cast<std::size_t>(h)], s[s.size() - 1]);
    EXPECT_NEAR(half_width(path, h), 1.96 * std::sqrt(f.sigma2 * (h + 1)), 1e-12);
    EXPECT_EQ(path.psi[static_cast<std::size_t>(h)], 1.0);
  }
}

TEST(Forecast, FirstStepHalfWidth) {
  const AnnualSeries s(1, kd_test::simulate_ar1(0.5, 200, 2));
  const auto f = arima::fit(s, {1, 0, 1});
  const auto path = arima::forecast(f, s, 3);
  EXPECT_NEAR(half_width(path, 0), 1.96 * std::sqrt(f.sigma2), 1e-12);
}

TEST(Forecast, StationaryConvergesToMean) {
  const AnnualSeries s(1, kd_test::simulate_ar1(0.7, 500, 3));
  const auto f = arima::fit(s, {1, 0, 0});
  const auto path = arima::forecast(f, s, 100);
  EXPECT_NEAR(path.point[99], f.intercept / (1.0 - f.ar[0]), 1e-9);
  for (int h = 1; h < 100; ++h) EXPECT_GE(half_width(path, h), half_width(path, h - 1));
}

TEST(Forecast, DifferencedModelWidensStrictly) {
  for (ArimaOrder o : {ArimaOrder{0, 1, 0}, ArimaOrder{1, 1, 0}, ArimaOrder{0, 1, 1}}) {
    const AnnualSeries s(1, kd_test::simulate_random_walk(80, 6));
    const auto f = arima::fit(s, o);
    const auto path = arima::forecast(f, s, 40);
    for (int h = 0; h < 40; ++h) {
      const auto i = static_cast<std::size_t>(h);
      EXPECT_LE(path.lower95[i], path.point[i]);
      EXPECT_LE(path.point[i], path.upper95[i]);
      if (h > 0) { EXPECT_GT(half_width(path, h), half_width(path, h - 1)); }
    }
  }
}

TEST(Forecast, HorizonMustBePositive) {
  const AnnualSeries s(1, kd_test::simulate_random_walk(40, 5));
  const auto f = arima::fit(s, {0, 1, 0});
  EXPECT_THROW(arima::forecast(f, s, 0), ArgumentError);
}

TEST(Forecast, SampleRatioDeclines) {
  const auto ratio = ingest::load_ratio(kd_test::sample("ratio.csv"));
  const auto& s = ratio.series();
  const auto order = arima::select_order(s, kPMax, kDMax, kQMax);
  const auto f = arima::fit(s, order);
  const auto path = arima::forecast(f, s, 2060 - s.end_year());
  EXPECT_EQ(path.start_year, 2021);
  EXPECT_LT(path.point.back(), path.point.front());
  EXPECT_NEAR(path.point.front(), 0.773, 0.005);
  EXPECT_NEAR(path.point.back(), 0.731, 0.01);
  for (int h = 1; h < path.horizon; ++h) EXPECT_GT(half_width(path, h), half_width(path, h - 1));
}
