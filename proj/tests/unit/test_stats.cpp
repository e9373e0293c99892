#include <gtest/gtest.h>

#include <cmath>

#include "linenet/intervals.hpp"
#include "linenet/rng.hpp"
#include "linenet/stats.hpp"

using namespace linenet;

TEST(Stats, MomentsAndQuantiles) {
  const std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean(x), 5.0);
  EXPECT_DOUBLE_EQ(variance(x), 32.0 / 7.0);
  EXPECT_DOUBLE_EQ(standard_error(x), std::sqrt(32.0 / 7.0 / 8.0));
  EXPECT_DOUBLE_EQ(quantile(x, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(quantile(x, 1.0), 9.0);
  EXPECT_DOUBLE_EQ(quantile(x, 0.5), 4.5);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.25), 1.75);
  EXPECT_EQ(variance({3.0}), 0.0);
}

TEST(Stats, OrdinaryLeastSquares) {
  const auto f = ols({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.slope_se, 0.0, 1e-12);
  EXPECT_EQ(f.n, 4u);
  EXPECT_THROW(ols({1, 1}, {0, 1}), Error);
}

TEST(Stats, SurvivalPlottingPositions) {
  const auto pts = survival_points({1, 2, 3});
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_DOUBLE_EQ(pts[0].survival, 0.75);
  EXPECT_DOUBLE_EQ(pts[2].survival, 0.25);
}

TEST(Stats, WeibullFitRecoversExponentOnExactQuantiles) {
  // Values at the plotting-position quantiles of S(t) = exp(-t^k).
  for (double k : {1.0, 2.0, 3.5}) {
    const int n = 2000;
    std::vector<double> v;
    for (int i = 1; i <= n; ++i) v.push_back(std::pow(-std::log(1.0 - i / (n + 1.0)), 1.0 / k));
    const auto fit = fit_tail(v, TailKind::weibull);
    ASSERT_TRUE(fit.valid);
    EXPECT_NEAR(fit.exponent, k, 1e-9);
    EXPECT_GT(fit.points_used, 100u);
    // Recomputes identically from the stored values.
    const auto again = fit_tail(fit.values, TailKind::weibull, fit.q_lo, fit.q_hi);
    EXPECT_EQ(again.exponent, fit.exponent);
  }
}

TEST(Stats, ParetoFitRecoversExponentOnExactQuantiles) {
  const int n = 2000;
  std::vector<double> v;
  for (int i = 1; i <= n; ++i) v.push_back(std::pow(1.0 - i / (n + 1.0), -1.0 / 1.7));
  const auto fit = fit_tail(v, TailKind::pareto);
  EXPECT_NEAR(fit.exponent, 1.7, 1e-9);
}

TEST(Stats, WeibullFitOnRandomSample) {
  Stream rng(derive_key({8}));
  std::vector<double> v;
  for (int i = 0; i < 20000; ++i) v.push_back(std::sqrt(-std::log(rng.uniform_open_closed())));
  const auto fit = fit_tail(v, TailKind::weibull);
  EXPECT_NEAR(fit.exponent, 2.0, 4 * fit.std_error + 0.05);
}

TEST(Stats, TailFitNeedsPoints) {
  EXPECT_FALSE(fit_tail({1, 2, 3}, TailKind::weibull).valid);
  EXPECT_THROW(fit_tail({1, 2, 3}, TailKind::weibull, 0.9, 0.5), Error);
}

TEST(Stats, RunningMeanDrift) {
  EXPECT_EQ(running_mean_drift({2, 2, 2, 2}), 0.0);
  // m = 1, 1.5, 2, 2.5; last half k in {2,3,4}: max |m_k - 2.5| / 2.5 = 1 / 2.5.
  EXPECT_NEAR(running_mean_drift({1, 2, 3, 4}), 0.4, 1e-15);
}

TEST(Stats, HalfSplit) {
  const auto h = half_split({1, 1, 1, 1});
  EXPECT_EQ(h.z, 0.0);
  const auto g = half_split({0, 1, 0, 1, 5, 6, 5, 6});
  EXPECT_DOUBLE_EQ(g.first, 0.5);
  EXPECT_DOUBLE_EQ(g.second, 5.5);
  EXPECT_GT(g.z, 4.0);
}

TEST(Stats, KolmogorovSmirnov) {
  Stream rng(derive_key({9}));
  std::vector<double> u;
  for (int i = 0; i < 5000; ++i) u.push_back(rng.uniform());
  auto cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  EXPECT_GT(ks_pvalue(ks_statistic(u, cdf), u.size()), 0.001);
  for (auto& x : u) x = x * x;
  EXPECT_LT(ks_pvalue(ks_statistic(u, cdf), u.size()), 1e-6);
  EXPECT_DOUBLE_EQ(ks_statistic({0.5}, cdf), 0.5);
}

TEST(Intervals, MergeAndMeasure) {
  const auto m = merge_intervals({{3, 4}, {0, 1}, {1, 2}, {5, 5}, {0.5, 1.5}});
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0], (Interval{0, 2}));
  EXPECT_EQ(m[1], (Interval{3, 4}));
  EXPECT_DOUBLE_EQ(union_length({{0, 1}, {2, 3.5}}), 2.5);
  EXPECT_DOUBLE_EQ(union_length({{0, 2}, {1, 3}}), 3.0);
  EXPECT_EQ(union_length({}), 0.0);
}

TEST(Intervals, Subtract) {
  const auto r = subtract_intervals(0, 10, {{2, 3}, {-1, 1}, {9, 12}, {2.5, 4}});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0], (Interval{1, 2}));
  EXPECT_EQ(r[1], (Interval{4, 9}));
  EXPECT_TRUE(subtract_intervals(0, 1, {{-1, 2}}).empty());
}

TEST(Intervals, SubadditiveUnderSplitting) {
  Stream rng(derive_key({10}));
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Interval> a, b, all;
    for (int i = 0; i < 8; ++i) {
      const double lo = rng.uniform() * 10;
      const Interval iv{lo, lo + rng.uniform() * 2};
      (i % 2 ? a : b).push_back(iv);
      all.push_back(iv);
    }
    EXPECT_LE(union_length(all), union_length(a) + union_length(b) + 1e-12);
    EXPECT_GE(union_length(all), std::max(union_length(a), union_length(b)) - 1e-12);
  }
}
