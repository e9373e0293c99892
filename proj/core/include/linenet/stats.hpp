#pragma once

#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

namespace linenet {

double mean(const std::vector<double>& x);
// Unbiased sample variance; 0 for fewer than two values.
double variance(const std::vector<double>& x);
double standard_error(const std::vector<double>& x);

// Linear interpolation between order statistics (type 7). x must be sorted.
double quantile_sorted(const std::vector<double>& x, double p);
double quantile(std::vector<double> x, double p);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  std::size_t n = 0;
};

// Ordinary least squares y = intercept + slope * x. Needs n >= 2 distinct x.
LinearFit ols(const std::vector<double>& x, const std::vector<double>& y);

enum class TailKind {
  weibull,  // log(-log S) against log t, slope is the exponent
  pareto,   // log S against log t, minus the slope is the exponent
};

std::string_view to_string(TailKind k);

struct TailPoint {
  double value;
  double survival;
};

struct TailFit {
  TailKind kind = TailKind::weibull;
  std::vector<double> values;  // sorted ascending
  double q_lo = 0.9;
  double q_hi = 0.995;
  double exponent = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
  std::size_t points_used = 0;
  bool valid = false;  // false when fewer than 3 usable points
};

// Empirical survival at plotting positions: value x_(i) gets S = 1 - i/(n+1).
std::vector<TailPoint> survival_points(const std::vector<double>& sorted);

// Fits over the points whose plotting position i/(n+1) lies in [q_lo, q_hi].
TailFit fit_tail(std::vector<double> values, TailKind kind, double q_lo = 0.9, double q_hi = 0.995);

// max over k in [ceil(n/2), n] of |m_k - m_n| / |m_n|, m_k the running mean.
double running_mean_drift(const std::vector<double>& x);

struct HalfSplit {
  double first = 0.0;
  double second = 0.0;
  double diff_se = 0.0;
  // |first - second| in units of diff_se; 0 when both halves are constant and equal.
  double z = 0.0;
};

HalfSplit half_split(const std::vector<double>& x);

// One-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf);
double ks_pvalue(double statistic, std::size_t n);

}  // namespace linenet
