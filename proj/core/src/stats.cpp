#include "linenet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "linenet/geometry.hpp"

namespace linenet {

double mean(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double standard_error(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

double quantile_sorted(const std::vector<double>& x, double p) {
  if (x.empty()) throw Error("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw Error("quantile: p must lie in [0, 1]");
  const double h = p * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double quantile(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  return quantile_sorted(x, p);
}

LinearFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error("ols: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw Error("ols: need at least two points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error("ols: x has no spread");
  LinearFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return f;
}

std::string_view to_string(TailKind k) { return k == TailKind::weibull ? "weibull" : "pareto"; }

std::vector<TailPoint> survival_points(const std::vector<double>& sorted) {
  std::vector<TailPoint> out;
  out.reserve(sorted.size());
  const double n1 = static_cast<double>(sorted.size() + 1);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out.push_back({sorted[i], 1.0 - static_cast<double>(i + 1) / n1});
  }
  return out;
}

TailFit fit_tail(std::vector<double> values, TailKind kind, double q_lo, double q_hi) {
  if (!(0.0 < q_lo && q_lo < q_hi && q_hi < 1.0)) throw Error("fit_tail: need 0 < q_lo < q_hi < 1");
  std::sort(values.begin(), values.end());
  TailFit fit;
  fit.kind = kind;
  fit.q_lo = q_lo;
  fit.q_hi = q_hi;
  fit.values = std::move(values);
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& pt : survival_points(fit.values)) {
    const double q = 1.0 - pt.survival;
    if (q < q_lo || q > q_hi || !(pt.value > 0.0)) continue;
    xs.push_back(std::log(pt.value));
    ys.push_back(kind == TailKind::weibull ? std::log(-std::log(pt.survival)) : std::log(pt.survival));
  }
  fit.points_used = xs.size();
  if (xs.size() < 3 || xs.front() == xs.back()) return fit;
  const LinearFit lf = ols(xs, ys);
  fit.exponent = kind == TailKind::weibull ? lf.slope : -lf.slope;
  fit.std_error = lf.slope_se;
  fit.intercept = lf.intercept;
  fit.valid = true;
  return fit;
}

double running_mean_drift(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  const std::size_t n = x.size();
  const double mn = mean(x);
  if (mn == 0.0) return 0.0;
  const std::size_t k0 = (n + 1) / 2;
  double sum = 0.0;
  double worst = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    sum += x[k - 1];
    if (k >= k0) worst = std::max(worst, std::abs(sum / static_cast<double>(k) - mn) / std::abs(mn));
  }
  return worst;
}

HalfSplit half_split(const std::vector<double>& x) {
  HalfSplit h;
  const std::size_t half = x.size() / 2;
  if (half == 0) return h;
  const std::vector<double> a(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(half));
  const std::vector<double> b(x.begin() + static_cast<std::ptrdiff_t>(half), x.end());
  h.first = mean(a);
  h.second = mean(b);
  h.diff_se = std::sqrt(variance(a) / static_cast<double>(a.size()) + variance(b) / static_cast<double>(b.size()));
  const double diff = std::abs(h.first - h.second);
  if (h.diff_se > 0.0) {
    h.z = diff / h.diff_se;
  } else {
    h.z = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return h;
}

double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  if (x.empty()) throw Error("ks_statistic: empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_pvalue(double statistic, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace linenet
