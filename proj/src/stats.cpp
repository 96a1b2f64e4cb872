#include "ecomplex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ecomplex/kernels.hpp"

namespace ecomplex::stats {

double mean(const double* x, std::size_t n) {
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return kernels::sum(x, n) / static_cast<double>(n);
}

double population_sd(const double* x, std::size_t n) {
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  const double mu = mean(x, n);
  return std::sqrt(kernels::centered_sumsq(x, n, mu) / static_cast<double>(n));
}

double sample_sd(const double* x, std::size_t n) {
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mu = mean(x, n);
  return std::sqrt(kernels::centered_sumsq(x, n, mu) / static_cast<double>(n - 1));
}

double pearson(const double* x, const double* y, std::size_t n) {
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = mean(x, n);
  const double my = mean(y, n);
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) sxy += (x[i] - mx) * (y[i] - my);
  const double sxx = kernels::centered_sumsq(x, n, mx);
  const double syy = kernels::centered_sumsq(y, n, my);
  if (sxx <= 0.0 || syy <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

namespace {

// Lentz continued fraction for the incomplete beta.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double ibeta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ibeta: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double t_sf_two_sided(double t, double df) {
  if (df <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  return ibeta(df / 2.0, 0.5, df / (df + t * t));
}

double f_sf(double f, double d1, double d2) {
  if (d1 <= 0.0 || d2 <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (f <= 0.0) return 1.0;
  return ibeta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ks_asymptotic_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.18) {
    // dual theta series, accurate for small arguments
    const double y = std::exp(-1.23370055013616983 / (x * x));  // exp(-pi^2/(8 x^2))
    const double cdf = 2.50662827463100050 / x * (y + std::pow(y, 9) + std::pow(y, 25) + std::pow(y, 49));
    return 1.0 - cdf;
  }
  const double u = std::exp(-2.0 * x * x);
  double q = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::pow(u, j * j);
    q += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * q, 0.0, 1.0);
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const double h = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

const char* stars(double p_value) {
  if (p_value < 0.01) return "***";
  if (p_value < 0.05) return "**";
  if (p_value < 0.1) return "*";
  return "";
}

Histogram histogram(const std::vector<double>& values, double lo, double hi, std::size_t bins) {
  Histogram h;
  if (bins == 0) throw std::invalid_argument("histogram: bins must be positive");
  if (hi <= lo) hi = lo + 1.0;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : values) {
    auto b = static_cast<long long>((v - lo) / width);
    b = std::clamp<long long>(b, 0, static_cast<long long>(bins) - 1);
    ++h.counts[static_cast<std::size_t>(b)];
    ++h.n_total;
  }
  return h;
}

Histogram histogram(const std::vector<double>& values, std::size_t bins) {
  double lo = 0.0, hi = 0.0;
  if (!values.empty()) {
    lo = *std::min_element(values.begin(), values.end());
    hi = *std::max_element(values.begin(), values.end());
  }
  return histogram(values, lo, hi, bins);
}

}  // namespace ecomplex::stats
