#pragma once

#include <cstddef>
#include <vector>

namespace ecomplex::stats {

double mean(const double* x, std::size_t n);
// population (divide-by-N) standard deviation
double population_sd(const double* x, std::size_t n);
// sample (divide-by-N-1) standard deviation
double sample_sd(const double* x, std::size_t n);

// Pearson correlation; NaN when either variable has zero variance.
double pearson(const double* x, const double* y, std::size_t n);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double ibeta(double a, double b, double x);

// Two-sided p-value for a t statistic with df degrees of freedom.
double t_sf_two_sided(double t, double df);

// Upper tail P(F > f) for an F statistic with (d1, d2) degrees of freedom.
double f_sf(double f, double d1, double d2);

double norm_cdf(double z);

// Survival function Q(x) = P(K > x) of the asymptotic Kolmogorov
// distribution; series form switched near zero for accuracy.
double ks_asymptotic_sf(double x);

// Type-7 (linear interpolation) quantile of an ascending-sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double q);

// Significance stars matching the usual regression-table legend.
const char* stars(double p_value);

struct Histogram {
  double lo = 0.0, hi = 0.0;
  std::vector<std::size_t> counts;
  std::size_t n_total = 0;
  double bin_width() const {
    return counts.empty() ? 0.0 : (hi - lo) / static_cast<double>(counts.size());
  }
};

// Equal-width histogram over [lo, hi]; values outside are clamped into the
// end bins. When lo == hi the range is widened by one unit.
Histogram histogram(const std::vector<double>& values, double lo, double hi, std::size_t bins);
Histogram histogram(const std::vector<double>& values, std::size_t bins);

}  // namespace ecomplex::stats
