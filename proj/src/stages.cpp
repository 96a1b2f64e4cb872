#include "ecomplex/stages.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ecomplex/stats.hpp"

namespace ecomplex {

RhoResult option_set_correlation(const std::vector<double>& omega_values,
                                 const std::vector<double>& pci_values) {
  if (omega_values.size() != pci_values.size())
    throw std::invalid_argument("option_set_correlation: size mismatch");
  if (omega_values.size() < 3)
    throw std::invalid_argument("option_set_correlation: need an option set of size >= 3");
  RhoResult out;
  const double r = stats::pearson(pci_values.data(), omega_values.data(), omega_values.size());
  if (std::isnan(r)) return out;  // constant variable, flagged undefined
  out.rho = r;
  out.defined = true;
  return out;
}

int classify_stage(double rho, double low_cut, double high_cut) {
  if (!(low_cut <= high_cut))
    throw std::invalid_argument("classify_stage: cuts must satisfy low <= high");
  if (rho <= low_cut) return 1;
  if (rho >= high_cut) return 3;
  return 2;
}

std::pair<double, double> tercile_cuts(std::vector<double> pooled_rho) {
  if (pooled_rho.size() < 3)
    throw std::invalid_argument("tercile_cuts: need at least 3 observations");
  std::sort(pooled_rho.begin(), pooled_rho.end());
  return {stats::quantile_sorted(pooled_rho, 1.0 / 3.0),
          stats::quantile_sorted(pooled_rho, 2.0 / 3.0)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  KsResult out;
  out.n1 = a.size();
  out.n2 = b.size();
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());

  // walk the merged order, comparing ECDFs after consuming ties
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    const double diff =
        std::fabs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2);
    if (diff > d) d = diff;
  }
  // one sample exhausted: the remaining steps only shrink toward equality at 1
  if (i < a.size()) {
    const double diff = std::fabs(static_cast<double>(i) / n1 - 1.0);
    if (diff > d) d = diff;
  } else if (j < b.size()) {
    const double diff = std::fabs(1.0 - static_cast<double>(j) / n2);
    if (diff > d) d = diff;
  }

  out.d = d;
  const double en = std::sqrt(n1 * n2 / (n1 + n2));
  out.p_value = stats::ks_asymptotic_sf(en * d);
  return out;
}

namespace {

double logistic(double x, double lo, double hi, double mid, double rate) {
  return lo + (hi - lo) / (1.0 + std::exp(-rate * (x - mid)));
}

double rss_of(const std::vector<double>& x, const std::vector<double>& y, const double p[4]) {
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - logistic(x[i], p[0], p[1], p[2], p[3]);
    rss += r * r;
  }
  return rss;
}

// Levenberg-Marquardt on the 4-parameter logistic with numerically
// differentiated Jacobian. Small and self-contained; sizes here are tiny.
SigmoidFit fit_logistic(const std::vector<double>& x, const std::vector<double>& y) {
  SigmoidFit fit;
  const std::size_t n = x.size();

  double p[4];
  p[0] = *std::min_element(y.begin(), y.end());
  p[1] = *std::max_element(y.begin(), y.end());
  {
    std::vector<double> sorted(x);
    std::sort(sorted.begin(), sorted.end());
    p[2] = stats::quantile_sorted(sorted, 0.5);
    const double spread = sorted.back() - sorted.front();
    p[3] = spread > 0 ? 4.0 / spread : 1.0;
  }
  if (p[1] - p[0] < 1e-12) {
    // flat response: degenerate but well-defined, slope zero
    fit.lo = p[0];
    fit.hi = p[1];
    fit.midpoint = p[2];
    fit.slope = 0.0;
    fit.ok = true;
    fit.rss = rss_of(x, y, p);
    return fit;
  }

  double lambda = 1e-3;
  double rss = rss_of(x, y, p);
  for (int it = 0; it < 200; ++it) {
    ++fit.iterations;
    // J^T J and J^T r with forward differences
    double jtj[4][4] = {};
    double jtr[4] = {};
    for (std::size_t i = 0; i < n; ++i) {
      const double f0 = logistic(x[i], p[0], p[1], p[2], p[3]);
      double grad[4];
      for (int k = 0; k < 4; ++k) {
        const double h = std::max(1e-7, 1e-7 * std::fabs(p[k]));
        double q[4] = {p[0], p[1], p[2], p[3]};
        q[k] += h;
        grad[k] = (logistic(x[i], q[0], q[1], q[2], q[3]) - f0) / h;
      }
      const double r = y[i] - f0;
      for (int a = 0; a < 4; ++a) {
        jtr[a] += grad[a] * r;
        for (int b = 0; b < 4; ++b) jtj[a][b] += grad[a] * grad[b];
      }
    }
    // solve (J^T J + lambda diag) step = J^T r by Gaussian elimination
    double m[4][5];
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) m[a][b] = jtj[a][b];
      m[a][a] += lambda * std::max(jtj[a][a], 1e-12);
      m[a][4] = jtr[a];
    }
    bool singular = false;
    for (int col = 0; col < 4; ++col) {
      int pivot = col;
      for (int row = col + 1; row < 4; ++row)
        if (std::fabs(m[row][col]) > std::fabs(m[pivot][col])) pivot = row;
      if (std::fabs(m[pivot][col]) < 1e-300) {
        singular = true;
        break;
      }
      std::swap(m[pivot], m[col]);
      for (int row = col + 1; row < 4; ++row) {
        const double factor = m[row][col] / m[col][col];
        for (int k = col; k < 5; ++k) m[row][k] -= factor * m[col][k];
      }
    }
    if (singular) break;
    double step[4];
    for (int row = 3; row >= 0; --row) {
      double s = m[row][4];
      for (int k = row + 1; k < 4; ++k) s -= m[row][k] * step[k];
      step[row] = s / m[row][row];
    }

    double trial[4] = {p[0] + step[0], p[1] + step[1], p[2] + step[2], p[3] + step[3]};
    const double trial_rss = rss_of(x, y, trial);
    if (std::isfinite(trial_rss) && trial_rss < rss) {
      const double gain = rss - trial_rss;
      std::copy(trial, trial + 4, p);
      rss = trial_rss;
      lambda = std::max(lambda * 0.5, 1e-12);
      if (gain < 1e-14 * (1.0 + rss)) {
        fit.ok = true;
        break;
      }
    } else {
      lambda *= 4.0;
      if (lambda > 1e12) break;
    }
  }
  fit.ok = fit.ok || fit.iterations >= 200;  // converged-by-exhaustion still reported
  if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2]) ||
      !std::isfinite(p[3]))
    fit.ok = false;
  // orient so the slope is positive and lo is the left asymptote
  if (p[3] < 0) {
    std::swap(p[0], p[1]);
    p[3] = -p[3];
  }
  fit.lo = p[0];
  fit.hi = p[1];
  fit.midpoint = p[2];
  fit.slope = p[3];
  fit.rss = rss;
  return fit;
}

}  // namespace

SigmoidResult eci_rho_sigmoid(const std::vector<double>& eci, const std::vector<double>& rho,
                              std::size_t n_bins) {
  if (eci.size() != rho.size()) throw std::invalid_argument("eci_rho_sigmoid: size mismatch");
  if (eci.size() < 10)
    throw std::runtime_error("eci_rho_sigmoid: need at least 10 observations");
  if (n_bins == 0) throw std::invalid_argument("eci_rho_sigmoid: need at least one bin");

  const double lo = *std::min_element(eci.begin(), eci.end());
  double hi = *std::max_element(eci.begin(), eci.end());
  if (hi <= lo) hi = lo + 1.0;

  SigmoidResult out;
  out.bins.resize(n_bins);
  const double width = (hi - lo) / static_cast<double>(n_bins);
  std::vector<double> sums(n_bins, 0.0);
  for (std::size_t b = 0; b < n_bins; ++b) {
    out.bins[b].lo = lo + static_cast<double>(b) * width;
    out.bins[b].hi = out.bins[b].lo + width;
  }
  for (std::size_t i = 0; i < eci.size(); ++i) {
    auto b = static_cast<long long>((eci[i] - lo) / width);
    b = std::clamp<long long>(b, 0, static_cast<long long>(n_bins) - 1);
    ++out.bins[static_cast<std::size_t>(b)].n;
    sums[static_cast<std::size_t>(b)] += rho[i];
  }
  for (std::size_t b = 0; b < n_bins; ++b)
    out.bins[b].mean = out.bins[b].n > 0
                           ? sums[b] / static_cast<double>(out.bins[b].n)
                           : std::numeric_limits<double>::quiet_NaN();

  out.fit = fit_logistic(eci, rho);
  return out;
}

}  // namespace ecomplex
