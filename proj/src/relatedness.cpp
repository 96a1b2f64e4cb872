#include "ecomplex/relatedness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "ecomplex/econometrics.hpp"

namespace ecomplex {

OptionSet option_set(const AdvantageMatrix& adv, const DensityMatrix& density,
                     const std::vector<double>& pci, std::size_t country_idx) {
  if (country_idx >= adv.m.rows()) throw std::invalid_argument("option_set: bad country index");
  if (pci.size() != adv.m.cols())
    throw std::invalid_argument("option_set: pci size mismatch");

  OptionSet set;
  set.country = adv.countries[country_idx];
  set.year = adv.year;
  set.country_idx = country_idx;
  for (std::size_t p = 0; p < adv.m.cols(); ++p)
    if (adv.rca(country_idx, p) < adv.rca_threshold) set.products.push_back(p);
  if (set.products.empty())
    throw std::runtime_error("option_set: empty option set for '" + set.country +
                             "' (country exports everything)");

  std::vector<double> omegas, pcis;
  omegas.reserve(set.products.size());
  pcis.reserve(set.products.size());
  for (std::size_t p : set.products) {
    omegas.push_back(density.omega(country_idx, p));
    pcis.push_back(pci[p]);
  }
  set.mean_omega = stats::mean(omegas.data(), omegas.size());
  set.sd_omega = stats::population_sd(omegas.data(), omegas.size());
  set.mean_pci = stats::mean(pcis.data(), pcis.size());
  set.sd_pci = stats::population_sd(pcis.data(), pcis.size());
  return set;
}

namespace {

RelativeMetric zscore_against(double value, double mean, double sd) {
  RelativeMetric m;
  if (sd > 0) {
    m.value = (value - mean) / sd;
  } else {
    m.value = 0.0;
    m.degenerate = true;
  }
  return m;
}

}  // namespace

RelativeMetric relative_density(const DensityMatrix& density, const OptionSet& set,
                                std::size_t product_idx) {
  if (std::find(set.products.begin(), set.products.end(), product_idx) == set.products.end())
    throw std::invalid_argument("relative_density: product is not in the option set");
  return zscore_against(density.omega(set.country_idx, product_idx), set.mean_omega,
                        set.sd_omega);
}

RelativeMetric relative_complexity(const std::vector<double>& pci, const OptionSet& set,
                                   std::size_t product_idx) {
  if (std::find(set.products.begin(), set.products.end(), product_idx) == set.products.end())
    throw std::invalid_argument("relative_complexity: product is not in the option set");
  return zscore_against(pci[product_idx], set.mean_pci, set.sd_pci);
}

DirectionVector development_direction(const std::string& country, int y_start, int y_end,
                                      const std::vector<std::pair<double, double>>& metrics) {
  if (metrics.empty())
    throw std::invalid_argument("development_direction: no entered products in the interval");
  DirectionVector v;
  v.country = country;
  v.y_start = y_start;
  v.y_end = y_end;
  v.n_jumps = metrics.size();
  for (const auto& [omega_tilde, pci_tilde] : metrics) {
    v.omega_bar += omega_tilde;
    v.pci_bar += pci_tilde;
  }
  v.omega_bar /= static_cast<double>(metrics.size());
  v.pci_bar /= static_cast<double>(metrics.size());
  return v;
}

DirectionStatistics direction_statistics(const std::vector<DirectionVector>& vectors,
                                         std::size_t hist_bins) {
  if (vectors.empty()) throw std::invalid_argument("direction_statistics: no direction vectors");

  DirectionStatistics out;
  out.n = vectors.size();
  std::vector<double> omegas, pis;
  omegas.reserve(vectors.size());
  pis.reserve(vectors.size());
  std::size_t positive = 0;
  std::map<int, std::vector<std::size_t>> by_interval;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    omegas.push_back(vectors[i].omega_bar);
    pis.push_back(vectors[i].pci_bar);
    if (vectors[i].omega_bar > 0) ++positive;
    by_interval[vectors[i].y_start].push_back(i);
  }
  out.share_omega_positive = static_cast<double>(positive) / static_cast<double>(vectors.size());
  out.mean_omega = stats::mean(omegas.data(), omegas.size());
  out.mean_pi = stats::mean(pis.data(), pis.size());
  out.omega_hist = stats::histogram(omegas, hist_bins);
  out.pi_hist = stats::histogram(pis, hist_bins);

  // per-interval means averaged with equal year weights
  double sum_my = 0.0, sum_py = 0.0;
  for (const auto& [year, idx] : by_interval) {
    double mo = 0.0, mp = 0.0;
    for (std::size_t i : idx) {
      mo += vectors[i].omega_bar;
      mp += vectors[i].pci_bar;
    }
    sum_my += mo / static_cast<double>(idx.size());
    sum_py += mp / static_cast<double>(idx.size());
  }
  out.mean_omega_by_year = sum_my / static_cast<double>(by_interval.size());
  out.mean_pi_by_year = sum_py / static_cast<double>(by_interval.size());

  // slope of Pi on Omega, per interval and pooled
  auto fit_slope = [](const std::vector<double>& x, const std::vector<double>& y, SlopePoint* pt) {
    DesignMatrix d;
    d.col_names = {"intercept", "omega"};
    d.is_dummy = {false, false};
    d.intercept_col = 0;
    d.x = Matrix(x.size(), 2);
    for (std::size_t i = 0; i < x.size(); ++i) {
      d.x(i, 0) = 1.0;
      d.x(i, 1) = x[i];
    }
    d.y = y;
    const RegressionFit fit = ols_fit(d, /*compute_vif=*/false);
    pt->slope = fit.coefficients[1].estimate;
    pt->std_error = fit.coefficients[1].std_error;
    pt->r2 = fit.r2;
    pt->n = x.size();
  };

  for (const auto& [year, idx] : by_interval) {
    if (idx.size() < 3) continue;
    std::vector<double> x, y;
    x.reserve(idx.size());
    y.reserve(idx.size());
    for (std::size_t i : idx) {
      x.push_back(vectors[i].omega_bar);
      y.push_back(vectors[i].pci_bar);
    }
    const double sd = stats::population_sd(x.data(), x.size());
    if (!(sd > 0)) continue;
    SlopePoint pt;
    pt.y_start = year;
    fit_slope(x, y, &pt);
    out.slope_by_interval.push_back(pt);
  }

  if (vectors.size() >= 3 && stats::population_sd(omegas.data(), omegas.size()) > 0) {
    SlopePoint pooled;
    fit_slope(omegas, pis, &pooled);
    out.pooled_slope = pooled.slope;
    out.pooled_slope_se = pooled.std_error;
    out.pooled_r2 = pooled.r2;
  } else {
    out.pooled_slope = std::numeric_limits<double>::quiet_NaN();
    out.pooled_slope_se = std::numeric_limits<double>::quiet_NaN();
    out.pooled_r2 = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace ecomplex
