#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ecomplex {

struct StageProfile {
  std::string country;
  int year = 0;
  double rho = 0.0;
  int stage = 0;         // 1, 2 or 3
  bool defined = false;  // false when the correlation is undefined
};

struct RhoResult {
  double rho = 0.0;
  bool defined = false;
};

// Pearson correlation between the option set's relative complexity and
// relative density. Invariant under the z-scoring, so raw option-set
// density/PCI values are accepted. Requires at least 3 products; a
// constant variable yields an undefined (flagged) result.
RhoResult option_set_correlation(const std::vector<double>& omega_values,
                                 const std::vector<double>& pci_values);

// stage 1 when rho <= low, stage 2 strictly between, stage 3 when rho >= high
int classify_stage(double rho, double low_cut, double high_cut);

// Empirical terciles of the pooled rho distribution, the data-driven
// default for the stage cut points.
std::pair<double, double> tercile_cuts(std::vector<double> pooled_rho);

struct KsResult {
  double d = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0, n2 = 0;
};

// Two-sample Kolmogorov-Smirnov statistic (max absolute ECDF difference)
// with the asymptotic p-value. Throws on an empty sample.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct SigmoidFit {
  double lo = 0.0;        // lower asymptote
  double hi = 0.0;        // upper asymptote
  double midpoint = 0.0;  // x at the inflection
  double slope = 0.0;     // logistic rate
  bool ok = false;
  int iterations = 0;
  double rss = 0.0;
};

struct BinnedMean {
  double lo = 0.0, hi = 0.0;
  std::size_t n = 0;
  double mean = 0.0;  // NaN when empty
};

struct SigmoidResult {
  std::vector<BinnedMean> bins;
  SigmoidFit fit;
};

// Binned means of rho by ECI plus a four-parameter logistic fit
// (Levenberg-Marquardt). A degenerate fit is reported through fit.ok with
// the bins still populated. Requires at least 10 observations.
SigmoidResult eci_rho_sigmoid(const std::vector<double>& eci, const std::vector<double>& rho,
                              std::size_t n_bins = 20);

}  // namespace ecomplex
