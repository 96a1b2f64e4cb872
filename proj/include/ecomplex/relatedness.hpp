#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ecomplex/complexity.hpp"
#include "ecomplex/product_space.hpp"
#include "ecomplex/stats.hpp"

namespace ecomplex {

// Products a country does not yet export (RCA below threshold) together
// with the density/complexity moments over that set. Moments use the
// population standard deviation.
struct OptionSet {
  std::string country;
  int year = 0;
  std::size_t country_idx = 0;
  std::vector<std::size_t> products;  // indices into the advantage universe
  double mean_omega = 0.0, sd_omega = 0.0;
  double mean_pci = 0.0, sd_pci = 0.0;
};

// Throws when the option set is empty (country exports everything).
OptionSet option_set(const AdvantageMatrix& adv, const DensityMatrix& density,
                     const std::vector<double>& pci, std::size_t country_idx);

struct RelativeMetric {
  double value = 0.0;
  bool degenerate = false;  // zero option-set variance mapped to 0
};

// z-score of the product's density against the option-set moments.
RelativeMetric relative_density(const DensityMatrix& density, const OptionSet& set,
                                std::size_t product_idx);
// z-score of the product's PCI against the option-set moments.
RelativeMetric relative_complexity(const std::vector<double>& pci, const OptionSet& set,
                                   std::size_t product_idx);

// Per-interval development direction: unweighted means of the relative
// metrics of the products entered in [y_start, y_end].
struct DirectionVector {
  std::string country;
  int y_start = 0;
  int y_end = 0;
  double omega_bar = 0.0;  // mean relative density of entered products
  double pci_bar = 0.0;    // mean relative complexity of entered products
  std::size_t n_jumps = 0;
};

// metrics: (relative density, relative complexity) per entered product,
// evaluated against the option set at the interval start. Throws when the
// list is empty (callers emit no vector in that case).
DirectionVector development_direction(const std::string& country, int y_start, int y_end,
                                      const std::vector<std::pair<double, double>>& metrics);

struct SlopePoint {
  int y_start = 0;
  double slope = 0.0;
  double std_error = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

struct DirectionStatistics {
  std::size_t n = 0;
  double share_omega_positive = 0.0;
  double mean_omega = 0.0;  // pooled over observations
  double mean_pi = 0.0;
  double mean_omega_by_year = 0.0;  // mean of per-interval means
  double mean_pi_by_year = 0.0;
  stats::Histogram omega_hist;
  stats::Histogram pi_hist;
  std::vector<SlopePoint> slope_by_interval;  // OLS of Pi on Omega per interval
  double pooled_slope = 0.0;
  double pooled_slope_se = 0.0;
  double pooled_r2 = 0.0;
};

DirectionStatistics direction_statistics(const std::vector<DirectionVector>& vectors,
                                         std::size_t hist_bins = 30);

}  // namespace ecomplex
