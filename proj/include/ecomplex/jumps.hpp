#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "ecomplex/complexity.hpp"
#include "ecomplex/panel.hpp"
#include "ecomplex/product_space.hpp"
#include "ecomplex/relatedness.hpp"

namespace ecomplex {

struct JumpConfig {
  double rca_threshold = 1.0;
  int backward_window = 4;  // clean-history years strictly before the baseline
  int forward_window = 4;   // persistence years counted from the entry year
  int transition_gap = 2;   // delta between baseline y and entry y'
  void validate() const;
};

struct JumpEvent {
  std::string country;
  std::string product;
  int baseline_year = 0;  // y: last year known below the threshold
  int entry_year = 0;     // y' = y + transition_gap
  double omega_tilde = std::numeric_limits<double>::quiet_NaN();
  double pci_tilde = std::numeric_limits<double>::quiet_NaN();
  bool metrics_degenerate = false;  // zero-variance option set at the baseline
  bool metrics_missing = false;     // entity absent from the baseline-year universe
  int survival = 0;                 // consecutive years at/above threshold from y'
  bool censored = false;            // panel ended while still above threshold
};

struct JumpScan {
  std::vector<JumpEvent> events;
  std::vector<int> baselines_evaluated;
  std::string empty_reason;  // set when no baseline had enough coverage
};

// Detects threshold transitions between y and y' = y + gap that satisfy the
// backward clean-history and forward persistence windows. All advantage
// matrices must share one entity universe; baselines where any window year
// is missing are not evaluated. Events come out sorted by (baseline year,
// country, product) regardless of input order.
JumpScan detect_jumps(const std::vector<AdvantageMatrix>& advs, const JumpConfig& cfg,
                      const std::vector<int>& baseline_years);

// Consecutive years with RCA at/above the threshold starting at the entry
// year, with a censoring flag when the panel ends first.
std::pair<int, bool> survival_time(const JumpEvent& event, const std::vector<AdvantageMatrix>& advs,
                                   double rca_threshold);

struct SurvivalCorrelationRow {
  int ref_year = 0;
  std::size_t n_countries = 0;
  double r_eci = std::numeric_limits<double>::quiet_NaN();
  double r_gdp = std::numeric_limits<double>::quiet_NaN();
  double r_diversity = std::numeric_limits<double>::quiet_NaN();
  double r_option_density = std::numeric_limits<double>::quiet_NaN();
};

// Pearson correlation of per-country mean survival with the development
// measures taken at each reference year. Censored events are excluded
// unless include_censored is set. Throws when fewer than 3 countries have
// usable survival data.
std::vector<SurvivalCorrelationRow> survival_vs_development(
    const std::vector<JumpEvent>& events, const std::vector<ComplexityScores>& scores,
    const std::vector<AdvantageMatrix>& advs, const std::vector<DensityMatrix>& densities,
    const CovariateTable& covariates, const std::vector<int>& reference_years,
    bool include_censored = false);

struct AutocorrelationResult {
  int lag = 0;
  double mean_ac_omega = std::numeric_limits<double>::quiet_NaN();
  double t_omega = std::numeric_limits<double>::quiet_NaN();
  double p_omega = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_countries_omega = 0;
  double mean_ac_pi = std::numeric_limits<double>::quiet_NaN();
  double t_pi = std::numeric_limits<double>::quiet_NaN();
  double p_pi = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_countries_pi = 0;
  std::size_t skipped_short = 0;
  std::size_t skipped_zero_variance = 0;
};

// Per-country lag-k autocorrelation of the direction components over the
// interval grid (grid_step years apart), averaged across countries, with a
// t test of the mean against zero. Countries whose series are too short
// (length <= lag + 1) or constant are skipped and counted.
AutocorrelationResult direction_autocorrelation(const std::vector<DirectionVector>& vectors,
                                                int lag, int grid_step);

}  // namespace ecomplex
