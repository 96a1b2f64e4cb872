#pragma once

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ecomplex/matrix.hpp"

namespace ecomplex {

struct DesignMatrix {
  std::vector<std::string> col_names;
  std::vector<bool> is_dummy;  // year dummies; excluded from VIF
  int intercept_col = -1;
  Matrix x;  // n x p
  std::vector<double> y;
  std::vector<std::pair<std::string, int>> row_ids;  // (country, year), optional

  void validate() const;  // unique names, finite cells, dummy row sums <= 1
};

struct Coefficient {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double t_stat = 0.0;
  double p_value = 0.0;
};

struct RegressionFit {
  std::vector<Coefficient> coefficients;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  double f_stat = 0.0;
  double f_p_value = 0.0;
  std::size_t n_obs = 0;
  std::size_t n_cols = 0;
  double rss = 0.0;
  double tss = 0.0;
  std::vector<double> residuals;
  // VIF per column; NaN for dummies/intercept, +inf flags perfect collinearity
  std::vector<double> vif;
};

// Least squares through Householder QR with classical standard errors.
// Throws on rank deficiency or when n_obs <= n_columns.
RegressionFit ols_fit(const DesignMatrix& design, bool compute_vif = true);

// VIF_j = 1 / (1 - R2_j) from regressing column j on the other non-dummy
// columns plus the dummies and intercept.
std::vector<double> vif(const DesignMatrix& design);

enum class GrowthMethod { Geometric, LogDifference };

// Annualized per-capita growth between two endpoint levels.
double annualized_growth(double gdp_start, double gdp_end, int span,
                         GrowthMethod method = GrowthMethod::Geometric);

// One merged (country, interval-start) observation. growth may be NaN for
// rows only used by the direction-level regressions.
struct Observation {
  std::string country;
  int year = 0;
  double omega = 0.0;  // mean relative density of entered products
  double pi = 0.0;     // mean relative complexity of entered products
  double growth = std::numeric_limits<double>::quiet_NaN();
  double eci = 0.0;
  double ln_gdp = 0.0;
  double ln_pop = 0.0;
  double human_capital = 0.0;
  double ln_capital_stock = 0.0;
};

// Five specifications explaining the relative density of new products with
// year fixed effects: {ECI, ECI2}, {lnGDP, lnGDP2}, {ECI, ECI2, HC},
// {ECI, ECI2, HC, lnStock}, {ECI, ECI2, HC, HC2}.
std::vector<RegressionFit> run_table1_suite(const std::vector<Observation>& obs);

struct GrowthSuiteResult {
  std::vector<RegressionFit> models;  // seven growth specifications
  RegressionFit interaction_model;    // omega, pi and their interaction
  double interaction_f_stat = 0.0;    // F test of the interaction term
  double interaction_f_p = 0.0;
  std::size_t n_obs = 0;
};

// Seven growth specifications with year fixed effects plus the interaction
// model and its nested F test.
GrowthSuiteResult run_table2_suite(const std::vector<Observation>& obs);

struct DeltaRobustnessRow {
  int delta = 0;
  std::size_t n_obs = 0;
  double alpha1_base = 0.0, se_base = 0.0, p_base = 0.0;        // omega-only model
  double alpha1_controls = 0.0, se_controls = 0.0, p_controls = 0.0;  // with controls
};

// Re-runs the omega-only and full-controls growth models for each interval
// length, with observations rebuilt per delta by the supplied callback.
std::vector<DeltaRobustnessRow> delta_robustness(
    const std::vector<int>& deltas,
    const std::function<std::vector<Observation>(int)>& build_observations);

struct CubicFit {
  std::array<double, 4> coefficients{};  // c0 + c1 x + c2 x^2 + c3 x^3
  bool interior = false;
  double argmin = 0.0;       // interior local minimum, or boundary argmin
  double fitted_min = 0.0;   // fitted value at argmin
  double x_lo = 0.0, x_hi = 0.0;
};

// Least-squares cubic with the location of its interior local minimum
// inside the observed x range; falls back to a boundary report when the
// fitted cubic has no interior minimum there.
CubicFit cubic_minimum_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ecomplex
