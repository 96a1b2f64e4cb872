#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "ecomplex/matrix.hpp"

namespace ecomplex {

struct ExportRecord {
  int year = 0;
  std::string country;  // ISO-3
  std::string product;  // 4-character SITC code
  double value = 0.0;   // USD
};

struct CovariateRow {
  std::string country;
  int year = 0;
  double population = std::numeric_limits<double>::quiet_NaN();
  double gdp_pc = std::numeric_limits<double>::quiet_NaN();
  double human_capital = std::numeric_limits<double>::quiet_NaN();
  double capital_stock_per_worker = std::numeric_limits<double>::quiet_NaN();
  double employment = std::numeric_limits<double>::quiet_NaN();
};

class CovariateTable {
 public:
  void add(CovariateRow row);
  const CovariateRow* find(const std::string& country, int year) const;
  const std::vector<CovariateRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<CovariateRow> rows_;
  std::unordered_map<std::string, std::size_t> index_;
  static std::string key(const std::string& country, int year);
};

struct FilterConfig {
  double min_population = 1.2e6;
  double min_total_trade = 1e9;
  int reference_year = 2008;
  double min_flow = 5000.0;
  double max_zero_country_share = 0.80;
  double min_global_product_export = 1e7;
  double max_zero_product_share = 0.95;
  // Restrict to countries with at least one positive flow in every panel
  // year (the full-time-coverage sample restriction).
  bool require_full_coverage = false;
  void validate() const;
};

struct TradePanel {
  std::vector<std::string> countries;  // sorted, unique
  std::vector<std::string> products;   // sorted, unique
  std::vector<int> years;              // sorted
  std::vector<Matrix> values;          // one countries x products matrix per year
  CovariateTable covariates;

  int year_index(int year) const;          // -1 when absent
  int country_index(const std::string&) const;
  int product_index(const std::string&) const;
  double country_total(std::size_t year_idx, std::size_t country_idx) const;
  double product_total(std::size_t year_idx, std::size_t product_idx) const;
  double global_total(std::size_t year_idx) const;
};

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

struct LoadReport {
  std::vector<RowError> errors;
  std::size_t rows_parsed = 0;
  std::size_t rows_out_of_range = 0;
};

struct TradeSchema {
  std::string year_col = "year";
  std::string country_col = "country";
  std::string product_col = "product";
  std::string value_col = "value";
  int year_min = 0;
  int year_max = 9999;
};

// One record per well-formed row; malformed rows land in the report.
// Throws on missing file or missing mapped column.
std::vector<ExportRecord> load_trade_csv(const std::string& path, const TradeSchema& schema,
                                         LoadReport* report = nullptr);

// Covariate CSV: country,year,population,gdp_pc,human_capital,
// capital_stock_per_worker,employment. Empty/NA fields stay NaN.
CovariateTable load_covariates_csv(const std::string& path, LoadReport* report = nullptr);

struct FilterReport {
  std::vector<std::string> dropped_no_population;   // no reference-year population
  std::vector<std::string> dropped_small_countries; // population or total-trade threshold
  std::vector<std::string> dropped_sparse_products;
  std::vector<std::string> dropped_low_export_products;
  std::vector<std::string> dropped_sparse_countries;
  std::vector<std::string> dropped_no_coverage;
  std::size_t flows_zeroed = 0;
  int passes = 0;
};

// Builds the panel and applies the cleaning filters, in order: country size
// (reference-year population, then total trade), the minimum-flow cut, the
// two product filters, the sparse-country filter and (optionally) the
// full-coverage restriction. The sequence is repeated until it stops
// removing entities, so the result is a fixed point of the filter.
TradePanel apply_filters(const std::vector<ExportRecord>& records, const CovariateTable& covariates,
                         const FilterConfig& cfg, FilterReport* report = nullptr);

// Re-filter an existing panel with the same rules (used by the idempotence
// checks and by re-runs over persisted panels).
TradePanel apply_filters(const TradePanel& panel, const FilterConfig& cfg,
                         FilterReport* report = nullptr);

std::vector<ExportRecord> to_records(const TradePanel& panel);

struct SummaryRow {
  int year = 0;
  std::size_t active_countries = 0;  // countries with a positive flow
  std::size_t active_products = 0;
  std::size_t positive_flows = 0;
  double total_trade = 0.0;
  // filled by downstream consumers with advantage data
  double mean_basket = std::numeric_limits<double>::quiet_NaN();
  double mean_option = std::numeric_limits<double>::quiet_NaN();
};

// Per-year structural counts; throws on an empty panel.
std::vector<SummaryRow> panel_summary(const TradePanel& panel);

}  // namespace ecomplex
