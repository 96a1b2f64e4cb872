#include "ecomplex/panel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "ecomplex/csv.hpp"

namespace ecomplex {

namespace {

bool parse_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  try {
    std::size_t pos = 0;
    *out = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_int(const std::string& s, int* out) {
  if (s.empty()) return false;
  try {
    std::size_t pos = 0;
    *out = std::stoi(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

// NA/empty markers used by the covariate files
bool is_missing(const std::string& s) {
  return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan" || s == ".";
}

}  // namespace

void CovariateTable::add(CovariateRow row) {
  const std::string k = key(row.country, row.year);
  auto it = index_.find(k);
  if (it != index_.end()) {
    rows_[it->second] = std::move(row);
    return;
  }
  index_.emplace(k, rows_.size());
  rows_.push_back(std::move(row));
}

const CovariateRow* CovariateTable::find(const std::string& country, int year) const {
  auto it = index_.find(key(country, year));
  return it == index_.end() ? nullptr : &rows_[it->second];
}

std::string CovariateTable::key(const std::string& country, int year) {
  return country + "|" + std::to_string(year);
}

void FilterConfig::validate() const {
  if (min_population < 0 || min_total_trade < 0 || min_flow < 0 || min_global_product_export < 0)
    throw std::invalid_argument("FilterConfig: thresholds must be non-negative");
  if (max_zero_country_share < 0 || max_zero_country_share > 1 || max_zero_product_share < 0 ||
      max_zero_product_share > 1)
    throw std::invalid_argument("FilterConfig: shares must lie in [0, 1]");
}

int TradePanel::year_index(int year) const {
  auto it = std::lower_bound(years.begin(), years.end(), year);
  if (it == years.end() || *it != year) return -1;
  return static_cast<int>(it - years.begin());
}

int TradePanel::country_index(const std::string& c) const {
  auto it = std::lower_bound(countries.begin(), countries.end(), c);
  if (it == countries.end() || *it != c) return -1;
  return static_cast<int>(it - countries.begin());
}

int TradePanel::product_index(const std::string& p) const {
  auto it = std::lower_bound(products.begin(), products.end(), p);
  if (it == products.end() || *it != p) return -1;
  return static_cast<int>(it - products.begin());
}

double TradePanel::country_total(std::size_t year_idx, std::size_t country_idx) const {
  const Matrix& m = values[year_idx];
  double total = 0.0;
  for (std::size_t p = 0; p < m.cols(); ++p) total += m(country_idx, p);
  return total;
}

double TradePanel::product_total(std::size_t year_idx, std::size_t product_idx) const {
  const Matrix& m = values[year_idx];
  double total = 0.0;
  for (std::size_t c = 0; c < m.rows(); ++c) total += m(c, product_idx);
  return total;
}

double TradePanel::global_total(std::size_t year_idx) const {
  const Matrix& m = values[year_idx];
  double total = 0.0;
  for (double v : m.data()) total += v;
  return total;
}

std::vector<ExportRecord> load_trade_csv(const std::string& path, const TradeSchema& schema,
                                         LoadReport* report) {
  const csv::Table table = csv::read_file(path);
  const std::size_t cy = table.column(schema.year_col);
  const std::size_t cc = table.column(schema.country_col);
  const std::size_t cp = table.column(schema.product_col);
  const std::size_t cv = table.column(schema.value_col);
  const std::size_t width = std::max({cy, cc, cp, cv}) + 1;

  std::vector<ExportRecord> records;
  records.reserve(table.rows.size());
  LoadReport local;
  LoadReport& rep = report ? *report : local;

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = r + 2;  // header is line 1
    if (row.size() < width) {
      rep.errors.push_back({line, "too few fields"});
      continue;
    }
    ExportRecord rec;
    if (!parse_int(row[cy], &rec.year)) {
      rep.errors.push_back({line, "non-numeric year '" + row[cy] + "'"});
      continue;
    }
    rec.country = row[cc];
    if (rec.country.empty()) {
      rep.errors.push_back({line, "empty country"});
      continue;
    }
    rec.product = row[cp];
    // numeric product codes lose leading zeros easily; restore them
    if (!rec.product.empty() && rec.product.size() < 4 &&
        rec.product.find_first_not_of("0123456789") == std::string::npos)
      rec.product.insert(0, 4 - rec.product.size(), '0');
    if (rec.product.size() != 4) {
      rep.errors.push_back({line, "product code '" + row[cp] + "' is not 4 characters"});
      continue;
    }
    if (!parse_double(row[cv], &rec.value)) {
      rep.errors.push_back({line, "non-numeric value '" + row[cv] + "'"});
      continue;
    }
    if (rec.value < 0) {
      rep.errors.push_back({line, "negative value"});
      continue;
    }
    if (rec.year < schema.year_min || rec.year > schema.year_max) {
      ++rep.rows_out_of_range;
      continue;
    }
    ++rep.rows_parsed;
    records.push_back(std::move(rec));
  }
  return records;
}

CovariateTable load_covariates_csv(const std::string& path, LoadReport* report) {
  const csv::Table table = csv::read_file(path);
  const std::size_t cc = table.column("country");
  const std::size_t cy = table.column("year");
  const std::size_t cpop = table.column("population");
  const std::size_t cgdp = table.column("gdp_pc");
  const std::size_t chc = table.column("human_capital");
  const std::size_t cstock = table.column("capital_stock_per_worker");
  const std::size_t cemp = table.column("employment");

  CovariateTable out;
  LoadReport local;
  LoadReport& rep = report ? *report : local;

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = r + 2;
    if (row.size() <= std::max({cc, cy, cpop, cgdp, chc, cstock, cemp})) {
      rep.errors.push_back({line, "too few fields"});
      continue;
    }
    CovariateRow cov;
    cov.country = row[cc];
    if (cov.country.empty() || !parse_int(row[cy], &cov.year)) {
      rep.errors.push_back({line, "bad country/year"});
      continue;
    }
    auto grab = [&](std::size_t col, double* dst) -> bool {
      if (is_missing(row[col])) return true;  // stays NaN, flagged by NaN
      return parse_double(row[col], dst);
    };
    if (!grab(cpop, &cov.population) || !grab(cgdp, &cov.gdp_pc) ||
        !grab(chc, &cov.human_capital) || !grab(cstock, &cov.capital_stock_per_worker) ||
        !grab(cemp, &cov.employment)) {
      rep.errors.push_back({line, "non-numeric covariate"});
      continue;
    }
    if (!std::isnan(cov.population) && cov.population <= 0) {
      rep.errors.push_back({line, "non-positive population"});
      continue;
    }
    if (!std::isnan(cov.gdp_pc) && cov.gdp_pc <= 0) {
      rep.errors.push_back({line, "non-positive gdp_pc"});
      continue;
    }
    ++rep.rows_parsed;
    out.add(std::move(cov));
  }
  return out;
}

namespace {

struct PanelBuilder {
  std::vector<std::string> countries, products;
  std::vector<int> years;
  std::vector<Matrix> values;
};

PanelBuilder densify(const std::vector<ExportRecord>& records) {
  std::set<std::string> cset, pset;
  std::set<int> yset;
  for (const auto& r : records) {
    cset.insert(r.country);
    pset.insert(r.product);
    yset.insert(r.year);
  }
  PanelBuilder b;
  b.countries.assign(cset.begin(), cset.end());
  b.products.assign(pset.begin(), pset.end());
  b.years.assign(yset.begin(), yset.end());

  std::map<std::string, std::size_t> cix, pix;
  for (std::size_t i = 0; i < b.countries.size(); ++i) cix[b.countries[i]] = i;
  for (std::size_t i = 0; i < b.products.size(); ++i) pix[b.products[i]] = i;
  std::map<int, std::size_t> yix;
  for (std::size_t i = 0; i < b.years.size(); ++i) yix[b.years[i]] = i;

  b.values.assign(b.years.size(), Matrix(b.countries.size(), b.products.size()));
  // duplicates aggregate by summation
  for (const auto& r : records)
    b.values[yix[r.year]](cix[r.country], pix[r.product]) += r.value;
  return b;
}

void drop_entities(PanelBuilder* b, const std::vector<bool>& keep_country,
                   const std::vector<bool>& keep_product) {
  std::vector<std::size_t> cmap, pmap;
  for (std::size_t i = 0; i < keep_country.size(); ++i)
    if (keep_country[i]) cmap.push_back(i);
  for (std::size_t i = 0; i < keep_product.size(); ++i)
    if (keep_product[i]) pmap.push_back(i);
  if (cmap.size() == keep_country.size() && pmap.size() == keep_product.size()) return;

  std::vector<std::string> nc(cmap.size()), np(pmap.size());
  for (std::size_t i = 0; i < cmap.size(); ++i) nc[i] = b->countries[cmap[i]];
  for (std::size_t i = 0; i < pmap.size(); ++i) np[i] = b->products[pmap[i]];

  std::vector<Matrix> nv;
  nv.reserve(b->values.size());
  for (const Matrix& m : b->values) {
    Matrix t(cmap.size(), pmap.size());
    for (std::size_t i = 0; i < cmap.size(); ++i)
      for (std::size_t j = 0; j < pmap.size(); ++j) t(i, j) = m(cmap[i], pmap[j]);
    nv.push_back(std::move(t));
  }
  b->countries = std::move(nc);
  b->products = std::move(np);
  b->values = std::move(nv);
}

TradePanel run_filters(PanelBuilder b, const CovariateTable& covariates, const FilterConfig& cfg,
                       FilterReport* report) {
  cfg.validate();
  FilterReport local;
  FilterReport& rep = report ? *report : local;

  if (b.years.empty()) throw std::runtime_error("apply_filters: no records");
  const auto ref_it = std::find(b.years.begin(), b.years.end(), cfg.reference_year);
  if (ref_it == b.years.end())
    throw std::runtime_error("apply_filters: reference year " +
                             std::to_string(cfg.reference_year) + " not present in the data");

  bool changed = true;
  while (changed) {
    changed = false;
    ++rep.passes;
    const std::size_t ref = static_cast<std::size_t>(
        std::find(b.years.begin(), b.years.end(), cfg.reference_year) - b.years.begin());
    const std::size_t nc = b.countries.size();
    const std::size_t np = b.products.size();
    if (nc == 0) throw std::runtime_error("apply_filters: all countries filtered out");
    if (np == 0) throw std::runtime_error("apply_filters: all products filtered out");

    // 1. country size: reference-year population, then total trade
    std::vector<bool> keep_c(nc, true);
    for (std::size_t c = 0; c < nc; ++c) {
      const CovariateRow* cov = covariates.find(b.countries[c], cfg.reference_year);
      if (cov == nullptr || std::isnan(cov->population)) {
        keep_c[c] = false;
        rep.dropped_no_population.push_back(b.countries[c]);
        continue;
      }
      if (cov->population < cfg.min_population) {
        keep_c[c] = false;
        rep.dropped_small_countries.push_back(b.countries[c]);
        continue;
      }
      const Matrix& m = b.values[ref];
      double total = 0.0;
      for (std::size_t p = 0; p < np; ++p) total += m(c, p);
      if (total < cfg.min_total_trade) {
        keep_c[c] = false;
        rep.dropped_small_countries.push_back(b.countries[c]);
      }
    }
    if (std::find(keep_c.begin(), keep_c.end(), false) != keep_c.end()) {
      drop_entities(&b, keep_c, std::vector<bool>(np, true));
      changed = true;
      continue;
    }

    // 2. minimum flow: strictly-below-threshold flows become zero
    for (Matrix& m : b.values)
      for (double& v : m.data())
        if (v > 0 && v < cfg.min_flow) {
          v = 0.0;
          ++rep.flows_zeroed;
        }

    // 3a. products exported by too few countries in the reference year
    std::vector<bool> keep_p(np, true);
    {
      const Matrix& m = b.values[ref];
      for (std::size_t p = 0; p < np; ++p) {
        std::size_t zero = 0;
        for (std::size_t c = 0; c < nc; ++c)
          if (m(c, p) <= 0) ++zero;
        const double share = static_cast<double>(zero) / static_cast<double>(nc);
        if (share > cfg.max_zero_country_share) {
          keep_p[p] = false;
          rep.dropped_sparse_products.push_back(b.products[p]);
        }
      }
      // 3b. products with too little global export in the reference year
      for (std::size_t p = 0; p < np; ++p) {
        if (!keep_p[p]) continue;
        double total = 0.0;
        for (std::size_t c = 0; c < nc; ++c) total += m(c, p);
        if (total < cfg.min_global_product_export) {
          keep_p[p] = false;
          rep.dropped_low_export_products.push_back(b.products[p]);
        }
      }
    }
    if (std::find(keep_p.begin(), keep_p.end(), false) != keep_p.end()) {
      drop_entities(&b, std::vector<bool>(nc, true), keep_p);
      changed = true;
      continue;
    }

    // 4. countries exporting almost nothing in the reference year
    std::vector<bool> keep_c2(nc, true);
    {
      const Matrix& m = b.values[ref];
      for (std::size_t c = 0; c < nc; ++c) {
        std::size_t zero = 0;
        for (std::size_t p = 0; p < np; ++p)
          if (m(c, p) <= 0) ++zero;
        const double share = static_cast<double>(zero) / static_cast<double>(np);
        if (share > cfg.max_zero_product_share) {
          keep_c2[c] = false;
          rep.dropped_sparse_countries.push_back(b.countries[c]);
        }
      }
    }
    if (std::find(keep_c2.begin(), keep_c2.end(), false) != keep_c2.end()) {
      drop_entities(&b, keep_c2, std::vector<bool>(np, true));
      changed = true;
      continue;
    }

    // 5. optional full-time-coverage restriction: a country must have at
    // least one positive flow in every panel year
    if (cfg.require_full_coverage) {
      std::vector<bool> keep_c3(nc, true);
      for (std::size_t c = 0; c < nc; ++c) {
        for (std::size_t y = 0; y < b.years.size(); ++y) {
          bool any = false;
          for (std::size_t p = 0; p < np; ++p)
            if (b.values[y](c, p) > 0) {
              any = true;
              break;
            }
          if (!any) {
            keep_c3[c] = false;
            rep.dropped_no_coverage.push_back(b.countries[c]);
            break;
          }
        }
      }
      if (std::find(keep_c3.begin(), keep_c3.end(), false) != keep_c3.end()) {
        drop_entities(&b, keep_c3, std::vector<bool>(np, true));
        changed = true;
        continue;
      }
    }
  }

  if (b.countries.empty()) throw std::runtime_error("apply_filters: all countries filtered out");
  if (b.products.empty()) throw std::runtime_error("apply_filters: all products filtered out");

  TradePanel panel;
  panel.countries = std::move(b.countries);
  panel.products = std::move(b.products);
  panel.years = std::move(b.years);
  panel.values = std::move(b.values);
  // filtered entities appear nowhere, covariate rows included
  std::set<std::string> kept(panel.countries.begin(), panel.countries.end());
  for (const CovariateRow& row : covariates.rows())
    if (kept.count(row.country)) panel.covariates.add(row);
  return panel;
}

}  // namespace

TradePanel apply_filters(const std::vector<ExportRecord>& records,
                         const CovariateTable& covariates, const FilterConfig& cfg,
                         FilterReport* report) {
  return run_filters(densify(records), covariates, cfg, report);
}

TradePanel apply_filters(const TradePanel& panel, const FilterConfig& cfg, FilterReport* report) {
  PanelBuilder b;
  b.countries = panel.countries;
  b.products = panel.products;
  b.years = panel.years;
  b.values = panel.values;
  return run_filters(std::move(b), panel.covariates, cfg, report);
}

std::vector<ExportRecord> to_records(const TradePanel& panel) {
  std::vector<ExportRecord> out;
  for (std::size_t y = 0; y < panel.years.size(); ++y) {
    const Matrix& m = panel.values[y];
    for (std::size_t c = 0; c < m.rows(); ++c)
      for (std::size_t p = 0; p < m.cols(); ++p)
        if (m(c, p) > 0)
          out.push_back({panel.years[y], panel.countries[c], panel.products[p], m(c, p)});
  }
  return out;
}

std::vector<SummaryRow> panel_summary(const TradePanel& panel) {
  if (panel.years.empty() || panel.countries.empty() || panel.products.empty())
    throw std::runtime_error("panel_summary: empty panel");
  std::vector<SummaryRow> rows;
  rows.reserve(panel.years.size());
  for (std::size_t y = 0; y < panel.years.size(); ++y) {
    SummaryRow row;
    row.year = panel.years[y];
    const Matrix& m = panel.values[y];
    std::vector<bool> pactive(m.cols(), false);
    for (std::size_t c = 0; c < m.rows(); ++c) {
      bool cactive = false;
      for (std::size_t p = 0; p < m.cols(); ++p) {
        const double v = m(c, p);
        if (v > 0) {
          cactive = true;
          pactive[p] = true;
          ++row.positive_flows;
          row.total_trade += v;
        }
      }
      if (cactive) ++row.active_countries;
    }
    for (bool a : pactive)
      if (a) ++row.active_products;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ecomplex
