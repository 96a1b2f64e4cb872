#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ecomplex/panel.hpp"
#include "ecomplex/rng.hpp"
#include "support/fixture.hpp"

using namespace ecomplex;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

CovariateTable big_countries(const std::vector<std::string>& names, int year,
                             double population = 5e6) {
  CovariateTable t;
  for (const auto& name : names) {
    CovariateRow row;
    row.country = name;
    row.year = year;
    row.population = population;
    row.gdp_pc = 10000.0;
    row.human_capital = 2.0;
    row.capital_stock_per_worker = 1e5;
    row.employment = population / 2;
    t.add(row);
  }
  return t;
}

FilterConfig open_filters() {
  // pass-through thresholds for tests that target a single rule
  FilterConfig cfg;
  cfg.min_population = 0;
  cfg.min_total_trade = 0;
  cfg.min_flow = 0;
  cfg.max_zero_country_share = 1.0;
  cfg.min_global_product_export = 0;
  cfg.max_zero_product_share = 1.0;
  cfg.reference_year = 2000;
  return cfg;
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("load_trade_csv parses well-formed rows") {
  const std::string path = write_temp("ec_trade_ok.csv",
                                      "year,country,product,value\n"
                                      "1987,KOR,7810,5.2e6\n"
                                      "1987,CHL,0571,1.1e6\n");
  LoadReport rep;
  const auto records = load_trade_csv(path, TradeSchema{}, &rep);
  REQUIRE(records.size() == 2);
  CHECK(records[0].year == 1987);
  CHECK(records[0].country == "KOR");
  CHECK(records[0].product == "7810");
  CHECK(records[0].value == doctest::Approx(5.2e6));
  CHECK(records[1].product == "0571");
  CHECK(rep.errors.empty());
}

TEST_CASE("load_trade_csv header-only file yields no records and no errors") {
  const std::string path = write_temp("ec_trade_empty.csv", "year,country,product,value\n");
  LoadReport rep;
  const auto records = load_trade_csv(path, TradeSchema{}, &rep);
  CHECK(records.empty());
  CHECK(rep.errors.empty());
}

TEST_CASE("load_trade_csv collects malformed rows instead of dropping them silently") {
  const std::string path = write_temp("ec_trade_bad.csv",
                                      "year,country,product,value\n"
                                      "1987,KOR,7810,abc\n"
                                      "1987,KOR,7811,100\n"
                                      "1987,KOR,7812,-5\n"
                                      "198x,KOR,7813,1\n");
  LoadReport rep;
  const auto records = load_trade_csv(path, TradeSchema{}, &rep);
  CHECK(records.size() == 1);
  REQUIRE(rep.errors.size() == 3);
  CHECK(rep.errors[0].line == 2);
  CHECK(rep.errors[0].message.find("non-numeric value") != std::string::npos);
}

TEST_CASE("load_trade_csv restores leading zeros of numeric product codes") {
  const std::string path = write_temp("ec_trade_pad.csv",
                                      "year,country,product,value\n"
                                      "1987,CHL,571,1.0\n"
                                      "1987,CHL,57123,1.0\n");
  LoadReport rep;
  const auto records = load_trade_csv(path, TradeSchema{}, &rep);
  REQUIRE(records.size() == 1);
  CHECK(records[0].product == "0571");
  CHECK(rep.errors.size() == 1);  // 5-character code is malformed
}

TEST_CASE("load_trade_csv errors on missing file and missing column") {
  CHECK_THROWS(load_trade_csv("/nonexistent/trade.csv", TradeSchema{}, nullptr));
  const std::string path = write_temp("ec_trade_cols.csv", "year,cty,product,value\n");
  CHECK_THROWS(load_trade_csv(path, TradeSchema{}, nullptr));
}

TEST_CASE("load_trade_csv honors the configured year window") {
  const std::string path = write_temp("ec_trade_window.csv",
                                      "year,country,product,value\n"
                                      "1950,KOR,7810,1\n"
                                      "1990,KOR,7810,1\n");
  TradeSchema schema;
  schema.year_min = 1960;
  schema.year_max = 2014;
  LoadReport rep;
  const auto records = load_trade_csv(path, schema, &rep);
  CHECK(records.size() == 1);
  CHECK(rep.rows_out_of_range == 1);
  CHECK(rep.errors.empty());
}

TEST_CASE("population filter removes small countries in the reference year") {
  std::vector<ExportRecord> records;
  for (const char* c : {"AAA", "BBB"})
    for (int y : {1999, 2000})
      records.push_back({y, c, "0001", 1e7});
  CovariateTable cov = big_countries({"AAA"}, 2000, 5e6);
  {
    CovariateRow small;
    small.country = "BBB";
    small.year = 2000;
    small.population = 1.0e6;  // below 1.2 million
    small.gdp_pc = 9000;
    cov.add(small);
  }
  FilterConfig cfg = open_filters();
  cfg.min_population = 1.2e6;
  FilterReport rep;
  const TradePanel panel = apply_filters(records, cov, cfg, &rep);
  CHECK(panel.country_index("AAA") >= 0);
  CHECK(panel.country_index("BBB") < 0);
  REQUIRE(rep.dropped_small_countries.size() == 1);
  CHECK(rep.dropped_small_countries[0] == "BBB");
  CHECK(panel.covariates.find("BBB", 2000) == nullptr);  // nowhere, covariates included
  CHECK(panel.covariates.find("AAA", 2000) != nullptr);
}

TEST_CASE("flow of exactly min_flow is retained (strictly-less-than cut)") {
  std::vector<ExportRecord> records = {{2000, "AAA", "0001", 5000.0},
                                       {2000, "AAA", "0002", 4999.99},
                                       {2000, "BBB", "0001", 2e6},
                                       {2000, "BBB", "0002", 2e6}};
  FilterConfig cfg = open_filters();
  cfg.min_flow = 5000.0;
  FilterReport rep;
  const TradePanel panel = apply_filters(records, big_countries({"AAA", "BBB"}, 2000), cfg, &rep);
  const int c = panel.country_index("AAA");
  const int p1 = panel.product_index("0001");
  const int p2 = panel.product_index("0002");
  REQUIRE(c >= 0);
  REQUIRE(p1 >= 0);
  REQUIRE(p2 >= 0);
  CHECK(panel.values[0](c, p1) == doctest::Approx(5000.0));
  CHECK(panel.values[0](c, p2) == 0.0);
  CHECK(rep.flows_zeroed == 1);
}

TEST_CASE("product below the global export threshold is removed") {
  // 10 countries x 10 products; product 0009 exports only 9e6 < 1e7
  std::vector<ExportRecord> records;
  std::vector<std::string> names;
  for (int c = 0; c < 10; ++c) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "C%02d", c);
    names.push_back(buf);
    for (int p = 0; p < 10; ++p) {
      char pbuf[8];
      std::snprintf(pbuf, sizeof(pbuf), "%04d", p);
      const double value = p == 9 ? 9e5 : 1e7;  // 10 x 9e5 = 9e6 total
      records.push_back({2000, buf, pbuf, value});
    }
  }
  FilterConfig cfg = open_filters();
  cfg.min_global_product_export = 1e7;
  FilterReport rep;
  const TradePanel panel = apply_filters(records, big_countries(names, 2000), cfg, &rep);
  CHECK(panel.product_index("0009") < 0);
  CHECK(panel.products.size() == 9);
  REQUIRE(rep.dropped_low_export_products.size() == 1);
  CHECK(rep.dropped_low_export_products[0] == "0009");
}

TEST_CASE("sparse product and sparse country filters use strict shares") {
  // product 0002 is zero for 4 of 5 countries (share 0.8): kept at 0.80,
  // dropped when the config is tightened below that share
  std::vector<ExportRecord> records;
  std::vector<std::string> names = {"C00", "C01", "C02", "C03", "C04"};
  for (const auto& c : names) {
    records.push_back({2000, c, "0001", 1e7});
    records.push_back({2000, c, "0003", 1e7});
  }
  records.push_back({2000, "C00", "0002", 1e7});
  FilterConfig cfg = open_filters();
  cfg.max_zero_country_share = 0.80;
  TradePanel panel = apply_filters(records, big_countries(names, 2000), cfg);
  CHECK(panel.product_index("0002") >= 0);
  cfg.max_zero_country_share = 0.75;
  panel = apply_filters(records, big_countries(names, 2000), cfg);
  CHECK(panel.product_index("0002") < 0);
}

TEST_CASE("filtering is idempotent") {
  const TradePanel panel = fixture::random_panel(7, 8, 12, {1999, 2000, 2001});
  CovariateTable cov = big_countries(panel.countries, 2000);
  std::vector<ExportRecord> records = to_records(panel);
  // plant sub-threshold flows and a tiny product
  for (auto& r : records)
    if (r.product == "0003") r.value *= 1e-9;
  FilterConfig cfg;
  cfg.reference_year = 2000;
  cfg.min_population = 1e6;
  cfg.min_total_trade = 1e6;
  cfg.min_flow = 5000;
  cfg.min_global_product_export = 1e5;

  TradePanel once = apply_filters(records, cov, cfg);
  TradePanel twice = apply_filters(once, cfg);
  CHECK(twice.countries == once.countries);
  CHECK(twice.products == once.products);
  CHECK(twice.years == once.years);
  for (std::size_t y = 0; y < once.values.size(); ++y)
    CHECK(twice.values[y].data() == once.values[y].data());
}

TEST_CASE("filtering never grows dimensions and input order does not matter") {
  TradePanel panel = fixture::random_panel(11, 6, 9, {2000});
  CovariateTable cov = big_countries(panel.countries, 2000);
  std::vector<ExportRecord> records = to_records(panel);
  FilterConfig cfg = open_filters();
  cfg.min_global_product_export = 3e6;

  const TradePanel a = apply_filters(records, cov, cfg);
  CHECK(a.countries.size() <= panel.countries.size());
  CHECK(a.products.size() <= panel.products.size());

  // permuted record order, same panel
  std::reverse(records.begin(), records.end());
  const TradePanel b = apply_filters(records, cov, cfg);
  CHECK(a.countries == b.countries);
  CHECK(a.products == b.products);
  for (std::size_t y = 0; y < a.values.size(); ++y)
    CHECK(a.values[y].data() == b.values[y].data());
}

TEST_CASE("apply_filters errors when everything is removed") {
  std::vector<ExportRecord> records = {{2000, "AAA", "0001", 100.0}};
  CovariateTable cov = big_countries({"AAA"}, 2000, 1e5);  // below any population cut
  FilterConfig cfg;
  cfg.reference_year = 2000;
  bool threw = false;
  try {
    apply_filters(records, cov, cfg);
  } catch (const std::runtime_error& e) {
    threw = std::string(e.what()).find("all countries filtered out") != std::string::npos;
  }
  CHECK(threw);
}

TEST_CASE("missing reference year is an error") {
  std::vector<ExportRecord> records = {{1990, "AAA", "0001", 1e9}};
  FilterConfig cfg;
  cfg.reference_year = 2008;
  CHECK_THROWS(apply_filters(records, big_countries({"AAA"}, 2008), cfg));
}

TEST_CASE("require_full_coverage drops countries with an empty year") {
  std::vector<ExportRecord> records = {{1999, "AAA", "0001", 1e8},
                                       {2000, "AAA", "0001", 1e8},
                                       {2000, "BBB", "0001", 1e8}};  // BBB missing in 1999
  FilterConfig cfg = open_filters();
  cfg.require_full_coverage = true;
  FilterReport rep;
  const TradePanel panel = apply_filters(records, big_countries({"AAA", "BBB"}, 2000), cfg, &rep);
  CHECK(panel.country_index("AAA") >= 0);
  CHECK(panel.country_index("BBB") < 0);
  CHECK(rep.dropped_no_coverage == std::vector<std::string>{"BBB"});
}

TEST_CASE("panel_summary counts match a brute-force scan") {
  const TradePanel panel = fixture::random_panel(23, 7, 11, {2001, 2002});
  const auto rows = panel_summary(panel);
  REQUIRE(rows.size() == 2);
  for (std::size_t y = 0; y < rows.size(); ++y) {
    std::size_t flows = 0;
    double total = 0.0;
    for (std::size_t c = 0; c < panel.countries.size(); ++c)
      for (std::size_t p = 0; p < panel.products.size(); ++p)
        if (panel.values[y](c, p) > 0) {
          ++flows;
          total += panel.values[y](c, p);
        }
    CHECK(rows[y].positive_flows == flows);
    CHECK(rows[y].total_trade == doctest::Approx(total));
    CHECK(rows[y].active_countries == panel.countries.size());
    CHECK(rows[y].active_products == panel.products.size());
  }
}

TEST_CASE("panel_summary rejects an empty panel") {
  TradePanel empty;
  CHECK_THROWS(panel_summary(empty));
}

TEST_CASE("duplicate rows aggregate by summation") {
  std::vector<ExportRecord> records = {{2000, "AAA", "0001", 1e6},
                                       {2000, "AAA", "0001", 2e6},
                                       {2000, "BBB", "0001", 5e6}};
  const TradePanel panel = apply_filters(records, big_countries({"AAA", "BBB"}, 2000),
                                         open_filters());
  CHECK(panel.values[0](panel.country_index("AAA"), 0) == doctest::Approx(3e6));
}

}  // TEST_SUITE
