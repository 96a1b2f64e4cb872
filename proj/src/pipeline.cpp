#include "ecomplex/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

#include "ecomplex/csv.hpp"
#include "ecomplex/parallel.hpp"
#include "ecomplex/product_space.hpp"
#include "ecomplex/relatedness.hpp"
#include "ecomplex/sha256.hpp"
#include "ecomplex/stages.hpp"
#include "ecomplex/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ecomplex {

namespace {

// floating-point outputs carry 12 significant digits everywhere
double r12(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(csv::fmt(v));
}

json jnum(double v) {
  if (std::isnan(v)) return nullptr;
  return r12(v);
}

std::string path_in(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

// ---------------------------------------------------------------- config --

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::runtime_error("config: bad boolean '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoi(item));
  return out;
}

}  // namespace

JumpConfig RunConfig::jump_config() const {
  JumpConfig jc;
  jc.rca_threshold = rca_threshold;
  jc.backward_window = backward_window;
  jc.forward_window = forward_window;
  jc.transition_gap = delta;
  return jc;
}

void RunConfig::validate() const {
  filters.validate();
  jump_config().validate();
  if (trade_schema.year_min > trade_schema.year_max)
    throw std::invalid_argument("config: empty year range");
  if (!(rca_threshold > 0)) throw std::invalid_argument("config: rca_threshold must be positive");
  if (horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");
  if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  if (curve_bins < 1 || hist_bins < 1 || sigmoid_bins < 1)
    throw std::invalid_argument("config: bin counts must be >= 1");
  if (!stage_cuts_auto && !(stage_cut_low <= stage_cut_high))
    throw std::invalid_argument("config: stage cuts must satisfy low <= high");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(line_no) + " is not key = value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    try {
      if (key == "trade_csv") cfg.trade_csv = value;
      else if (key == "covariates_csv") cfg.covariates_csv = value;
      else if (key == "out_dir") cfg.out_dir = value;
      else if (key == "trade_col_year") cfg.trade_schema.year_col = value;
      else if (key == "trade_col_country") cfg.trade_schema.country_col = value;
      else if (key == "trade_col_product") cfg.trade_schema.product_col = value;
      else if (key == "trade_col_value") cfg.trade_schema.value_col = value;
      else if (key == "year_start") cfg.trade_schema.year_min = std::stoi(value);
      else if (key == "year_end") cfg.trade_schema.year_max = std::stoi(value);
      else if (key == "min_population") cfg.filters.min_population = std::stod(value);
      else if (key == "min_total_trade") cfg.filters.min_total_trade = std::stod(value);
      else if (key == "reference_year") cfg.filters.reference_year = std::stoi(value);
      else if (key == "min_flow") cfg.filters.min_flow = std::stod(value);
      else if (key == "max_zero_country_share") cfg.filters.max_zero_country_share = std::stod(value);
      else if (key == "min_global_product_export") cfg.filters.min_global_product_export = std::stod(value);
      else if (key == "max_zero_product_share") cfg.filters.max_zero_product_share = std::stod(value);
      else if (key == "require_full_coverage") cfg.filters.require_full_coverage = parse_bool(value);
      else if (key == "rca_threshold") cfg.rca_threshold = std::stod(value);
      else if (key == "eci_method")
        cfg.eci_method = value == "reflections" ? EciMethod::Reflections : EciMethod::Eigenvector;
      else if (key == "eci_max_iter") cfg.eci_max_iter = std::stoi(value);
      else if (key == "eci_tol") cfg.eci_tol = std::stod(value);
      else if (key == "pooled_proximity") cfg.pooled_proximity = parse_bool(value);
      else if (key == "delta") cfg.delta = std::stoi(value);
      else if (key == "interval_anchor") cfg.interval_anchor = std::stoi(value);
      else if (key == "backward_window") cfg.backward_window = std::stoi(value);
      else if (key == "forward_window") cfg.forward_window = std::stoi(value);
      else if (key == "horizon") cfg.horizon = std::stoi(value);
      else if (key == "curve_bins") cfg.curve_bins = std::stoi(value);
      else if (key == "hist_bins") cfg.hist_bins = std::stoi(value);
      else if (key == "stage_cuts") {
        if (value == "auto") {
          cfg.stage_cuts_auto = true;
        } else {
          const auto comma = value.find(',');
          if (comma == std::string::npos)
            throw std::runtime_error("config: stage_cuts must be 'auto' or 'low,high'");
          cfg.stage_cuts_auto = false;
          cfg.stage_cut_low = std::stod(value.substr(0, comma));
          cfg.stage_cut_high = std::stod(value.substr(comma + 1));
        }
      } else if (key == "sigmoid_bins") cfg.sigmoid_bins = std::stoi(value);
      else if (key == "growth_method")
        cfg.growth_method =
            value == "log_diff" ? GrowthMethod::LogDifference : GrowthMethod::Geometric;
      else if (key == "table1_end_year") cfg.table1_end_year = std::stoi(value);
      else if (key == "table2_end_year") cfg.table2_end_year = std::stoi(value);
      else if (key == "delta_sweep") cfg.delta_sweep = parse_int_list(value);
      else if (key == "include_censored") cfg.include_censored = parse_bool(value);
      else if (key == "autocorr_max_lag") cfg.autocorr_max_lag = std::stoi(value);
      else if (key == "threads") cfg.threads = std::stoi(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else throw std::runtime_error("config: unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw std::runtime_error("config: bad value for '" + key + "' at line " +
                               std::to_string(line_no));
    }
  }

  if (const char* env_out = std::getenv("ECOMPLEX_OUT"); env_out && *env_out)
    cfg.out_dir = env_out;
  if (const char* env_threads = std::getenv("ECOMPLEX_THREADS"); env_threads && *env_threads)
    cfg.threads = std::stoi(env_threads);
  return cfg;
}

namespace {

// -------------------------------------------------------------- manifest --

json config_echo(const RunConfig& cfg) {
  json j;
  j["trade_csv"] = cfg.trade_csv;
  j["covariates_csv"] = cfg.covariates_csv;
  j["year_start"] = cfg.trade_schema.year_min;
  j["year_end"] = cfg.trade_schema.year_max;
  j["min_population"] = jnum(cfg.filters.min_population);
  j["min_total_trade"] = jnum(cfg.filters.min_total_trade);
  j["reference_year"] = cfg.filters.reference_year;
  j["min_flow"] = jnum(cfg.filters.min_flow);
  j["max_zero_country_share"] = jnum(cfg.filters.max_zero_country_share);
  j["min_global_product_export"] = jnum(cfg.filters.min_global_product_export);
  j["max_zero_product_share"] = jnum(cfg.filters.max_zero_product_share);
  j["require_full_coverage"] = cfg.filters.require_full_coverage;
  j["rca_threshold"] = jnum(cfg.rca_threshold);
  j["eci_method"] = cfg.eci_method == EciMethod::Eigenvector ? "eigenvector" : "reflections";
  j["eci_max_iter"] = cfg.eci_max_iter;
  j["eci_tol"] = jnum(cfg.eci_tol);
  j["pooled_proximity"] = cfg.pooled_proximity;
  j["delta"] = cfg.delta;
  j["interval_anchor"] = cfg.interval_anchor;
  j["backward_window"] = cfg.backward_window;
  j["forward_window"] = cfg.forward_window;
  j["horizon"] = cfg.horizon;
  j["curve_bins"] = cfg.curve_bins;
  j["hist_bins"] = cfg.hist_bins;
  j["stage_cuts"] = cfg.stage_cuts_auto
                        ? json("auto")
                        : json::array({jnum(cfg.stage_cut_low), jnum(cfg.stage_cut_high)});
  j["sigmoid_bins"] = cfg.sigmoid_bins;
  j["growth_method"] =
      cfg.growth_method == GrowthMethod::Geometric ? "geometric" : "log_diff";
  j["table1_end_year"] = cfg.table1_end_year;
  j["table2_end_year"] = cfg.table2_end_year;
  j["delta_sweep"] = cfg.delta_sweep;
  j["include_censored"] = cfg.include_censored;
  j["autocorr_max_lag"] = cfg.autocorr_max_lag;
  j["seed"] = cfg.seed;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

void update_manifest(const RunConfig& cfg, const std::vector<std::string>& files) {
  const std::string manifest_path = path_in(cfg, "manifest.json");
  json manifest;
  if (fs::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    try {
      in >> manifest;
    } catch (const std::exception&) {
      manifest = json::object();
    }
  }
  manifest["schema"] = 1;
  manifest["config"] = config_echo(cfg);
  if (!manifest.contains("files") || !manifest["files"].is_object())
    manifest["files"] = json::object();
  for (const auto& name : files) {
    const std::string full = path_in(cfg, name);
    json entry;
    entry["sha256"] = Sha256::of_file(full);
    entry["bytes"] = static_cast<std::uint64_t>(fs::file_size(full));
    manifest["files"][name] = entry;
  }
  write_text(manifest_path, manifest.dump(2) + "\n");
}

// --------------------------------------------------------- panel on disk --

struct YearContext;

// The per-year summary schema is fixed at ingest; the advantage-dependent
// columns stay empty until the complexity stage refines them.
void write_summary_csv(const RunConfig& cfg, const TradePanel& panel,
                       const std::vector<YearContext>* years);

void write_panel_artifacts(const RunConfig& cfg, const TradePanel& panel,
                           const FilterReport& filt, const LoadReport& trade_rep,
                           const LoadReport& cov_rep) {
  fs::create_directories(cfg.out_dir);

  {
    csv::Writer w(path_in(cfg, "panel.csv"));
    w.header({"year", "country", "product", "value"});
    for (const auto& rec : to_records(panel)) {
      w.field(rec.year);
      w.field(rec.country);
      w.field(rec.product);
      w.field(rec.value);
      w.end_row();
    }
  }
  {
    csv::Writer w(path_in(cfg, "covariates.csv"));
    w.header({"country", "year", "population", "gdp_pc", "human_capital",
              "capital_stock_per_worker", "employment"});
    std::vector<const CovariateRow*> rows;
    for (const auto& row : panel.covariates.rows())
      if (panel.country_index(row.country) >= 0) rows.push_back(&row);
    std::sort(rows.begin(), rows.end(), [](const CovariateRow* a, const CovariateRow* b) {
      return std::tie(a->country, a->year) < std::tie(b->country, b->year);
    });
    for (const CovariateRow* row : rows) {
      w.field(row->country);
      w.field(row->year);
      w.field(row->population);
      w.field(row->gdp_pc);
      w.field(row->human_capital);
      w.field(row->capital_stock_per_worker);
      w.field(row->employment);
      w.end_row();
    }
  }
  {
    json meta;
    meta["countries"] = panel.countries;
    meta["products"] = panel.products;
    meta["years"] = panel.years;
    json fr;
    fr["dropped_no_population"] = filt.dropped_no_population;
    fr["dropped_small_countries"] = filt.dropped_small_countries;
    fr["dropped_sparse_products"] = filt.dropped_sparse_products;
    fr["dropped_low_export_products"] = filt.dropped_low_export_products;
    fr["dropped_sparse_countries"] = filt.dropped_sparse_countries;
    fr["dropped_no_coverage"] = filt.dropped_no_coverage;
    fr["flows_zeroed"] = filt.flows_zeroed;
    fr["passes"] = filt.passes;
    meta["filter_report"] = fr;
    meta["trade_rows_parsed"] = trade_rep.rows_parsed;
    meta["trade_rows_malformed"] = trade_rep.errors.size();
    meta["trade_rows_out_of_range"] = trade_rep.rows_out_of_range;
    meta["covariate_rows_parsed"] = cov_rep.rows_parsed;
    meta["covariate_rows_malformed"] = cov_rep.errors.size();
    json errs = json::array();
    for (const auto& e : trade_rep.errors) {
      json row;
      row["line"] = e.line;
      row["message"] = e.message;
      errs.push_back(row);
    }
    meta["trade_row_errors"] = errs;
    write_text(path_in(cfg, "panel_meta.json"), meta.dump(2) + "\n");
  }
  write_summary_csv(cfg, panel, nullptr);
}

TradePanel load_panel_artifacts(const RunConfig& cfg) {
  const std::string meta_path = path_in(cfg, "panel_meta.json");
  if (!fs::exists(meta_path))
    throw std::runtime_error("missing '" + meta_path + "' (run the ingest stage first)");
  json meta;
  {
    std::ifstream in(meta_path);
    in >> meta;
  }
  TradePanel panel;
  panel.countries = meta["countries"].get<std::vector<std::string>>();
  panel.products = meta["products"].get<std::vector<std::string>>();
  panel.years = meta["years"].get<std::vector<int>>();
  panel.values.assign(panel.years.size(),
                      Matrix(panel.countries.size(), panel.products.size()));

  const csv::Table table = csv::read_file(path_in(cfg, "panel.csv"));
  const std::size_t cy = table.column("year");
  const std::size_t cc = table.column("country");
  const std::size_t cp = table.column("product");
  const std::size_t cv = table.column("value");
  for (const auto& row : table.rows) {
    const int year = std::stoi(row[cy]);
    const int yi = panel.year_index(year);
    const int ci = panel.country_index(row[cc]);
    const int pi = panel.product_index(row[cp]);
    if (yi < 0 || ci < 0 || pi < 0)
      throw std::runtime_error("panel.csv row references an entity missing from panel_meta.json");
    panel.values[static_cast<std::size_t>(yi)](static_cast<std::size_t>(ci),
                                               static_cast<std::size_t>(pi)) =
        std::stod(row[cv]);
  }

  LoadReport cov_rep;
  panel.covariates = load_covariates_csv(path_in(cfg, "covariates.csv"), &cov_rep);
  return panel;
}

// ------------------------------------------------------------- computing --

struct YearContext {
  AdvantageMatrix adv;  // post-drop analysis universe
  ProximityMatrix phi;
  DensityMatrix omega;
  ComplexityScores scores;
  DropReport drops;
  std::unordered_map<std::string, std::size_t> country_ix;
  std::unordered_map<std::string, std::size_t> product_ix;
};

struct Workspace {
  TradePanel panel;
  std::vector<AdvantageMatrix> advs;  // panel universe per year, for the detector
  std::vector<YearContext> years;     // aligned with panel.years
};

void write_summary_csv(const RunConfig& cfg, const TradePanel& panel,
                       const std::vector<YearContext>* years) {
  csv::Writer w(path_in(cfg, "summary.csv"));
  w.header({"year", "active_countries", "active_products", "positive_flows", "total_trade",
            "mean_basket", "mean_option", "mean_eci"});
  const auto rows = panel_summary(panel);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SummaryRow& row = rows[i];
    w.field(row.year);
    w.field(row.active_countries);
    w.field(row.active_products);
    w.field(row.positive_flows);
    w.field(r12(row.total_trade));
    if (years != nullptr) {
      const YearContext& ctx = (*years)[i];
      const std::size_t nc = ctx.adv.countries.size();
      const double mean_basket = stats::mean(ctx.adv.diversity.data(), nc);
      w.field(r12(mean_basket));
      w.field(r12(static_cast<double>(ctx.adv.products.size()) - mean_basket));
      w.field(r12(stats::mean(ctx.scores.eci.data(), nc)));
    } else {
      w.field(std::numeric_limits<double>::quiet_NaN());
      w.field(std::numeric_limits<double>::quiet_NaN());
      w.field(std::numeric_limits<double>::quiet_NaN());
    }
    w.end_row();
  }
}

// label-based pooled proximity: mean of the per-year phi over the years in
// which both products are present
Matrix pooled_phi_by_label(const std::vector<YearContext>& years,
                           const std::vector<std::string>& all_products) {
  const std::size_t np = all_products.size();
  std::unordered_map<std::string, std::size_t> gix;
  for (std::size_t p = 0; p < np; ++p) gix.emplace(all_products[p], p);
  Matrix acc(np, np), count(np, np);
  for (const auto& ctx : years) {
    std::vector<std::size_t> g(ctx.phi.products.size());
    for (std::size_t p = 0; p < ctx.phi.products.size(); ++p)
      g[p] = gix.at(ctx.phi.products[p]);
    for (std::size_t p = 0; p < ctx.phi.products.size(); ++p)
      for (std::size_t q = 0; q < ctx.phi.products.size(); ++q) {
        acc(g[p], g[q]) += ctx.phi.phi(p, q);
        count(g[p], g[q]) += 1.0;
      }
  }
  Matrix pooled(np, np);
  for (std::size_t p = 0; p < np; ++p)
    for (std::size_t q = 0; q < np; ++q)
      pooled(p, q) = count(p, q) > 0 ? acc(p, q) / count(p, q) : 0.0;
  for (std::size_t p = 0; p < np; ++p) pooled(p, p) = 1.0;
  return pooled;
}

Workspace make_workspace(const RunConfig& cfg, TradePanel panel) {
  Workspace ws;
  ws.panel = std::move(panel);
  const std::size_t ny = ws.panel.years.size();
  ws.advs.resize(ny);
  ws.years.resize(ny);

  parallel_for(ny, cfg.threads, [&](std::size_t i) {
    const int year = ws.panel.years[i];
    ws.advs[i] = compute_rca(ws.panel, year, cfg.rca_threshold);
    YearContext& ctx = ws.years[i];
    ctx.adv = drop_degenerate(ws.advs[i], &ctx.drops);
    ctx.phi = compute_proximity(ctx.adv);
    ctx.omega = compute_density(ctx.adv, ctx.phi);
    ctx.scores = compute_eci_pci(ctx.adv, cfg.eci_method, cfg.eci_max_iter, cfg.eci_tol);
    for (std::size_t c = 0; c < ctx.adv.countries.size(); ++c)
      ctx.country_ix.emplace(ctx.adv.countries[c], c);
    for (std::size_t p = 0; p < ctx.adv.products.size(); ++p)
      ctx.product_ix.emplace(ctx.adv.products[p], p);
  });

  if (cfg.pooled_proximity) {
    const Matrix pooled = pooled_phi_by_label(ws.years, ws.panel.products);
    std::unordered_map<std::string, std::size_t> gix;
    for (std::size_t p = 0; p < ws.panel.products.size(); ++p)
      gix.emplace(ws.panel.products[p], p);
    parallel_for(ny, cfg.threads, [&](std::size_t i) {
      YearContext& ctx = ws.years[i];
      const std::size_t np = ctx.adv.products.size();
      ProximityMatrix phi;
      phi.year = ctx.adv.year;
      phi.products = ctx.adv.products;
      phi.phi = Matrix(np, np);
      for (std::size_t p = 0; p < np; ++p) {
        const std::size_t gp = gix.at(ctx.adv.products[p]);
        for (std::size_t q = 0; q < np; ++q)
          phi.phi(p, q) = pooled(gp, gix.at(ctx.adv.products[q]));
      }
      ctx.phi = std::move(phi);
      ctx.omega = compute_density(ctx.adv, ctx.phi);
    });
  }
  return ws;
}

// non-overlapping interval starts on the configured grid
std::vector<int> grid_baselines(const TradePanel& panel, int anchor, int delta) {
  std::vector<int> grid;
  if (panel.years.empty()) return grid;
  const int lo = panel.years.front();
  const int hi = panel.years.back();
  int k = (lo - anchor) / delta;
  while (anchor + k * delta >= lo) --k;
  for (int y = anchor + k * delta; y <= hi; y += delta)
    if (y >= lo) grid.push_back(y);
  return grid;
}

struct JumpAnalysis {
  JumpScan scan;  // annotated, survival filled
  std::vector<DirectionVector> directions;
};

JumpAnalysis analyze_jumps(const Workspace& ws, const RunConfig& cfg, int delta) {
  JumpConfig jc = cfg.jump_config();
  jc.transition_gap = delta;
  const std::vector<int> grid = grid_baselines(ws.panel, cfg.interval_anchor, delta);

  JumpAnalysis out;
  out.scan = detect_jumps(ws.advs, jc, grid);

  // relative metrics against the option set at the baseline year, plus
  // survival from the entry year onwards
  std::map<std::pair<int, std::size_t>, OptionSet> option_cache;
  for (JumpEvent& e : out.scan.events) {
    const auto [survival, censored] = survival_time(e, ws.advs, jc.rca_threshold);
    e.survival = survival;
    e.censored = censored;

    const int yi = ws.panel.year_index(e.baseline_year);
    const YearContext& ctx = ws.years[static_cast<std::size_t>(yi)];
    const auto cit = ctx.country_ix.find(e.country);
    const auto pit = ctx.product_ix.find(e.product);
    if (cit == ctx.country_ix.end() || pit == ctx.product_ix.end()) {
      e.metrics_missing = true;
      continue;
    }
    try {
      const auto key = std::make_pair(e.baseline_year, cit->second);
      auto it = option_cache.find(key);
      if (it == option_cache.end())
        it = option_cache
                 .emplace(key, option_set(ctx.adv, ctx.omega, ctx.scores.pci, cit->second))
                 .first;
      const RelativeMetric om = relative_density(ctx.omega, it->second, pit->second);
      const RelativeMetric pm = relative_complexity(ctx.scores.pci, it->second, pit->second);
      e.omega_tilde = om.value;
      e.pci_tilde = pm.value;
      e.metrics_degenerate = om.degenerate || pm.degenerate;
    } catch (const std::exception&) {
      e.metrics_missing = true;
    }
  }

  // direction vectors per (country, interval)
  std::map<std::pair<int, std::string>, std::vector<std::pair<double, double>>> groups;
  for (const JumpEvent& e : out.scan.events) {
    if (e.metrics_missing) continue;
    groups[{e.baseline_year, e.country}].emplace_back(e.omega_tilde, e.pci_tilde);
  }
  for (const auto& [key, metrics] : groups)
    out.directions.push_back(
        development_direction(key.second, key.first, key.first + delta, metrics));
  return out;
}

std::vector<Observation> build_observations(const Workspace& ws, const RunConfig& cfg,
                                            const std::vector<DirectionVector>& directions,
                                            int delta) {
  std::vector<Observation> obs;
  for (const DirectionVector& v : directions) {
    const int yi = ws.panel.year_index(v.y_start);
    if (yi < 0) continue;
    const YearContext& ctx = ws.years[static_cast<std::size_t>(yi)];
    const auto cit = ctx.country_ix.find(v.country);
    if (cit == ctx.country_ix.end()) continue;
    const CovariateRow* cov = ws.panel.covariates.find(v.country, v.y_start);
    if (cov == nullptr) continue;
    if (std::isnan(cov->population) || cov->population <= 0 || std::isnan(cov->gdp_pc) ||
        cov->gdp_pc <= 0 || std::isnan(cov->human_capital) ||
        std::isnan(cov->capital_stock_per_worker) || cov->capital_stock_per_worker <= 0)
      continue;  // missing covariates exclude the row from regressions

    Observation o;
    o.country = v.country;
    o.year = v.y_start;
    o.omega = v.omega_bar;
    o.pi = v.pci_bar;
    o.eci = ctx.scores.eci[cit->second];
    o.ln_gdp = std::log(cov->gdp_pc);
    o.ln_pop = std::log(cov->population);
    o.human_capital = cov->human_capital;
    o.ln_capital_stock = std::log(cov->capital_stock_per_worker);

    const CovariateRow* cov_end = ws.panel.covariates.find(v.country, v.y_start + delta);
    if (cov_end != nullptr && !std::isnan(cov_end->gdp_pc) && cov_end->gdp_pc > 0)
      o.growth = annualized_growth(cov->gdp_pc, cov_end->gdp_pc, delta, cfg.growth_method);
    obs.push_back(std::move(o));
  }
  return obs;
}

std::vector<Observation> table_window(const std::vector<Observation>& obs, int anchor,
                                      int end_year, int delta) {
  std::vector<Observation> out;
  for (const auto& o : obs)
    if (o.year >= anchor && o.year + delta <= end_year) out.push_back(o);
  return out;
}

// ------------------------------------------------------------ stage cores --

std::vector<std::string> complexity_core(const RunConfig& cfg, const Workspace& ws) {
  {
    csv::Writer w(path_in(cfg, "eci.csv"));
    w.header({"year", "country", "eci", "k_c"});
    for (const auto& ctx : ws.years)
      for (std::size_t c = 0; c < ctx.scores.countries.size(); ++c) {
        w.field(ctx.scores.year);
        w.field(ctx.scores.countries[c]);
        w.field(r12(ctx.scores.eci[c]));
        w.field(ctx.adv.diversity[c]);
        w.end_row();
      }
  }
  {
    csv::Writer w(path_in(cfg, "pci.csv"));
    w.header({"year", "product", "pci", "k_p"});
    for (const auto& ctx : ws.years)
      for (std::size_t p = 0; p < ctx.scores.products.size(); ++p) {
        w.field(ctx.scores.year);
        w.field(ctx.scores.products[p]);
        w.field(r12(ctx.scores.pci[p]));
        w.field(ctx.adv.ubiquity[p]);
        w.end_row();
      }
  }
  write_summary_csv(cfg, ws.panel, &ws.years);
  {
    json meta;
    meta["method"] = cfg.eci_method == EciMethod::Eigenvector ? "eigenvector" : "reflections";
    json drops = json::object();
    for (const auto& ctx : ws.years) {
      json d;
      d["removed_countries"] = ctx.drops.removed_countries;
      d["removed_products"] = ctx.drops.removed_products;
      drops[std::to_string(ctx.adv.year)] = d;
    }
    meta["degenerate_drops"] = drops;
    write_text(path_in(cfg, "complexity_meta.json"), meta.dump(2) + "\n");
  }
  return {"eci.csv", "pci.csv", "summary.csv", "complexity_meta.json"};
}

std::vector<std::string> proximity_core(const RunConfig& cfg, const Workspace& ws) {
  {
    csv::Writer w(path_in(cfg, "proximity.csv"));
    w.header({"year", "product_a", "product_b", "phi"});
    for (const auto& ctx : ws.years) {
      const std::size_t np = ctx.phi.products.size();
      for (std::size_t p = 0; p < np; ++p)
        for (std::size_t q = p + 1; q < np; ++q)
          if (ctx.phi.phi(p, q) > 0) {
            w.field(ctx.phi.year);
            w.field(ctx.phi.products[p]);
            w.field(ctx.phi.products[q]);
            w.field(r12(ctx.phi.phi(p, q)));
            w.end_row();
          }
    }
  }
  {
    csv::Writer w(path_in(cfg, "density.csv"));
    w.header({"year", "country", "product", "omega"});
    for (const auto& ctx : ws.years)
      for (std::size_t c = 0; c < ctx.omega.countries.size(); ++c)
        for (std::size_t p = 0; p < ctx.omega.products.size(); ++p) {
          w.field(ctx.omega.year);
          w.field(ctx.omega.countries[c]);
          w.field(ctx.omega.products[p]);
          w.field(r12(ctx.omega.omega(c, p)));
          w.end_row();
        }
  }

  std::vector<AdvantageMatrix> advs;
  std::vector<DensityMatrix> dens;
  std::vector<ProximityMatrix> proxs;
  for (const auto& ctx : ws.years) {
    advs.push_back(ctx.adv);
    dens.push_back(ctx.omega);
    proxs.push_back(ctx.phi);
  }
  auto write_curve = [&](const std::string& name, CurveBinning binning) {
    const auto bins = entry_probability_curve(advs, dens, proxs, cfg.horizon, binning,
                                              static_cast<std::size_t>(cfg.curve_bins));
    csv::Writer w(path_in(cfg, name));
    w.header({"bin_lo", "bin_hi", "n_pairs", "n_transitions", "probability"});
    for (const auto& bin : bins) {
      w.field(r12(bin.lo));
      w.field(r12(bin.hi));
      w.field(bin.n_pairs);
      w.field(bin.n_transitions);
      w.field(r12(bin.probability));
      w.end_row();
    }
  };
  write_curve("entry_curve_density.csv", CurveBinning::Density);
  write_curve("entry_curve_proximity.csv", CurveBinning::MaxProximity);
  return {"proximity.csv", "density.csv", "entry_curve_density.csv",
          "entry_curve_proximity.csv"};
}

std::vector<std::string> jumps_core(const RunConfig& cfg, const Workspace& ws,
                                    const JumpAnalysis& ja) {
  {
    csv::Writer w(path_in(cfg, "jumps.csv"));
    w.header({"country", "product", "baseline_year", "entry_year", "omega_tilde", "pci_tilde",
              "degenerate", "missing", "survival", "censored"});
    for (const auto& e : ja.scan.events) {
      w.field(e.country);
      w.field(e.product);
      w.field(e.baseline_year);
      w.field(e.entry_year);
      w.field(r12(e.omega_tilde));
      w.field(r12(e.pci_tilde));
      w.field(static_cast<long long>(e.metrics_degenerate ? 1 : 0));
      w.field(static_cast<long long>(e.metrics_missing ? 1 : 0));
      w.field(e.survival);
      w.field(static_cast<long long>(e.censored ? 1 : 0));
      w.end_row();
    }
  }
  {
    json meta;
    meta["n_events"] = ja.scan.events.size();
    meta["baselines_evaluated"] = ja.scan.baselines_evaluated;
    if (!ja.scan.empty_reason.empty()) meta["empty_reason"] = ja.scan.empty_reason;
    write_text(path_in(cfg, "jumps_meta.json"), meta.dump(2) + "\n");
  }
  {
    // per-country survival summary
    std::map<std::string, std::vector<const JumpEvent*>> by_country;
    for (const auto& e : ja.scan.events) by_country[e.country].push_back(&e);
    csv::Writer w(path_in(cfg, "survival_by_country.csv"));
    w.header({"country", "n_events", "n_uncensored", "mean_survival_uncensored"});
    for (const auto& [country, events] : by_country) {
      double sum = 0.0;
      std::size_t n_unc = 0;
      for (const JumpEvent* e : events)
        if (!e->censored) {
          sum += e->survival;
          ++n_unc;
        }
      w.field(country);
      w.field(events.size());
      w.field(n_unc);
      w.field(n_unc > 0 ? r12(sum / static_cast<double>(n_unc))
                        : std::numeric_limits<double>::quiet_NaN());
      w.end_row();
    }
  }
  {
    std::vector<ComplexityScores> scores;
    std::vector<AdvantageMatrix> advs;
    std::vector<DensityMatrix> dens;
    for (const auto& ctx : ws.years) {
      scores.push_back(ctx.scores);
      advs.push_back(ctx.adv);
      dens.push_back(ctx.omega);
    }
    csv::Writer w(path_in(cfg, "survival_correlation.csv"));
    w.header({"ref_year", "n_countries", "r_eci", "r_gdp", "r_diversity", "r_option_density"});
    try {
      const auto rows = survival_vs_development(ja.scan.events, scores, advs, dens,
                                                ws.panel.covariates, ws.panel.years,
                                                cfg.include_censored);
      for (const auto& row : rows) {
        w.field(row.ref_year);
        w.field(row.n_countries);
        w.field(r12(row.r_eci));
        w.field(r12(row.r_gdp));
        w.field(r12(row.r_diversity));
        w.field(r12(row.r_option_density));
        w.end_row();
      }
    } catch (const std::exception&) {
      // fewer than 3 countries with survivals: leave the table empty
    }
  }
  return {"jumps.csv", "jumps_meta.json", "survival_by_country.csv",
          "survival_correlation.csv"};
}

std::vector<std::string> directions_core(const RunConfig& cfg, const JumpAnalysis& ja) {
  {
    csv::Writer w(path_in(cfg, "directions.csv"));
    w.header({"country", "y_start", "y_end", "omega", "pi", "n_jumps"});
    for (const auto& v : ja.directions) {
      w.field(v.country);
      w.field(v.y_start);
      w.field(v.y_end);
      w.field(r12(v.omega_bar));
      w.field(r12(v.pci_bar));
      w.field(v.n_jumps);
      w.end_row();
    }
  }
  {
    csv::Writer w(path_in(cfg, "relative_metrics.csv"));
    w.header({"country", "product", "baseline_year", "entry_year", "omega_tilde", "pci_tilde",
              "degenerate"});
    for (const auto& e : ja.scan.events) {
      if (e.metrics_missing) continue;
      w.field(e.country);
      w.field(e.product);
      w.field(e.baseline_year);
      w.field(e.entry_year);
      w.field(r12(e.omega_tilde));
      w.field(r12(e.pci_tilde));
      w.field(static_cast<long long>(e.metrics_degenerate ? 1 : 0));
      w.end_row();
    }
  }

  std::vector<std::string> files = {"directions.csv", "relative_metrics.csv"};
  if (!ja.directions.empty()) {
    const DirectionStatistics st =
        direction_statistics(ja.directions, static_cast<std::size_t>(cfg.hist_bins));
    {
      json j;
      j["n"] = st.n;
      j["share_omega_positive"] = jnum(st.share_omega_positive);
      j["mean_omega"] = jnum(st.mean_omega);
      j["mean_pi"] = jnum(st.mean_pi);
      j["mean_omega_by_year"] = jnum(st.mean_omega_by_year);
      j["mean_pi_by_year"] = jnum(st.mean_pi_by_year);
      j["pooled_slope"] = jnum(st.pooled_slope);
      j["pooled_slope_se"] = jnum(st.pooled_slope_se);
      j["pooled_r2"] = jnum(st.pooled_r2);
      write_text(path_in(cfg, "direction_stats.json"), j.dump(2) + "\n");
    }
    {
      csv::Writer w(path_in(cfg, "direction_hist.csv"));
      w.header({"component", "bin_lo", "bin_hi", "count"});
      auto dump_hist = [&](const char* name, const stats::Histogram& h) {
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
          w.field(std::string(name));
          w.field(r12(h.lo + static_cast<double>(b) * h.bin_width()));
          w.field(r12(h.lo + static_cast<double>(b + 1) * h.bin_width()));
          w.field(h.counts[b]);
          w.end_row();
        }
      };
      dump_hist("omega", st.omega_hist);
      dump_hist("pi", st.pi_hist);
    }
    {
      csv::Writer w(path_in(cfg, "slope_by_interval.csv"));
      w.header({"y_start", "slope", "std_error", "r2", "n"});
      for (const auto& pt : st.slope_by_interval) {
        w.field(pt.y_start);
        w.field(r12(pt.slope));
        w.field(r12(pt.std_error));
        w.field(r12(pt.r2));
        w.field(pt.n);
        w.end_row();
      }
    }
    files.insert(files.end(),
                 {"direction_stats.json", "direction_hist.csv", "slope_by_interval.csv"});
  }

  {
    csv::Writer w(path_in(cfg, "autocorrelation.csv"));
    w.header({"lag", "mean_ac_omega", "t_omega", "p_omega", "n_omega", "mean_ac_pi", "t_pi",
              "p_pi", "n_pi", "skipped_short", "skipped_zero_variance"});
    for (int lag = 1; lag <= cfg.autocorr_max_lag; ++lag) {
      try {
        const AutocorrelationResult ac = direction_autocorrelation(ja.directions, lag, cfg.delta);
        w.field(ac.lag);
        w.field(r12(ac.mean_ac_omega));
        w.field(r12(ac.t_omega));
        w.field(r12(ac.p_omega));
        w.field(ac.n_countries_omega);
        w.field(r12(ac.mean_ac_pi));
        w.field(r12(ac.t_pi));
        w.field(r12(ac.p_pi));
        w.field(ac.n_countries_pi);
        w.field(ac.skipped_short);
        w.field(ac.skipped_zero_variance);
        w.end_row();
      } catch (const std::exception&) {
        break;  // lag exceeds every series; longer lags will too
      }
    }
    files.push_back("autocorrelation.csv");
  }
  return files;
}

struct StageData {
  std::vector<StageProfile> profiles;
  double cut_low = 0.0, cut_high = 0.0;
  std::size_t undefined = 0;
};

StageData compute_stage_profiles(const RunConfig& cfg, const Workspace& ws) {
  StageData out;
  std::vector<double> pooled;
  for (const auto& ctx : ws.years) {
    for (std::size_t c = 0; c < ctx.adv.countries.size(); ++c) {
      std::vector<double> omegas, pcis;
      for (std::size_t p = 0; p < ctx.adv.products.size(); ++p)
        if (ctx.adv.rca(c, p) < ctx.adv.rca_threshold) {
          omegas.push_back(ctx.omega.omega(c, p));
          pcis.push_back(ctx.scores.pci[p]);
        }
      StageProfile profile;
      profile.country = ctx.adv.countries[c];
      profile.year = ctx.adv.year;
      if (omegas.size() >= 3) {
        const RhoResult rho = option_set_correlation(omegas, pcis);
        if (rho.defined) {
          profile.rho = rho.rho;
          profile.defined = true;
          pooled.push_back(rho.rho);
        }
      }
      if (!profile.defined) ++out.undefined;
      out.profiles.push_back(std::move(profile));
    }
  }
  if (cfg.stage_cuts_auto && pooled.size() >= 3) {
    const auto cuts = tercile_cuts(pooled);
    out.cut_low = cuts.first;
    out.cut_high = cuts.second;
  } else {
    out.cut_low = cfg.stage_cut_low;
    out.cut_high = cfg.stage_cut_high;
  }
  for (auto& profile : out.profiles)
    if (profile.defined) profile.stage = classify_stage(profile.rho, out.cut_low, out.cut_high);
  return out;
}

std::vector<std::string> stages_core(const RunConfig& cfg, const Workspace& ws,
                                     const JumpAnalysis& ja, const StageData& sd) {
  {
    csv::Writer w(path_in(cfg, "stages.csv"));
    w.header({"country", "year", "rho", "stage"});
    for (const auto& profile : sd.profiles) {
      if (!profile.defined) continue;
      w.field(profile.country);
      w.field(profile.year);
      w.field(r12(profile.rho));
      w.field(profile.stage);
      w.end_row();
    }
  }
  {
    json j;
    j["low"] = jnum(sd.cut_low);
    j["high"] = jnum(sd.cut_high);
    j["source"] = cfg.stage_cuts_auto ? "terciles" : "config";
    j["undefined_profiles"] = sd.undefined;
    write_text(path_in(cfg, "rho_cuts.json"), j.dump(2) + "\n");
  }

  // pooled (eci, rho) observations for the S-curve
  std::map<std::pair<int, std::string>, double> rho_of;
  for (const auto& profile : sd.profiles)
    if (profile.defined) rho_of[{profile.year, profile.country}] = profile.rho;
  std::vector<double> eci_obs, rho_obs;
  for (const auto& ctx : ws.years) {
    for (std::size_t c = 0; c < ctx.adv.countries.size(); ++c) {
      const auto it = rho_of.find({ctx.adv.year, ctx.adv.countries[c]});
      if (it == rho_of.end()) continue;
      eci_obs.push_back(ctx.scores.eci[c]);
      rho_obs.push_back(it->second);
    }
  }
  {
    json fit_json;
    csv::Writer w(path_in(cfg, "rho_eci_bins.csv"));
    w.header({"bin_lo", "bin_hi", "n", "mean_rho"});
    if (eci_obs.size() >= 10) {
      const SigmoidResult sig =
          eci_rho_sigmoid(eci_obs, rho_obs, static_cast<std::size_t>(cfg.sigmoid_bins));
      for (const auto& bin : sig.bins) {
        w.field(r12(bin.lo));
        w.field(r12(bin.hi));
        w.field(bin.n);
        w.field(r12(bin.mean));
        w.end_row();
      }
      fit_json["ok"] = sig.fit.ok;
      fit_json["lo"] = jnum(sig.fit.lo);
      fit_json["hi"] = jnum(sig.fit.hi);
      fit_json["midpoint"] = jnum(sig.fit.midpoint);
      fit_json["slope"] = jnum(sig.fit.slope);
      fit_json["rss"] = jnum(sig.fit.rss);
      fit_json["n_obs"] = eci_obs.size();
    } else {
      fit_json["ok"] = false;
      fit_json["reason"] = "fewer than 10 (country, year) observations";
    }
    write_text(path_in(cfg, "rho_sigmoid.json"), fit_json.dump(2) + "\n");
  }

  // stage-wise omega distributions compared pairwise
  {
    std::map<std::pair<std::string, int>, int> stage_of;
    for (const auto& profile : sd.profiles)
      if (profile.defined) stage_of[{profile.country, profile.year}] = profile.stage;
    std::vector<double> by_stage[4];
    for (const auto& v : ja.directions) {
      const auto it = stage_of.find({v.country, v.y_start});
      if (it != stage_of.end()) by_stage[it->second].push_back(v.omega_bar);
    }
    json j;
    j["n_stage1"] = by_stage[1].size();
    j["n_stage2"] = by_stage[2].size();
    j["n_stage3"] = by_stage[3].size();
    json pairs = json::object();
    const std::pair<int, int> combos[3] = {{1, 2}, {1, 3}, {2, 3}};
    for (const auto& [a, b] : combos) {
      const std::string key = "stage" + std::to_string(a) + "_vs_stage" + std::to_string(b);
      if (by_stage[a].empty() || by_stage[b].empty()) {
        pairs[key] = nullptr;
        continue;
      }
      const KsResult ks = ks_two_sample(by_stage[a], by_stage[b]);
      json entry;
      entry["d"] = jnum(ks.d);
      entry["p_value"] = jnum(ks.p_value);
      entry["n1"] = ks.n1;
      entry["n2"] = ks.n2;
      pairs[key] = entry;
    }
    j["omega_ks"] = pairs;
    write_text(path_in(cfg, "ks_report.json"), j.dump(2) + "\n");
  }
  // per-year descriptive table: panel structure, jump activity, direction
  // means, mean scores and covariate levels
  {
    std::map<int, std::vector<const DirectionVector*>> dir_by_year;
    for (const auto& v : ja.directions) dir_by_year[v.y_start].push_back(&v);
    std::map<int, std::size_t> jumps_by_year;
    for (const auto& e : ja.scan.events) ++jumps_by_year[e.baseline_year];
    std::map<int, std::pair<double, std::size_t>> rho_by_year;
    for (const auto& profile : sd.profiles)
      if (profile.defined) {
        rho_by_year[profile.year].first += profile.rho;
        rho_by_year[profile.year].second += 1;
      }

    csv::Writer w(path_in(cfg, "descriptive_summary.csv"));
    w.header({"year", "n_countries_jumping", "mean_option", "mean_basket", "n_jumps",
              "mean_omega", "mean_pi", "mean_eci", "mean_rho", "log_mean_gdp_pc",
              "log_mean_population", "mean_human_capital", "log_mean_capital_stock"});
    for (const auto& ctx : ws.years) {
      const int year = ctx.adv.year;
      const std::size_t nc = ctx.adv.countries.size();
      const double mean_basket = stats::mean(ctx.adv.diversity.data(), nc);
      const auto dirs = dir_by_year.find(year);
      double mean_omega = std::numeric_limits<double>::quiet_NaN();
      double mean_pi = std::numeric_limits<double>::quiet_NaN();
      std::size_t n_jumping = 0;
      if (dirs != dir_by_year.end() && !dirs->second.empty()) {
        n_jumping = dirs->second.size();
        double so = 0.0, sp = 0.0;
        for (const DirectionVector* v : dirs->second) {
          so += v->omega_bar;
          sp += v->pci_bar;
        }
        mean_omega = so / static_cast<double>(n_jumping);
        mean_pi = sp / static_cast<double>(n_jumping);
      }
      double gdp = 0.0, pop = 0.0, hc = 0.0, stock = 0.0;
      std::size_t n_gdp = 0, n_pop = 0, n_hc = 0, n_stock = 0;
      for (const auto& country : ctx.adv.countries) {
        const CovariateRow* cov = ws.panel.covariates.find(country, year);
        if (cov == nullptr) continue;
        if (!std::isnan(cov->gdp_pc)) {
          gdp += cov->gdp_pc;
          ++n_gdp;
        }
        if (!std::isnan(cov->population)) {
          pop += cov->population;
          ++n_pop;
        }
        if (!std::isnan(cov->human_capital)) {
          hc += cov->human_capital;
          ++n_hc;
        }
        if (!std::isnan(cov->capital_stock_per_worker)) {
          stock += cov->capital_stock_per_worker;
          ++n_stock;
        }
      }
      const auto rho = rho_by_year.find(year);
      const auto jumps = jumps_by_year.find(year);
      w.field(year);
      w.field(n_jumping);
      w.field(r12(static_cast<double>(ctx.adv.products.size()) - mean_basket));
      w.field(r12(mean_basket));
      w.field(jumps != jumps_by_year.end() ? jumps->second : 0);
      w.field(r12(mean_omega));
      w.field(r12(mean_pi));
      w.field(r12(stats::mean(ctx.scores.eci.data(), nc)));
      w.field(rho != rho_by_year.end() && rho->second.second > 0
                  ? r12(rho->second.first / static_cast<double>(rho->second.second))
                  : std::numeric_limits<double>::quiet_NaN());
      w.field(n_gdp > 0 ? r12(std::log10(gdp / static_cast<double>(n_gdp)))
                        : std::numeric_limits<double>::quiet_NaN());
      w.field(n_pop > 0 ? r12(std::log10(pop / static_cast<double>(n_pop)))
                        : std::numeric_limits<double>::quiet_NaN());
      w.field(n_hc > 0 ? r12(hc / static_cast<double>(n_hc))
                       : std::numeric_limits<double>::quiet_NaN());
      w.field(n_stock > 0 ? r12(std::log10(stock / static_cast<double>(n_stock)))
                          : std::numeric_limits<double>::quiet_NaN());
      w.end_row();
    }
  }
  return {"stages.csv", "rho_cuts.json", "rho_eci_bins.csv", "rho_sigmoid.json",
          "ks_report.json", "descriptive_summary.csv"};
}

// regression table rendering in the familiar journal layout
std::string render_table(const std::string& title, const std::vector<RegressionFit>& fits,
                         const std::vector<std::string>& term_order,
                         const std::map<std::string, std::string>& labels) {
  std::ostringstream out;
  const int name_w = 26, col_w = 18;
  out << title << "\n";
  out << std::string(name_w + col_w * fits.size(), '-') << "\n";
  out << std::string(name_w, ' ');
  for (std::size_t m = 0; m < fits.size(); ++m) {
    const std::string head = "(" + std::to_string(m + 1) + ")";
    out << std::string(col_w - head.size(), ' ') << head;
  }
  out << "\n" << std::string(name_w + col_w * fits.size(), '-') << "\n";

  auto find_coef = [](const RegressionFit& fit, const std::string& term) -> const Coefficient* {
    for (const auto& c : fit.coefficients)
      if (c.name == term) return &c;
    return nullptr;
  };
  for (const auto& term : term_order) {
    bool present = false;
    for (const auto& fit : fits)
      if (find_coef(fit, term)) present = true;
    if (!present) continue;
    const auto lbl = labels.find(term);
    const std::string label = lbl != labels.end() ? lbl->second : term;
    out << label << std::string(name_w - std::min<std::size_t>(label.size(), name_w - 1), ' ');
    std::ostringstream se_line;
    se_line << std::string(name_w, ' ');
    for (const auto& fit : fits) {
      const Coefficient* c = find_coef(fit, term);
      if (c == nullptr) {
        out << std::string(col_w, ' ');
        se_line << std::string(col_w, ' ');
        continue;
      }
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.3f%s", c->estimate, stats::stars(c->p_value));
      std::string cell(buf);
      out << std::string(col_w - cell.size(), ' ') << cell;
      std::snprintf(buf, sizeof(buf), "(%.3f)", c->std_error);
      cell = buf;
      se_line << std::string(col_w - cell.size(), ' ') << cell;
    }
    out << "\n" << se_line.str() << "\n";
  }
  out << std::string(name_w + col_w * fits.size(), '-') << "\n";

  auto stat_row = [&](const std::string& name, auto getter, const char* fmt) {
    out << name << std::string(name_w - name.size(), ' ');
    for (const auto& fit : fits) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), fmt, getter(fit));
      const std::string cell(buf);
      out << std::string(col_w - cell.size(), ' ') << cell;
    }
    out << "\n";
  };
  stat_row("Observations", [](const RegressionFit& f) { return static_cast<double>(f.n_obs); },
           "%.0f");
  stat_row("R2", [](const RegressionFit& f) { return f.r2; }, "%.3f");
  stat_row("Adjusted R2", [](const RegressionFit& f) { return f.adj_r2; }, "%.3f");
  out << "F Statistic" << std::string(name_w - 11, ' ');
  for (const auto& fit : fits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f%s", fit.f_stat, stats::stars(fit.f_p_value));
    const std::string cell(buf);
    out << std::string(col_w - cell.size(), ' ') << cell;
  }
  out << "\n" << std::string(name_w + col_w * fits.size(), '-') << "\n";
  out << "Notes: *p<0.1; **p<0.05; ***p<0.01. All models control for year fixed effects.\n";
  return out.str();
}

void write_fits_csv(const RunConfig& cfg, const std::string& name,
                    const std::vector<RegressionFit>& fits) {
  csv::Writer w(path_in(cfg, name));
  w.header({"model", "term", "estimate", "std_error", "t_stat", "p_value"});
  for (std::size_t m = 0; m < fits.size(); ++m)
    for (const auto& c : fits[m].coefficients) {
      w.field(static_cast<long long>(m + 1));
      w.field(c.name);
      w.field(r12(c.estimate));
      w.field(r12(c.std_error));
      w.field(r12(c.t_stat));
      w.field(r12(c.p_value));
      w.end_row();
    }
}

void write_fits_summary_csv(const RunConfig& cfg, const std::string& name,
                            const std::vector<RegressionFit>& fits) {
  csv::Writer w(path_in(cfg, name));
  w.header({"model", "n_obs", "r2", "adj_r2", "f_stat", "f_p_value"});
  for (std::size_t m = 0; m < fits.size(); ++m) {
    w.field(static_cast<long long>(m + 1));
    w.field(fits[m].n_obs);
    w.field(r12(fits[m].r2));
    w.field(r12(fits[m].adj_r2));
    w.field(r12(fits[m].f_stat));
    w.field(r12(fits[m].f_p_value));
    w.end_row();
  }
}

std::vector<std::string> regress_core(const RunConfig& cfg, const Workspace& ws,
                                      const JumpAnalysis& ja) {
  const std::vector<Observation> all_obs = build_observations(ws, cfg, ja.directions, cfg.delta);
  {
    csv::Writer w(path_in(cfg, "observations.csv"));
    w.header({"country", "year", "omega", "pi", "growth", "eci", "ln_gdp", "ln_pop",
              "human_capital", "ln_capital_stock"});
    for (const auto& o : all_obs) {
      w.field(o.country);
      w.field(o.year);
      w.field(r12(o.omega));
      w.field(r12(o.pi));
      w.field(r12(o.growth));
      w.field(r12(o.eci));
      w.field(r12(o.ln_gdp));
      w.field(r12(o.ln_pop));
      w.field(r12(o.human_capital));
      w.field(r12(o.ln_capital_stock));
      w.end_row();
    }
  }
  std::vector<std::string> files = {"observations.csv"};

  const std::map<std::string, std::string> labels = {
      {"eci", "ECI"},
      {"eci_sq", "ECI^2"},
      {"ln_gdp", "Initial ln GDP pc"},
      {"ln_gdp_sq", "Initial (ln GDP pc)^2"},
      {"human_capital", "Initial Human Capital"},
      {"human_capital_sq", "Initial (Human Capital)^2"},
      {"ln_capital_stock", "Initial ln Capital Stock"},
      {"ln_pop", "Initial ln Pop"},
      {"omega", "Omega"},
      {"pi", "Pi"},
      {"omega_x_pi", "Omega x Pi"},
      {"constant", "Constant"}};

  const std::vector<Observation> t1_obs =
      table_window(all_obs, cfg.interval_anchor, cfg.table1_end_year, cfg.delta);
  if (!t1_obs.empty()) {
    try {
      const std::vector<RegressionFit> fits = run_table1_suite(t1_obs);
      write_fits_csv(cfg, "table1.csv", fits);
      write_fits_summary_csv(cfg, "table1_summary.csv", fits);
      write_text(path_in(cfg, "table1.txt"),
                 render_table("Average relative density of newly developed products", fits,
                              {"eci", "eci_sq", "ln_gdp", "ln_gdp_sq", "human_capital",
                               "human_capital_sq", "ln_capital_stock", "constant"},
                              labels));
      files.insert(files.end(), {"table1.csv", "table1_summary.csv", "table1.txt"});
    } catch (const std::exception& e) {
      write_text(path_in(cfg, "table1_error.txt"), std::string(e.what()) + "\n");
      files.push_back("table1_error.txt");
    }
  }

  const std::vector<Observation> t2_obs =
      table_window(all_obs, cfg.interval_anchor, cfg.table2_end_year, cfg.delta);
  bool have_growth = false;
  for (const auto& o : t2_obs)
    if (std::isfinite(o.growth)) have_growth = true;
  if (have_growth) {
    try {
      const GrowthSuiteResult suite = run_table2_suite(t2_obs);
      write_fits_csv(cfg, "table2.csv", suite.models);
      write_fits_summary_csv(cfg, "table2_summary.csv", suite.models);
      write_text(path_in(cfg, "table2.txt"),
                 render_table("GDP per capita annualized growth", suite.models,
                              {"omega", "pi", "eci", "ln_gdp", "ln_pop", "human_capital",
                               "ln_capital_stock", "constant"},
                              labels));
      write_fits_csv(cfg, "interaction_model.csv", {suite.interaction_model});
      {
        json j;
        j["f_stat"] = jnum(suite.interaction_f_stat);
        j["p_value"] = jnum(suite.interaction_f_p);
        j["n_obs"] = suite.n_obs;
        write_text(path_in(cfg, "ftest.json"), j.dump(2) + "\n");
      }
      {
        // Variance inflation factors per growth model
        csv::Writer w(path_in(cfg, "vif.csv"));
        w.header({"model", "term", "vif"});
        for (std::size_t m = 0; m < suite.models.size(); ++m) {
          const RegressionFit& fit = suite.models[m];
          for (std::size_t j = 0; j < fit.coefficients.size(); ++j) {
            if (fit.vif.empty() || std::isnan(fit.vif[j])) continue;
            w.field(static_cast<long long>(m + 1));
            w.field(fit.coefficients[j].name);
            w.field(r12(fit.vif[j]));
            w.end_row();
          }
        }
      }
      files.insert(files.end(), {"table2.csv", "table2_summary.csv", "table2.txt",
                                 "interaction_model.csv", "ftest.json", "vif.csv"});
    } catch (const std::exception& e) {
      write_text(path_in(cfg, "table2_error.txt"), std::string(e.what()) + "\n");
      files.push_back("table2_error.txt");
    }
  }

  // U-shape fits of omega against development (third-order polynomial)
  auto write_cubic = [&](const std::string& name, auto getter) {
    std::vector<double> x, y;
    for (const auto& o : t1_obs) {
      x.push_back(getter(o));
      y.push_back(o.omega);
    }
    json j;
    if (x.size() >= 5) {
      try {
        const CubicFit fit = cubic_minimum_fit(x, y);
        j["coefficients"] = {jnum(fit.coefficients[0]), jnum(fit.coefficients[1]),
                             jnum(fit.coefficients[2]), jnum(fit.coefficients[3])};
        j["interior"] = fit.interior;
        j["argmin"] = jnum(fit.argmin);
        j["fitted_min"] = jnum(fit.fitted_min);
        j["x_lo"] = jnum(fit.x_lo);
        j["x_hi"] = jnum(fit.x_hi);
        j["n_obs"] = x.size();
      } catch (const std::exception& e) {
        j["error"] = e.what();
      }
    } else {
      j["error"] = "fewer than 5 observations";
    }
    write_text(path_in(cfg, name), j.dump(2) + "\n");
    files.push_back(name);
  };
  write_cubic("cubic_fit_eci.json", [](const Observation& o) { return o.eci; });
  write_cubic("cubic_fit_ln_gdp.json", [](const Observation& o) { return o.ln_gdp; });

  if (!cfg.delta_sweep.empty()) {
    const auto build = [&](int delta) {
      const JumpAnalysis sweep = analyze_jumps(ws, cfg, delta);
      const std::vector<Observation> obs = build_observations(ws, cfg, sweep.directions, delta);
      return table_window(obs, cfg.interval_anchor, cfg.table2_end_year, delta);
    };
    csv::Writer w(path_in(cfg, "delta_robustness.csv"));
    w.header({"delta", "n_obs", "alpha1_base", "se_base", "p_base", "alpha1_controls",
              "se_controls", "p_controls"});
    for (const auto& row : delta_robustness(cfg.delta_sweep, build)) {
      w.field(row.delta);
      w.field(row.n_obs);
      w.field(r12(row.alpha1_base));
      w.field(r12(row.se_base));
      w.field(r12(row.p_base));
      w.field(r12(row.alpha1_controls));
      w.field(r12(row.se_controls));
      w.field(r12(row.p_controls));
      w.end_row();
    }
    files.push_back("delta_robustness.csv");
  }
  return files;
}

void ingest_impl(const RunConfig& cfg) {
  if (cfg.trade_csv.empty() || cfg.covariates_csv.empty())
    throw std::runtime_error("ingest: trade_csv and covariates_csv must be configured");
  if (!fs::exists(cfg.trade_csv))
    throw std::runtime_error("ingest: trade file '" + cfg.trade_csv + "' does not exist");
  if (!fs::exists(cfg.covariates_csv))
    throw std::runtime_error("ingest: covariates file '" + cfg.covariates_csv +
                             "' does not exist");
  LoadReport trade_rep, cov_rep;
  const std::vector<ExportRecord> records =
      load_trade_csv(cfg.trade_csv, cfg.trade_schema, &trade_rep);
  const CovariateTable covariates = load_covariates_csv(cfg.covariates_csv, &cov_rep);
  FilterReport filt;
  const TradePanel panel = apply_filters(records, covariates, cfg.filters, &filt);
  write_panel_artifacts(cfg, panel, filt, trade_rep, cov_rep);
  update_manifest(cfg, {"panel.csv", "panel_meta.json", "covariates.csv", "summary.csv"});
}

}  // namespace

void run_ingest(const RunConfig& cfg) {
  cfg.validate();
  ingest_impl(cfg);
}

void run_complexity(const RunConfig& cfg) {
  cfg.validate();
  const Workspace ws = make_workspace(cfg, load_panel_artifacts(cfg));
  update_manifest(cfg, complexity_core(cfg, ws));
}

void run_proximity(const RunConfig& cfg) {
  cfg.validate();
  const Workspace ws = make_workspace(cfg, load_panel_artifacts(cfg));
  update_manifest(cfg, proximity_core(cfg, ws));
}

void run_jumps(const RunConfig& cfg) {
  cfg.validate();
  const Workspace ws = make_workspace(cfg, load_panel_artifacts(cfg));
  const JumpAnalysis ja = analyze_jumps(ws, cfg, cfg.delta);
  update_manifest(cfg, jumps_core(cfg, ws, ja));
}

void run_directions(const RunConfig& cfg) {
  cfg.validate();
  const Workspace ws = make_workspace(cfg, load_panel_artifacts(cfg));
  const JumpAnalysis ja = analyze_jumps(ws, cfg, cfg.delta);
  update_manifest(cfg, directions_core(cfg, ja));
}

void run_stages(const RunConfig& cfg) {
  cfg.validate();
  const Workspace ws = make_workspace(cfg, load_panel_artifacts(cfg));
  const JumpAnalysis ja = analyze_jumps(ws, cfg, cfg.delta);
  const StageData sd = compute_stage_profiles(cfg, ws);
  update_manifest(cfg, stages_core(cfg, ws, ja, sd));
}

void run_regress(const RunConfig& cfg) {
  cfg.validate();
  const Workspace ws = make_workspace(cfg, load_panel_artifacts(cfg));
  const JumpAnalysis ja = analyze_jumps(ws, cfg, cfg.delta);
  update_manifest(cfg, regress_core(cfg, ws, ja));
}

void run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  auto stage = [](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("pipeline stage '") + name + "' failed: " + e.what());
    }
  };

  stage("ingest", [&] { ingest_impl(cfg); });

  // recompute from the persisted panel so a full pipeline run and a
  // stage-by-stage run quantize identically
  Workspace ws;
  stage("load", [&] { ws = make_workspace(cfg, load_panel_artifacts(cfg)); });

  std::vector<std::string> files;
  auto collect = [&files](std::vector<std::string> stage_files) {
    files.insert(files.end(), stage_files.begin(), stage_files.end());
  };
  stage("complexity", [&] { collect(complexity_core(cfg, ws)); });
  stage("proximity", [&] { collect(proximity_core(cfg, ws)); });
  JumpAnalysis ja;
  stage("jumps", [&] {
    ja = analyze_jumps(ws, cfg, cfg.delta);
    collect(jumps_core(cfg, ws, ja));
  });
  stage("directions", [&] { collect(directions_core(cfg, ja)); });
  stage("stages", [&] {
    const StageData sd = compute_stage_profiles(cfg, ws);
    collect(stages_core(cfg, ws, ja, sd));
  });
  stage("regress", [&] { collect(regress_core(cfg, ws, ja)); });
  update_manifest(cfg, files);
}

std::string run_report(const std::string& artifact_dir) {
  const fs::path dir(artifact_dir);
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path))
    throw std::runtime_error("report: no manifest.json in '" + artifact_dir + "'");
  json manifest;
  {
    std::ifstream in(manifest_path);
    in >> manifest;
  }

  // integrity first: every manifest entry must hash to its recorded value
  for (const auto& [name, entry] : manifest["files"].items()) {
    const fs::path full = dir / name;
    if (!fs::exists(full))
      throw std::runtime_error("report: manifest file '" + name + "' is missing");
    const std::string digest = Sha256::of_file(full.string());
    if (digest != entry["sha256"].get<std::string>())
      throw std::runtime_error("report: integrity error, '" + name +
                               "' does not match its manifest hash");
  }

  std::ostringstream out;
  out << "Export diversification analysis report\n";
  out << "=======================================\n\n";

  auto have = [&](const std::string& name) {
    return manifest["files"].contains(name) && fs::exists(dir / name);
  };
  auto load_json = [&](const std::string& name) {
    json j;
    std::ifstream in(dir / name);
    in >> j;
    return j;
  };

  if (have("summary.csv")) {
    const csv::Table t = csv::read_file((dir / "summary.csv").string());
    out << "Panel: " << t.rows.size() << " years";
    if (!t.rows.empty())
      out << " (" << t.rows.front()[0] << "-" << t.rows.back()[0] << ")";
    out << "\n\n";
  } else {
    out << "[missing: ingest summary not found]\n\n";
  }

  out << "Development directions\n----------------------\n";
  if (have("direction_stats.json")) {
    const json st = load_json("direction_stats.json");
    auto num = [&](const char* key) {
      return st.contains(key) && !st[key].is_null() ? st[key].get<double>()
                                                    : std::numeric_limits<double>::quiet_NaN();
    };
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "Share of intervals moving toward related products (Omega > 0): %.1f%%\n",
                  100.0 * num("share_omega_positive"));
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "Mean Omega: %.3f (pooled), %.3f (per-year)\nMean Pi:    %.3f (pooled), %.3f "
                  "(per-year)\n",
                  num("mean_omega"), num("mean_omega_by_year"), num("mean_pi"),
                  num("mean_pi_by_year"));
    out << buf;
    std::snprintf(buf, sizeof(buf), "Pooled slope of Pi on Omega: %.3f (se %.3f)\n",
                  num("pooled_slope"), num("pooled_slope_se"));
    out << buf;
    out << "Direction vectors: " << st["n"].get<std::size_t>() << "\n";
    if (have("direction_hist.csv")) {
      const csv::Table t = csv::read_file((dir / "direction_hist.csv").string());
      const std::size_t comp = t.column("component");
      const std::size_t lo = t.column("bin_lo");
      const std::size_t hi = t.column("bin_hi");
      const std::size_t cnt = t.column("count");
      std::size_t peak = 1;
      for (const auto& row : t.rows)
        peak = std::max(peak, static_cast<std::size_t>(std::stoll(row[cnt])));
      for (const char* name : {"omega", "pi"}) {
        out << "\n" << (name[0] == 'o' ? "Omega" : "Pi") << " distribution:\n";
        for (const auto& row : t.rows) {
          if (row[comp] != name) continue;
          const auto n = static_cast<std::size_t>(std::stoll(row[cnt]));
          if (n == 0) continue;
          std::snprintf(buf, sizeof(buf), "  [%7.3f, %7.3f) %5zu ", std::stod(row[lo]),
                        std::stod(row[hi]), n);
          out << buf << std::string(std::max<std::size_t>(1, 40 * n / peak), '#') << "\n";
        }
      }
    }
  } else {
    out << "[missing: direction statistics not found]\n";
  }
  out << "\n";

  out << "Stages\n------\n";
  if (have("stages.csv") && have("rho_cuts.json")) {
    const json cuts = load_json("rho_cuts.json");
    const csv::Table t = csv::read_file((dir / "stages.csv").string());
    std::size_t counts[4] = {0, 0, 0, 0};
    const std::size_t scol = t.column("stage");
    for (const auto& row : t.rows) {
      const int s = std::stoi(row[scol]);
      if (s >= 1 && s <= 3) ++counts[s];
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "rho cuts: low %.3f, high %.3f (%s)\nstage 1: %zu, stage 2: %zu, stage 3: %zu "
                  "country-years\n",
                  cuts["low"].get<double>(), cuts["high"].get<double>(),
                  cuts["source"].get<std::string>().c_str(), counts[1], counts[2], counts[3]);
    out << buf;
    if (have("ks_report.json")) {
      const json ks = load_json("ks_report.json");
      for (const auto& [key, entry] : ks["omega_ks"].items()) {
        if (entry.is_null()) continue;
        std::snprintf(buf, sizeof(buf), "KS %s: D = %.3f, p = %.3g\n", key.c_str(),
                      entry["d"].get<double>(), entry["p_value"].get<double>());
        out << buf;
      }
    }
  } else {
    out << "[missing: stage artifacts not found]\n";
  }
  out << "\n";

  out << "Growth regressions\n------------------\n";
  if (have("table1.txt")) {
    std::ifstream in(dir / "table1.txt");
    out << in.rdbuf() << "\n";
  } else {
    out << "[missing: direction-level regression table not found]\n\n";
  }
  if (have("table2.txt")) {
    std::ifstream in(dir / "table2.txt");
    out << in.rdbuf() << "\n";
  } else {
    out << "[missing: growth regression table not found]\n\n";
  }
  if (have("ftest.json")) {
    const json f = load_json("ftest.json");
    char buf[120];
    std::snprintf(buf, sizeof(buf), "Interaction term F test: F = %.4f, p = %.3g\n",
                  f["f_stat"].get<double>(), f["p_value"].get<double>());
    out << buf;
  }
  if (have("cubic_fit_eci.json")) {
    const json c = load_json("cubic_fit_eci.json");
    if (c.contains("argmin") && !c["argmin"].is_null()) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "Cubic fit of Omega on ECI: %s minimum at ECI = %.3f\n",
                    c["interior"].get<bool>() ? "interior" : "boundary",
                    c["argmin"].get<double>());
      out << buf;
    }
  }

  const std::string text = out.str();
  write_text((dir / "report.txt").string(), text);
  return text;
}

}  // namespace ecomplex
