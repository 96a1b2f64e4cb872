#pragma once

// Deterministic synthetic worlds shared by the unit, pipeline and
// acceptance tests: random panels, random advantage structures and a small
// on-disk trade fixture for end-to-end CLI runs.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ecomplex/complexity.hpp"
#include "ecomplex/matrix.hpp"
#include "ecomplex/panel.hpp"
#include "ecomplex/rng.hpp"
#include "support/oracles.hpp"

namespace fixture {

// Random positive trade panel over one or more years. Every country trades
// something each year; values are lognormal-ish with persistent structure.
inline ecomplex::TradePanel random_panel(std::uint64_t seed, std::size_t nc, std::size_t np,
                                         std::vector<int> years) {
  ecomplex::Rng rng(seed);
  ecomplex::TradePanel panel;
  for (std::size_t c = 0; c < nc; ++c) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "C%02u", static_cast<unsigned>(c));
    panel.countries.push_back(buf);
  }
  for (std::size_t p = 0; p < np; ++p) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%04u", static_cast<unsigned>(p));
    panel.products.push_back(buf);
  }
  panel.years = std::move(years);

  // persistent per-cell base level plus per-year jitter
  ecomplex::Matrix base(nc, np);
  for (double& v : base.data()) v = std::exp(rng.normal(0.0, 1.5));
  for (std::size_t y = 0; y < panel.years.size(); ++y) {
    ecomplex::Matrix m(nc, np);
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t p = 0; p < np; ++p)
        m(c, p) = base(c, p) * std::exp(rng.normal(0.0, 0.2)) * 1e6;
    panel.values.push_back(std::move(m));
  }
  return panel;
}

// Random binary advantage matrix with no zero rows/columns. Entries follow
// a noisy nested structure (country capability minus product difficulty),
// the shape real advantage matrices have; it keeps the second eigenvalue
// of the complexity operator well separated from the bulk.
inline ecomplex::AdvantageMatrix random_advantage(std::uint64_t seed, std::size_t nc,
                                                  std::size_t np, int year = 2000) {
  ecomplex::Rng rng(seed);
  while (true) {
    std::vector<double> capability(nc), difficulty(np);
    for (double& a : capability) a = rng.uniform(-2.5, 2.5);
    for (double& b : difficulty) b = rng.uniform(-2.5, 2.5);
    ecomplex::Matrix r(nc, np);
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t p = 0; p < np; ++p) {
        const double logit = capability[c] - difficulty[p] + rng.normal(0.0, 0.35);
        const double prob = 1.0 / (1.0 + std::exp(-logit));
        r(c, p) = rng.bernoulli(prob) ? 1.0 + rng.uniform() : rng.uniform();
      }
    ecomplex::AdvantageMatrix adv = ecomplex::AdvantageMatrix::from_rca(
        year, std::vector<std::string>(nc, ""), std::vector<std::string>(np, ""), std::move(r));
    for (std::size_t c = 0; c < nc; ++c) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "C%02u", static_cast<unsigned>(c));
      adv.countries[c] = buf;
    }
    for (std::size_t p = 0; p < np; ++p) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%04u", static_cast<unsigned>(p));
      adv.products[p] = buf;
    }
    bool ok = true;
    for (double k : adv.diversity)
      if (k < 2) ok = false;
    for (double k : adv.ubiquity)
      if (k < 1) ok = false;
    if (ok) {
      // resample near-degenerate spectra: with lambda_2 ~ lambda_3 the
      // second eigenvector is ill-conditioned and no method pins it down
      const auto d = oracles::jacobi_eigen(oracles::country_operator(adv));
      if (d.values[2] <= 0.82 * d.values[1]) return adv;
    }
    seed = rng.next_u64();
  }
}

// ------------------------------------------------------------ CLI fixture --

struct FixtureSpec {
  std::uint64_t seed = 20240001;
  std::size_t n_countries = 30;
  std::size_t n_products = 40;
  int year_start = 1990;
  int year_end = 2009;
  int reference_year = 2005;
  int n_plants = 160;
};

// Writes trade.csv, covariates.csv and run.cfg under dir. The synthetic
// world has persistent trade structure, planted product entries and a pair
// of countries that the size filters should remove.
inline void write_cli_fixture(const std::string& dir, const FixtureSpec& spec = {}) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  ecomplex::Rng rng(spec.seed);

  const std::size_t nc = spec.n_countries;
  const std::size_t np = spec.n_products;
  const int ny = spec.year_end - spec.year_start + 1;

  std::vector<std::string> countries(nc), products(np);
  for (std::size_t c = 0; c < nc; ++c) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "C%02u", static_cast<unsigned>(c));
    countries[c] = buf;
  }
  for (std::size_t p = 0; p < np; ++p) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%04u", static_cast<unsigned>(p + 100));
    products[p] = buf;
  }

  // per-cell log level with a slow random walk; planted entries switch a
  // low cell to a high one at a known year
  ecomplex::Matrix level(nc, np);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t p = 0; p < np; ++p) level(c, p) = rng.normal(17.0, 1.6);

  struct Plant {
    std::size_t c, p;
    int switch_year;
  };
  std::vector<Plant> plants;
  for (int k = 0; k < spec.n_plants; ++k) {
    Plant plant;
    plant.c = rng.index(nc);
    plant.p = rng.index(np);
    plant.switch_year = spec.year_start + 6 + static_cast<int>(rng.index(ny - 12));
    plants.push_back(plant);
    level(plant.c, plant.p) = 14.0 + rng.normal(0.0, 0.3);  // start low
  }

  std::ofstream trade(fs::path(dir) / "trade.csv");
  trade << "year,country,product,value\n";
  char buf[64];
  for (int y = spec.year_start; y <= spec.year_end; ++y) {
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t p = 0; p < np; ++p) {
        double lv = level(c, p);
        for (const auto& plant : plants)
          if (plant.c == c && plant.p == p && y >= plant.switch_year) lv += 4.2;
        const double value = std::exp(lv + rng.normal(0.0, 0.15));
        std::snprintf(buf, sizeof(buf), "%.6g", value);
        trade << y << ',' << countries[c] << ',' << products[p] << ',' << buf << '\n';
      }
    // the level drifts slowly so advantage patterns persist
    for (double& v : level.data()) v += rng.normal(0.0, 0.05);
  }
  trade.close();

  std::ofstream cov(fs::path(dir) / "covariates.csv");
  cov << "country,year,population,gdp_pc,human_capital,capital_stock_per_worker,employment\n";
  for (std::size_t c = 0; c < nc; ++c) {
    // last two countries are city-sized; the population filter drops them
    const double pop0 = c + 2 == nc   ? 0.8e6
                        : c + 1 == nc ? 1.0e6
                                      : 2e6 + 80e6 * rng.uniform();
    double gdp = 2000.0 + 40000.0 * rng.uniform();
    const double hc0 = 1.4 + 1.6 * rng.uniform();
    double stock = 2e4 + 2e5 * rng.uniform();
    for (int y = spec.year_start; y <= spec.year_end; ++y) {
      const double t = y - spec.year_start;
      const double pop = pop0 * std::pow(1.01, t);
      gdp *= 1.0 + rng.normal(0.02, 0.03);
      stock *= 1.0 + rng.normal(0.015, 0.02);
      const double hc = hc0 + 0.01 * t;
      std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.4f,%.6g,%.6g", pop, gdp, hc, stock,
                    pop * 0.45);
      cov << countries[c] << ',' << y << ',' << buf << '\n';
    }
  }
  cov.close();

  std::ofstream cfg(fs::path(dir) / "run.cfg");
  cfg << "# synthetic fixture configuration\n";
  cfg << "trade_csv = " << (fs::path(dir) / "trade.csv").string() << "\n";
  cfg << "covariates_csv = " << (fs::path(dir) / "covariates.csv").string() << "\n";
  cfg << "out_dir = " << (fs::path(dir) / "out").string() << "\n";
  cfg << "year_start = " << spec.year_start << "\n";
  cfg << "year_end = " << spec.year_end << "\n";
  cfg << "reference_year = " << spec.reference_year << "\n";
  cfg << "min_population = 1200000\n";
  cfg << "min_total_trade = 1e9\n";
  cfg << "min_flow = 5000\n";
  cfg << "interval_anchor = " << spec.year_start << "\n";
  cfg << "delta = 2\n";
  cfg << "table1_end_year = " << spec.year_end << "\n";
  cfg << "table2_end_year = " << spec.year_end << "\n";
  cfg << "hist_bins = 20\n";
  cfg << "sigmoid_bins = 10\n";
  cfg << "delta_sweep = 2,3\n";
  cfg << "seed = " << spec.seed << "\n";
}

}  // namespace fixture
