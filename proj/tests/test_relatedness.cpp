#include "doctest.h"

#include <cmath>

#include "ecomplex/complexity.hpp"
#include "ecomplex/product_space.hpp"
#include "ecomplex/relatedness.hpp"
#include "ecomplex/rng.hpp"
#include "support/fixture.hpp"
#include "support/oracles.hpp"

using namespace ecomplex;

namespace {

struct Setup {
  AdvantageMatrix adv;
  ProximityMatrix prox;
  DensityMatrix dens;
  ComplexityScores scores;
};

Setup make_setup(std::uint64_t seed, std::size_t nc = 12, std::size_t np = 20) {
  Setup s{fixture::random_advantage(seed, nc, np), {}, {}, {}};
  s.prox = compute_proximity(s.adv);
  s.dens = compute_density(s.adv, s.prox);
  s.scores = compute_eci_pci(s.adv);
  return s;
}

}  // namespace

TEST_SUITE("relatedness") {

TEST_CASE("option set is the exact complement of the basket") {
  const Setup s = make_setup(1);
  for (std::size_t c = 0; c < s.adv.m.rows(); ++c) {
    const OptionSet set = option_set(s.adv, s.dens, s.scores.pci, c);
    std::size_t in_basket = 0;
    for (std::size_t p = 0; p < s.adv.m.cols(); ++p)
      if (s.adv.rca(c, p) >= 1.0) ++in_basket;
    CHECK(set.products.size() + in_basket == s.adv.m.cols());
    for (std::size_t p : set.products) CHECK(s.adv.rca(c, p) < 1.0);
  }
}

TEST_CASE("option set moments use the population standard deviation") {
  // three option-set products with omegas {0.1, 0.2, 0.3}
  Matrix r(2, 4);
  r(0, 0) = 2.0;  // basket
  r(1, 0) = 2.0;
  r(1, 1) = 2.0;
  r(1, 2) = 2.0;
  r(1, 3) = 2.0;
  AdvantageMatrix adv = AdvantageMatrix::from_rca(
      2000, {"A", "B"}, {"P0", "P1", "P2", "P3"}, std::move(r));
  DensityMatrix dens;
  dens.year = 2000;
  dens.countries = adv.countries;
  dens.products = adv.products;
  dens.omega = Matrix(2, 4);
  dens.omega(0, 1) = 0.1;
  dens.omega(0, 2) = 0.2;
  dens.omega(0, 3) = 0.3;
  const std::vector<double> pci = {0.0, -1.0, 0.0, 1.0};
  const OptionSet set = option_set(adv, dens, pci, 0);
  REQUIRE(set.products.size() == 3);
  CHECK(set.mean_omega == doctest::Approx(0.2));
  CHECK(set.sd_omega == doctest::Approx(std::sqrt(0.02 / 3.0)));
  CHECK(set.mean_pci == doctest::Approx(0.0));

  // product with omega 0.3: z-score (0.3 - 0.2) / 0.0816
  const RelativeMetric m = relative_density(dens, set, 3);
  CHECK(m.value == doctest::Approx(1.2247448714).epsilon(1e-9));
  CHECK_FALSE(m.degenerate);
  // PCI of product 3 is 1: (1 - 0) / sd({-1,0,1})
  const RelativeMetric pm = relative_complexity(pci, set, 3);
  CHECK(pm.value == doctest::Approx(1.0 / 0.81649658092).epsilon(1e-9));
}

TEST_CASE("empty option set is an error") {
  Matrix r(2, 2, 2.0);  // both countries export everything
  AdvantageMatrix adv =
      AdvantageMatrix::from_rca(2000, {"A", "B"}, {"P0", "P1"}, std::move(r));
  DensityMatrix dens;
  dens.omega = Matrix(2, 2, 1.0);
  dens.countries = adv.countries;
  dens.products = adv.products;
  CHECK_THROWS(option_set(adv, dens, {0.0, 0.0}, 0));
}

TEST_CASE("product at the option-set mean maps to zero") {
  const Setup s = make_setup(2);
  const OptionSet set = option_set(s.adv, s.dens, s.scores.pci, 0);
  REQUIRE(set.products.size() >= 2);
  // synthetic product exactly at the mean: borrow a real entry and shift
  DensityMatrix shifted = s.dens;
  shifted.omega(0, set.products[0]) = set.mean_omega;
  OptionSet set2 = set;  // same moments, evaluation only
  const RelativeMetric m = relative_density(shifted, set2, set.products[0]);
  CHECK(m.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("constant option set degenerates to zero with a flag") {
  Matrix r(2, 4);
  r(0, 0) = 2.0;
  for (std::size_t p = 0; p < 4; ++p) r(1, p) = 2.0;
  AdvantageMatrix adv = AdvantageMatrix::from_rca(
      2000, {"A", "B"}, {"P0", "P1", "P2", "P3"}, std::move(r));
  DensityMatrix dens;
  dens.countries = adv.countries;
  dens.products = adv.products;
  dens.omega = Matrix(2, 4, 0.25);  // identical densities
  const std::vector<double> pci = {0.0, 0.5, 0.5, 0.5};
  const OptionSet set = option_set(adv, dens, pci, 0);
  const RelativeMetric m = relative_density(dens, set, 1);
  CHECK(m.value == 0.0);
  CHECK(m.degenerate);
  const RelativeMetric pm = relative_complexity(pci, set, 1);
  CHECK(pm.value == 0.0);
  CHECK(pm.degenerate);
}

TEST_CASE("single-product option set has undefined variance, flagged") {
  Matrix r(2, 3);
  r(0, 0) = 2.0;
  r(0, 1) = 2.0;  // country 0 exports all but product 2
  for (std::size_t p = 0; p < 3; ++p) r(1, p) = 2.0;
  AdvantageMatrix adv =
      AdvantageMatrix::from_rca(2000, {"A", "B"}, {"P0", "P1", "P2"}, std::move(r));
  DensityMatrix dens;
  dens.countries = adv.countries;
  dens.products = adv.products;
  dens.omega = Matrix(2, 3, 0.6);
  const std::vector<double> pci = {0.1, 0.2, 0.3};
  const OptionSet set = option_set(adv, dens, pci, 0);
  REQUIRE(set.products.size() == 1);
  CHECK(set.sd_omega == 0.0);
  const RelativeMetric m = relative_complexity(pci, set, 2);
  CHECK(m.value == 0.0);
  CHECK(m.degenerate);
}

TEST_CASE("relative metrics require membership in the option set") {
  const Setup s = make_setup(3);
  const OptionSet set = option_set(s.adv, s.dens, s.scores.pci, 0);
  // find a basket product
  for (std::size_t p = 0; p < s.adv.m.cols(); ++p)
    if (s.adv.rca(0, p) >= 1.0) {
      CHECK_THROWS(relative_density(s.dens, set, p));
      break;
    }
}

TEST_CASE("z-scores over the full option set have mean 0 and population sd 1") {
  for (std::uint64_t seed : {4u, 5u, 6u}) {
    const Setup s = make_setup(seed, 14, 24);
    for (std::size_t c = 0; c < s.adv.m.rows(); ++c) {
      const OptionSet set = option_set(s.adv, s.dens, s.scores.pci, c);
      if (set.sd_omega <= 0 || set.sd_pci <= 0 || set.products.size() < 2) continue;
      std::vector<double> zo, zp;
      for (std::size_t p : set.products) {
        zo.push_back(relative_density(s.dens, set, p).value);
        zp.push_back(relative_complexity(s.scores.pci, set, p).value);
      }
      CHECK(std::fabs(oracles::mean(zo)) <= 1e-9);
      CHECK(std::fabs(oracles::population_sd(zo) - 1.0) <= 1e-9);
      CHECK(std::fabs(oracles::mean(zp)) <= 1e-9);
      CHECK(std::fabs(oracles::population_sd(zp) - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("relative density is invariant under positive affine maps of the densities") {
  const Setup s = make_setup(7);
  const OptionSet set = option_set(s.adv, s.dens, s.scores.pci, 2);
  REQUIRE(set.sd_omega > 0);
  DensityMatrix scaled = s.dens;
  for (double& v : scaled.omega.data()) v = 3.7 * v + 0.25;
  const OptionSet set2 = option_set(s.adv, scaled, s.scores.pci, 2);
  for (std::size_t p : set.products) {
    const double a = relative_density(s.dens, set, p).value;
    const double b = relative_density(scaled, set2, p).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
  }
}

TEST_CASE("development direction is the mean of the entered products") {
  const DirectionVector single = development_direction("KOR", 1994, 1996, {{0.8, -0.3}});
  CHECK(single.omega_bar == doctest::Approx(0.8));
  CHECK(single.pci_bar == doctest::Approx(-0.3));
  CHECK(single.n_jumps == 1);

  const DirectionVector pair =
      development_direction("KOR", 1994, 1996, {{1.0, 0.0}, {0.0, 1.0}});
  CHECK(pair.omega_bar == doctest::Approx(0.5));
  CHECK(pair.pci_bar == doctest::Approx(0.5));

  CHECK_THROWS(development_direction("KOR", 1994, 1996, {}));
}

TEST_CASE("development direction equals a brute-force mean and ignores order") {
  Rng rng(8);
  std::vector<std::pair<double, double>> metrics;
  for (int i = 0; i < 17; ++i) metrics.emplace_back(rng.normal(), rng.normal());
  const DirectionVector v = development_direction("CHL", 1989, 1991, metrics);
  double so = 0.0, sp = 0.0;
  for (const auto& [o, p] : metrics) {
    so += o;
    sp += p;
  }
  CHECK(v.omega_bar == doctest::Approx(so / 17.0));
  CHECK(v.pci_bar == doctest::Approx(sp / 17.0));

  std::reverse(metrics.begin(), metrics.end());
  const DirectionVector rev = development_direction("CHL", 1989, 1991, metrics);
  CHECK(rev.omega_bar == doctest::Approx(v.omega_bar));
  CHECK(rev.pci_bar == doctest::Approx(v.pci_bar));
}

TEST_CASE("direction statistics: share of positive relatedness") {
  std::vector<DirectionVector> vectors;
  for (int i = 0; i < 10; ++i)
    vectors.push_back({"C" + std::to_string(i), 2000, 2002, 0.5 + i * 0.1, -0.2, 1});
  const DirectionStatistics st = direction_statistics(vectors, 10);
  CHECK(st.share_omega_positive == doctest::Approx(1.0));
  CHECK(st.n == 10);
}

TEST_CASE("direction statistics recover an exact line Pi = -Omega") {
  Rng rng(9);
  std::vector<DirectionVector> vectors;
  for (int i = 0; i < 30; ++i) {
    const double omega = rng.normal();
    vectors.push_back({"C" + std::to_string(i % 6), 2000 + 2 * (i / 6), 2002 + 2 * (i / 6),
                       omega, -omega, 2});
  }
  const DirectionStatistics st = direction_statistics(vectors, 10);
  CHECK(st.pooled_slope == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(st.pooled_r2 == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& pt : st.slope_by_interval) CHECK(pt.slope == doctest::Approx(-1.0));
}

TEST_CASE("direction statistics on an empty input throw") {
  CHECK_THROWS(direction_statistics({}, 10));
}

TEST_CASE("per-year and pooled means differ under unbalanced intervals") {
  std::vector<DirectionVector> vectors;
  // year 2000: nine vectors at 1.0; year 2002: one vector at 0.0
  for (int i = 0; i < 9; ++i)
    vectors.push_back({"C" + std::to_string(i), 2000, 2002, 1.0, 0.0, 1});
  vectors.push_back({"C9", 2002, 2004, 0.0, 0.0, 1});
  const DirectionStatistics st = direction_statistics(vectors, 5);
  CHECK(st.mean_omega == doctest::Approx(0.9));
  CHECK(st.mean_omega_by_year == doctest::Approx(0.5));
}

}  // TEST_SUITE
