#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "ecomplex/rng.hpp"
#include "ecomplex/stages.hpp"
#include "ecomplex/stats.hpp"
#include "support/oracles.hpp"

using namespace ecomplex;

TEST_SUITE("stages") {

TEST_CASE("perfectly aligned and perfectly opposed option sets") {
  std::vector<double> omega = {0.1, 0.4, 0.7, 0.9};
  CHECK(option_set_correlation(omega, omega).rho == doctest::Approx(1.0));
  std::vector<double> neg(omega);
  for (double& v : neg) v = -v;
  CHECK(option_set_correlation(omega, neg).rho == doctest::Approx(-1.0));
}

TEST_CASE("rho matches the covariance-formula oracle to 1e-12") {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng.index(40);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal();
      y[i] = 0.4 * x[i] + rng.normal();
    }
    const RhoResult r = option_set_correlation(x, y);
    REQUIRE(r.defined);
    CHECK(std::fabs(r.rho - oracles::pearson(y, x)) <= 1e-12);
  }
}

TEST_CASE("rho is invariant under positive-scale affine transforms") {
  Rng rng(11);
  std::vector<double> x(20), y(20);
  for (std::size_t i = 0; i < 20; ++i) {
    x[i] = rng.normal();
    y[i] = rng.normal();
  }
  const double base = option_set_correlation(x, y).rho;
  std::vector<double> xs(x), ys(y);
  for (double& v : xs) v = 2.5 * v + 7.0;
  for (double& v : ys) v = 0.3 * v - 4.0;
  CHECK(option_set_correlation(xs, ys).rho == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("rho preconditions and degeneracy") {
  CHECK_THROWS(option_set_correlation({1.0, 2.0}, {1.0, 2.0}));  // size < 3
  const RhoResult flat = option_set_correlation({1.0, 1.0, 1.0}, {0.1, 0.2, 0.3});
  CHECK_FALSE(flat.defined);
}

TEST_CASE("stage classification uses closed boundaries") {
  CHECK(classify_stage(-0.6, -0.3, 0.3) == 1);
  CHECK(classify_stage(0.5, -0.3, 0.3) == 3);
  CHECK(classify_stage(0.0, -0.3, 0.3) == 2);
  CHECK(classify_stage(-0.3, -0.3, 0.3) == 1);  // rho <= low
  CHECK(classify_stage(0.3, -0.3, 0.3) == 3);   // rho >= high
  CHECK_THROWS(classify_stage(0.0, 0.5, -0.5));
}

TEST_CASE("every defined rho lands in exactly one stage") {
  Rng rng(12);
  std::vector<double> pool;
  for (int i = 0; i < 200; ++i) pool.push_back(rng.uniform(-1.0, 1.0));
  const auto [low, high] = tercile_cuts(pool);
  CHECK(low <= high);
  std::size_t counts[4] = {0, 0, 0, 0};
  for (double rho : pool) ++counts[classify_stage(rho, low, high)];
  CHECK(counts[1] + counts[2] + counts[3] == pool.size());
  CHECK(counts[1] > 0);
  CHECK(counts[2] > 0);
  CHECK(counts[3] > 0);
}

TEST_CASE("identical samples give KS D = 0, disjoint supports give D = 1") {
  const std::vector<double> a = {1.0, 2.0, 3.0};
  CHECK(ks_two_sample(a, a).d == doctest::Approx(0.0));
  const KsResult disjoint = ks_two_sample({1.0, 2.0, 3.0}, {4.0, 5.0, 6.0});
  CHECK(disjoint.d == doctest::Approx(1.0));
  CHECK(disjoint.p_value < 0.2);
  CHECK_THROWS(ks_two_sample({}, {1.0}));
}

TEST_CASE("KS D equals the brute-force ECDF scan exactly") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n1 = 2 + rng.index(60);
    const std::size_t n2 = 2 + rng.index(60);
    std::vector<double> a(n1), b(n2);
    for (double& v : a) v = rng.normal();
    for (double& v : b) v = rng.normal(0.3, 1.2);
    // ties across samples exercise the merged walk
    if (trial % 3 == 0 && !a.empty() && !b.empty()) b[0] = a[0];
    const KsResult ks = ks_two_sample(a, b);
    CHECK(ks.d == oracles::ks_d(a, b));  // bit-exact
  }
}

TEST_CASE("KS D is symmetric and invariant under common monotone transforms") {
  Rng rng(14);
  std::vector<double> a(25), b(30);
  for (double& v : a) v = rng.normal();
  for (double& v : b) v = rng.normal(0.5, 0.8);
  const double d = ks_two_sample(a, b).d;
  CHECK(ks_two_sample(b, a).d == doctest::Approx(d));
  std::vector<double> ta(a), tb(b);
  for (double& v : ta) v = std::exp(v);  // strictly increasing
  for (double& v : tb) v = std::exp(v);
  CHECK(ks_two_sample(ta, tb).d == doctest::Approx(d));
}

TEST_CASE("asymptotic KS p-value matches the tabulated distribution") {
  // P(K <= 1.36) is about 0.95 for the Kolmogorov distribution
  CHECK(stats::ks_asymptotic_sf(1.36) == doctest::Approx(0.05).epsilon(0.05));
  CHECK(stats::ks_asymptotic_sf(0.5) == doctest::Approx(0.9639).epsilon(0.01));
  CHECK(stats::ks_asymptotic_sf(2.0) == doctest::Approx(0.00067).epsilon(0.15));
  // identical large samples: p near 1; far-apart samples: p near 0
  Rng rng(15);
  std::vector<double> a(400), b(400);
  for (double& v : a) v = rng.normal();
  for (double& v : b) v = rng.normal(2.0, 1.0);
  CHECK(ks_two_sample(a, b).p_value < 1e-6);
}

TEST_CASE("sigmoid fit recovers a planted logistic midpoint within 5%") {
  Rng rng(16);
  std::vector<double> eci, rho;
  const double lo = -0.6, hi = 0.5, mid = 0.8, rate = 2.5;
  for (int i = 0; i < 400; ++i) {
    const double x = rng.uniform(-2.5, 4.0);
    const double y = lo + (hi - lo) / (1.0 + std::exp(-rate * (x - mid))) + rng.normal(0, 0.02);
    eci.push_back(x);
    rho.push_back(y);
  }
  const SigmoidResult result = eci_rho_sigmoid(eci, rho, 15);
  REQUIRE(result.fit.ok);
  // midpoint within 5% of the planted location, scaled by the x range
  CHECK(std::fabs(result.fit.midpoint - mid) <= 0.05 * 6.5);
  CHECK(result.fit.lo == doctest::Approx(lo).epsilon(0.1));
  CHECK(result.fit.hi == doctest::Approx(hi).epsilon(0.1));
  // binned means are monotone-ish: first bin below last bin
  double first = 0, last = 0;
  for (const auto& bin : result.bins)
    if (bin.n > 0) {
      first = bin.mean;
      break;
    }
  for (auto it = result.bins.rbegin(); it != result.bins.rend(); ++it)
    if (it->n > 0) {
      last = it->mean;
      break;
    }
  CHECK(first < last);
}

TEST_CASE("constant rho fits with slope zero") {
  std::vector<double> eci, rho;
  for (int i = 0; i < 50; ++i) {
    eci.push_back(i * 0.1);
    rho.push_back(0.4);
  }
  const SigmoidResult result = eci_rho_sigmoid(eci, rho, 10);
  CHECK(result.fit.ok);
  CHECK(result.fit.slope == doctest::Approx(0.0));
  CHECK(result.fit.lo == doctest::Approx(0.4));
}

TEST_CASE("sigmoid fit needs at least 10 observations") {
  std::vector<double> eci = {0.0, 1.0};
  std::vector<double> rho = {0.0, 0.5};
  CHECK_THROWS(eci_rho_sigmoid(eci, rho, 5));
}

}  // TEST_SUITE
