#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "ecomplex/kernels.hpp"
#include "ecomplex/rng.hpp"

using namespace ecomplex;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal(0.0, scale);
  return v;
}

const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 32, 33, 100, 1003};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar reference values") {
  const double a[] = {1.0, 2.0, 3.0, 4.0};
  const double b[] = {0.5, -1.0, 2.0, 0.0};
  CHECK(kernels::scalar::dot(a, b, 4) == doctest::Approx(4.5));
  CHECK(kernels::scalar::sum(a, 4) == doctest::Approx(10.0));
  CHECK(kernels::scalar::centered_sumsq(a, 4, 2.5) == doctest::Approx(5.0));
  CHECK(kernels::scalar::count_ge(a, 4, 2.0) == 3.0);
  CHECK(kernels::scalar::count_ge(a, 4, 5.0) == 0.0);
  CHECK(kernels::scalar::max_abs_diff(a, b, 4) == doctest::Approx(4.0));
  double y[] = {1.0, 1.0, 1.0, 1.0};
  kernels::scalar::axpy(2.0, a, y, 4);
  CHECK(y[0] == doctest::Approx(3.0));
  CHECK(y[3] == doctest::Approx(9.0));
}

TEST_CASE("empty inputs") {
  CHECK(kernels::dot(nullptr, nullptr, 0) == 0.0);
  CHECK(kernels::sum(nullptr, 0) == 0.0);
  CHECK(kernels::count_ge(nullptr, 0, 1.0) == 0.0);
  CHECK(kernels::max_abs_diff(nullptr, nullptr, 0) == 0.0);
}

#if ECOMPLEX_HAVE_AVX2
TEST_CASE("avx2 equivalence across lengths and magnitudes") {
  if (!kernels::avx2_available()) return;
  Rng rng(42);
  for (std::size_t n : kLengths) {
    for (double scale : {1.0, 1e6}) {
      const auto a = random_vec(rng, n, scale);
      const auto b = random_vec(rng, n, scale);

      double abs_sum = 1e-300;
      for (std::size_t i = 0; i < n; ++i) abs_sum += std::fabs(a[i] * b[i]);
      CHECK(std::fabs(kernels::avx2::dot(a.data(), b.data(), n) -
                      kernels::scalar::dot(a.data(), b.data(), n)) <= 1e-13 * abs_sum);

      double abs_a = 1e-300;
      for (double v : a) abs_a += std::fabs(v);
      CHECK(std::fabs(kernels::avx2::sum(a.data(), n) - kernels::scalar::sum(a.data(), n)) <=
            1e-13 * abs_a);

      const double mu = n > 0 ? kernels::scalar::sum(a.data(), n) / double(n) : 0.0;
      const double cs_s = kernels::scalar::centered_sumsq(a.data(), n, mu);
      const double cs_v = kernels::avx2::centered_sumsq(a.data(), n, mu);
      CHECK(std::fabs(cs_v - cs_s) <= 1e-13 * (cs_s + 1e-300));

      // comparisons and max/abs are reassociation-free: bit-exact
      CHECK(kernels::avx2::count_ge(a.data(), n, 0.0) ==
            kernels::scalar::count_ge(a.data(), n, 0.0));
      CHECK(kernels::avx2::max_abs_diff(a.data(), b.data(), n) ==
            kernels::scalar::max_abs_diff(a.data(), b.data(), n));

      auto y1 = b, y2 = b;
      kernels::scalar::axpy(1.7, a.data(), y1.data(), n);
      kernels::avx2::axpy(1.7, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(std::fabs(y1[i] - y2[i]) <= 1e-12 * (std::fabs(y1[i]) + 1e-300));
    }
  }
}

TEST_CASE("count_ge counts threshold ties in both paths") {
  if (!kernels::avx2_available()) return;
  std::vector<double> v(37, 1.0);
  v[5] = 0.999999;
  v[20] = 1.0;
  CHECK(kernels::scalar::count_ge(v.data(), v.size(), 1.0) == 36.0);
  CHECK(kernels::avx2::count_ge(v.data(), v.size(), 1.0) == 36.0);
}
#endif

TEST_CASE("backend selection") {
  const kernels::Backend original = kernels::active_backend();
  kernels::set_backend(kernels::Backend::Scalar);
  CHECK(kernels::active_backend() == kernels::Backend::Scalar);
  CHECK(std::string(kernels::backend_name()) == "scalar");
  const double a[] = {1.0, 2.0};
  CHECK(kernels::dot(a, a, 2) == doctest::Approx(5.0));
  if (kernels::avx2_available()) {
    kernels::set_backend(kernels::Backend::Avx2);
    CHECK(kernels::active_backend() == kernels::Backend::Avx2);
    CHECK(kernels::dot(a, a, 2) == doctest::Approx(5.0));
  } else {
    CHECK_THROWS(kernels::set_backend(kernels::Backend::Avx2));
  }
  kernels::set_backend(kernels::Backend::Auto);
  CHECK(kernels::active_backend() != kernels::Backend::Auto);
  kernels::set_backend(original);
}

}  // TEST_SUITE
