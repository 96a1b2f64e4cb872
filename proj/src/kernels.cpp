#include "ecomplex/kernels.hpp"

#include <stdexcept>

namespace ecomplex::kernels {

namespace {

struct Vtable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*centered_sumsq)(const double*, std::size_t, double);
  double (*count_ge)(const double*, std::size_t, double);
  double (*max_abs_diff)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
};

constexpr Vtable kScalar{scalar::dot,      scalar::sum,          scalar::centered_sumsq,
                         scalar::count_ge, scalar::max_abs_diff, scalar::axpy};

#if ECOMPLEX_HAVE_AVX2
constexpr Vtable kAvx2{avx2::dot,      avx2::sum,          avx2::centered_sumsq,
                       avx2::count_ge, avx2::max_abs_diff, avx2::axpy};
#endif

bool cpu_has_avx2() {
#if ECOMPLEX_HAVE_AVX2
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct State {
  const Vtable* table;
  Backend backend;
};

State resolve(Backend b) {
#if ECOMPLEX_HAVE_AVX2
  if (b == Backend::Avx2 || (b == Backend::Auto && cpu_has_avx2()))
    return {&kAvx2, Backend::Avx2};
#endif
  return {&kScalar, Backend::Scalar};
}

State& state() {
  static State s = resolve(Backend::Auto);
  return s;
}

}  // namespace

bool avx2_available() { return cpu_has_avx2(); }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !cpu_has_avx2())
    throw std::runtime_error("kernels: AVX2 backend requested but not available");
  state() = resolve(b);
}

Backend active_backend() { return state().backend; }

const char* backend_name() {
  return state().backend == Backend::Avx2 ? "avx2" : "scalar";
}

double dot(const double* a, const double* b, std::size_t n) {
  return state().table->dot(a, b, n);
}
double sum(const double* a, std::size_t n) { return state().table->sum(a, n); }
double centered_sumsq(const double* a, std::size_t n, double mean) {
  return state().table->centered_sumsq(a, n, mean);
}
double count_ge(const double* a, std::size_t n, double threshold) {
  return state().table->count_ge(a, n, threshold);
}
double max_abs_diff(const double* a, const double* b, std::size_t n) {
  return state().table->max_abs_diff(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  state().table->axpy(alpha, x, y, n);
}

}  // namespace ecomplex::kernels
