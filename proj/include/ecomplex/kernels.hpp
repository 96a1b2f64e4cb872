#pragma once

#include <cstddef>

// Data-parallel kernels behind the numeric layers. Every operation has a
// scalar reference implementation and, on x86-64 builds, an AVX2 variant.
// The active variant is selected at runtime from CPU capabilities; the two
// are equivalence-tested against each other. Callers use the dispatched
// entry points in ecomplex::kernels.

namespace ecomplex::kernels {

enum class Backend { Auto, Scalar, Avx2 };

// True when the running CPU supports the AVX2 path (and it was compiled in).
bool avx2_available();

// Force a backend. Auto re-probes the CPU. Throws std::runtime_error when
// the requested backend is unavailable.
void set_backend(Backend b);

// Resolved backend, never Auto.
Backend active_backend();
const char* backend_name();

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
// sum of (a[i] - mean)^2
double centered_sumsq(const double* a, std::size_t n, double mean);
// number of entries >= threshold, returned as a double
double count_ge(const double* a, std::size_t n, double threshold);
double max_abs_diff(const double* a, const double* b, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double centered_sumsq(const double* a, std::size_t n, double mean);
double count_ge(const double* a, std::size_t n, double threshold);
double max_abs_diff(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

#if ECOMPLEX_HAVE_AVX2
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double centered_sumsq(const double* a, std::size_t n, double mean);
double count_ge(const double* a, std::size_t n, double threshold);
double max_abs_diff(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace avx2
#endif

}  // namespace ecomplex::kernels
