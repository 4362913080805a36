#pragma once

#include <cstddef>

namespace envkit::simd::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
double wdot_scalar(const double* w, const double* a, const double* b, std::size_t n);
double sum_scalar(const double* w, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);

#if defined(ENVKIT_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
double wdot_avx2(const double* w, const double* a, const double* b, std::size_t n);
double sum_avx2(const double* w, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
#endif

}  // namespace envkit::simd::detail
