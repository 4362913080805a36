#pragma once

// Data-parallel reductions over observations. Every kernel has a scalar
// reference implementation; vector variants are selected once at runtime from
// the CPU feature set and must agree with the reference to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace envkit::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i w[i] * a[i] * b[i]
  double (*wdot)(const double* w, const double* a, const double* b, std::size_t n);
  // sum_i w[i]
  double (*sum)(const double* w, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_kernels();

/// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

/// Best table for this CPU, unless ENVKIT_SIMD=scalar is set in the
/// environment. Resolved on first use.
const KernelTable& active_kernels();

/// Overrides the active table. Must not race with running computations;
/// intended for equivalence tests and the CLI. Returns false when `isa` is
/// unavailable, leaving the selection unchanged.
bool force_isa(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_kernels().dot(a.data(), b.data(), a.size());
}

inline double wdot(std::span<const double> w, std::span<const double> a,
                   std::span<const double> b) {
  return active_kernels().wdot(w.data(), a.data(), b.data(), w.size());
}

inline double sum(std::span<const double> w) { return active_kernels().sum(w.data(), w.size()); }

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active_kernels().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace envkit::simd
