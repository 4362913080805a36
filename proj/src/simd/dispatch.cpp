#include <atomic>
#include <cstdlib>
#include <string_view>

#include "envkit/simd.hpp"
#include "kernels.hpp"

namespace envkit::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

namespace {

constexpr KernelTable kScalar{Isa::Scalar, detail::dot_scalar, detail::wdot_scalar,
                              detail::sum_scalar, detail::axpy_scalar};

#if defined(ENVKIT_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, detail::dot_avx2, detail::wdot_avx2, detail::sum_avx2,
                            detail::axpy_avx2};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable* select_default() {
  const char* env = std::getenv("ENVKIT_SIMD");
  if (env != nullptr && std::string_view(env) == "scalar") return &kScalar;
  if (const KernelTable* t = avx2_kernels()) return t;
  return &kScalar;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{select_default()};
  return slot;
}

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

const KernelTable* avx2_kernels() {
#if defined(ENVKIT_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

bool force_isa(Isa isa) {
  const KernelTable* t = isa == Isa::Scalar ? &kScalar : avx2_kernels();
  if (t == nullptr) return false;
  active_slot().store(t, std::memory_order_release);
  return true;
}

}  // namespace envkit::simd
