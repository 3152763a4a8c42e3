#include "freebound/kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kernels_impl.hpp"

namespace freebound::kernels {

namespace {

struct Impl {
  double (*total_area)(const TriangleSoA&);
  double (*area_with_gradient)(const TriangleSoA&, double*, double*, double*,
                               double*);
  void (*axpy)(std::size_t, double, const double*, double*);
  double (*dot)(std::size_t, const double*, const double*);
  double (*max_abs)(std::size_t, const double*);
};

constexpr Impl kScalar{scalar_impl::total_area, scalar_impl::area_with_gradient,
                       scalar_impl::axpy, scalar_impl::dot, scalar_impl::max_abs};
#if defined(FREEBOUND_BUILD_AVX2)
constexpr Impl kAvx2{avx2_impl::total_area, avx2_impl::area_with_gradient,
                     avx2_impl::axpy, avx2_impl::dot, avx2_impl::max_abs};
#endif
#if defined(FREEBOUND_BUILD_NEON)
constexpr Impl kNeon{neon_impl::total_area, neon_impl::area_with_gradient,
                     neon_impl::axpy, neon_impl::dot, neon_impl::max_abs};
#endif

bool runnable(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(FREEBOUND_BUILD_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(FREEBOUND_BUILD_NEON)
      return true;  // baseline on aarch64 builds
#else
      return false;
#endif
  }
  return false;
}

Isa detect() {
  if (const char* env = std::getenv("FREEBOUND_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (std::strcmp(env, "avx2") == 0 && runnable(Isa::avx2)) return Isa::avx2;
    if (std::strcmp(env, "neon") == 0 && runnable(Isa::neon)) return Isa::neon;
  }
  if (runnable(Isa::avx2)) return Isa::avx2;
  if (runnable(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

std::atomic<Isa> g_active{detect()};

const Impl& impl_for(Isa isa) {
  switch (isa) {
#if defined(FREEBOUND_BUILD_AVX2)
    case Isa::avx2:
      return kAvx2;
#endif
#if defined(FREEBOUND_BUILD_NEON)
    case Isa::neon:
      return kNeon;
#endif
    default:
      return kScalar;
  }
}

const Impl& active() { return impl_for(g_active.load(std::memory_order_relaxed)); }

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "?";
}

Isa active_isa() { return g_active.load(std::memory_order_relaxed); }

bool force_isa(Isa isa) {
  if (!runnable(isa)) return false;
  g_active.store(isa, std::memory_order_relaxed);
  return true;
}

void reset_isa() { g_active.store(detect(), std::memory_order_relaxed); }

double total_area(const TriangleSoA& tris) { return active().total_area(tris); }

double area_with_gradient(const TriangleSoA& tris, double* gx, double* gy,
                          double* gz, double* scratch) {
  return active().area_with_gradient(tris, gx, gy, gz, scratch);
}

void axpy(std::size_t n, double alpha, const double* v, double* out) {
  active().axpy(n, alpha, v, out);
}

double dot(std::size_t n, const double* a, const double* b) {
  return active().dot(n, a, b);
}

double max_abs(std::size_t n, const double* v) { return active().max_abs(n, v); }

}  // namespace freebound::kernels
