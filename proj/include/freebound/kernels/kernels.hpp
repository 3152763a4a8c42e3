#pragma once

#include <cstddef>
#include <cstdint>

namespace freebound::kernels {

// Structure-of-arrays triangle view over mesh vertex/index buffers.
struct TriangleSoA {
  const double* x = nullptr;
  const double* y = nullptr;
  const double* z = nullptr;
  const int32_t* a = nullptr;
  const int32_t* b = nullptr;
  const int32_t* c = nullptr;
  std::size_t count = 0;
};

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);
// Best ISA compiled in and supported by the running CPU, unless overridden by
// the FREEBOUND_SIMD environment variable (values: scalar, avx2, neon).
Isa active_isa();
// Forces a specific ISA (for equivalence tests). Returns false and leaves the
// selection unchanged when the request is not runnable on this host.
bool force_isa(Isa isa);
void reset_isa();

// Sum of triangle areas.
double total_area(const TriangleSoA& tris);

// Accumulates the area gradient into gx/gy/gz (caller zeroes them) and
// returns the total area. scratch must hold 9*count doubles; vectorized
// variants stage per-triangle gradients there before the scatter pass.
double area_with_gradient(const TriangleSoA& tris, double* gx, double* gy,
                          double* gz, double* scratch);

// out[i] += alpha * v[i]
void axpy(std::size_t n, double alpha, const double* v, double* out);
double dot(std::size_t n, const double* a, const double* b);
double max_abs(std::size_t n, const double* v);

}  // namespace freebound::kernels
