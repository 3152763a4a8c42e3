#pragma once

#include "freebound/kernels/kernels.hpp"

// Per-ISA entry points. Each namespace provides the same set; kernels.cpp
// wires the active one into the public API.

namespace freebound::kernels::scalar_impl {
double total_area(const TriangleSoA& t);
double area_with_gradient(const TriangleSoA& t, double* gx, double* gy, double* gz,
                          double* scratch);
void axpy(std::size_t n, double alpha, const double* v, double* out);
double dot(std::size_t n, const double* a, const double* b);
double max_abs(std::size_t n, const double* v);
}  // namespace freebound::kernels::scalar_impl

#if defined(FREEBOUND_BUILD_AVX2)
namespace freebound::kernels::avx2_impl {
double total_area(const TriangleSoA& t);
double area_with_gradient(const TriangleSoA& t, double* gx, double* gy, double* gz,
                          double* scratch);
void axpy(std::size_t n, double alpha, const double* v, double* out);
double dot(std::size_t n, const double* a, const double* b);
double max_abs(std::size_t n, const double* v);
}  // namespace freebound::kernels::avx2_impl
#endif

#if defined(FREEBOUND_BUILD_NEON)
namespace freebound::kernels::neon_impl {
double total_area(const TriangleSoA& t);
double area_with_gradient(const TriangleSoA& t, double* gx, double* gy, double* gz,
                          double* scratch);
void axpy(std::size_t n, double alpha, const double* v, double* out);
double dot(std::size_t n, const double* a, const double* b);
double max_abs(std::size_t n, const double* v);
}  // namespace freebound::kernels::neon_impl
#endif
