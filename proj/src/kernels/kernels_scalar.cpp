#include <cmath>

#include "kernels_impl.hpp"

namespace freebound::kernels::scalar_impl {

namespace {
constexpr double kDegenerate = 1e-150;  // |n| below this: zero gradient
}

double total_area(const TriangleSoA& t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < t.count; ++i) {
    const int32_t ia = t.a[i], ib = t.b[i], ic = t.c[i];
    const double e1x = t.x[ib] - t.x[ia], e1y = t.y[ib] - t.y[ia],
                 e1z = t.z[ib] - t.z[ia];
    const double e2x = t.x[ic] - t.x[ia], e2y = t.y[ic] - t.y[ia],
                 e2z = t.z[ic] - t.z[ia];
    const double nx = e1y * e2z - e1z * e2y;
    const double ny = e1z * e2x - e1x * e2z;
    const double nz = e1x * e2y - e1y * e2x;
    acc += std::sqrt(nx * nx + ny * ny + nz * nz);
  }
  return 0.5 * acc;
}

double area_with_gradient(const TriangleSoA& t, double* gx, double* gy, double* gz,
                          double* /*scratch*/) {
  double acc = 0.0;
  for (std::size_t i = 0; i < t.count; ++i) {
    const int32_t ia = t.a[i], ib = t.b[i], ic = t.c[i];
    const double ax = t.x[ia], ay = t.y[ia], az = t.z[ia];
    const double bx = t.x[ib], by = t.y[ib], bz = t.z[ib];
    const double cx = t.x[ic], cy = t.y[ic], cz = t.z[ic];
    const double e1x = bx - ax, e1y = by - ay, e1z = bz - az;
    const double e2x = cx - ax, e2y = cy - ay, e2z = cz - az;
    const double nx = e1y * e2z - e1z * e2y;
    const double ny = e1z * e2x - e1x * e2z;
    const double nz = e1x * e2y - e1y * e2x;
    const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
    acc += len;
    const double inv = (len > kDegenerate) ? 0.5 / len : 0.0;
    // grad_a = (n x (c - b)) / (2|n|), cyclically for b and c.
    const double abx = cx - bx, aby = cy - by, abz = cz - bz;
    gx[ia] += inv * (ny * abz - nz * aby);
    gy[ia] += inv * (nz * abx - nx * abz);
    gz[ia] += inv * (nx * aby - ny * abx);
    const double bbx = ax - cx, bby = ay - cy, bbz = az - cz;
    gx[ib] += inv * (ny * bbz - nz * bby);
    gy[ib] += inv * (nz * bbx - nx * bbz);
    gz[ib] += inv * (nx * bby - ny * bbx);
    const double ccx = bx - ax, ccy = by - ay, ccz = bz - az;
    gx[ic] += inv * (ny * ccz - nz * ccy);
    gy[ic] += inv * (nz * ccx - nx * ccz);
    gz[ic] += inv * (nx * ccy - ny * ccx);
  }
  return 0.5 * acc;
}

void axpy(std::size_t n, double alpha, const double* v, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] += alpha * v[i];
}

double dot(std::size_t n, const double* a, const double* b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double max_abs(std::size_t n, const double* v) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(v[i]));
  return m;
}

}  // namespace freebound::kernels::scalar_impl
