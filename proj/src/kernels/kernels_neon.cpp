#include "kernels_impl.hpp"

#if defined(FREEBOUND_BUILD_NEON)

#include <arm_neon.h>

#include <cmath>

namespace freebound::kernels::neon_impl {

namespace {

constexpr double kDegenerate = 1e-150;

// Two-lane gathers done with scalar index loads; NEON has no gather.
inline float64x2_t gather2(const double* base, const int32_t* idx, std::size_t i) {
  const double tmp[2] = {base[idx[i]], base[idx[i + 1]]};
  return vld1q_f64(tmp);
}

struct Gathered {
  float64x2_t ax, ay, az, bx, by, bz, cx, cy, cz;
};

inline Gathered gather(const TriangleSoA& t, std::size_t i) {
  Gathered g;
  g.ax = gather2(t.x, t.a, i);
  g.ay = gather2(t.y, t.a, i);
  g.az = gather2(t.z, t.a, i);
  g.bx = gather2(t.x, t.b, i);
  g.by = gather2(t.y, t.b, i);
  g.bz = gather2(t.z, t.b, i);
  g.cx = gather2(t.x, t.c, i);
  g.cy = gather2(t.y, t.c, i);
  g.cz = gather2(t.z, t.c, i);
  return g;
}

struct Normal {
  float64x2_t nx, ny, nz, len;
};

inline Normal face_normal(const Gathered& g) {
  const float64x2_t e1x = vsubq_f64(g.bx, g.ax);
  const float64x2_t e1y = vsubq_f64(g.by, g.ay);
  const float64x2_t e1z = vsubq_f64(g.bz, g.az);
  const float64x2_t e2x = vsubq_f64(g.cx, g.ax);
  const float64x2_t e2y = vsubq_f64(g.cy, g.ay);
  const float64x2_t e2z = vsubq_f64(g.cz, g.az);
  Normal n;
  n.nx = vsubq_f64(vmulq_f64(e1y, e2z), vmulq_f64(e1z, e2y));
  n.ny = vsubq_f64(vmulq_f64(e1z, e2x), vmulq_f64(e1x, e2z));
  n.nz = vsubq_f64(vmulq_f64(e1x, e2y), vmulq_f64(e1y, e2x));
  float64x2_t n2 = vmulq_f64(n.nx, n.nx);
  n2 = vfmaq_f64(n2, n.ny, n.ny);
  n2 = vfmaq_f64(n2, n.nz, n.nz);
  n.len = vsqrtq_f64(n2);
  return n;
}

}  // namespace

double total_area(const TriangleSoA& t) {
  const std::size_t vec = t.count / 2 * 2;
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < vec; i += 2)
    acc = vaddq_f64(acc, face_normal(gather(t, i)).len);
  double area = vaddvq_f64(acc);
  for (std::size_t i = vec; i < t.count; ++i) {
    const int32_t ia = t.a[i], ib = t.b[i], ic = t.c[i];
    const double e1x = t.x[ib] - t.x[ia], e1y = t.y[ib] - t.y[ia],
                 e1z = t.z[ib] - t.z[ia];
    const double e2x = t.x[ic] - t.x[ia], e2y = t.y[ic] - t.y[ia],
                 e2z = t.z[ic] - t.z[ia];
    const double nx = e1y * e2z - e1z * e2y;
    const double ny = e1z * e2x - e1x * e2z;
    const double nz = e1x * e2y - e1y * e2x;
    area += std::sqrt(nx * nx + ny * ny + nz * nz);
  }
  return 0.5 * area;
}

double area_with_gradient(const TriangleSoA& t, double* gx, double* gy, double* gz,
                          double* scratch) {
  const std::size_t n = t.count;
  double* sax = scratch;
  double* say = scratch + n;
  double* saz = scratch + 2 * n;
  double* sbx = scratch + 3 * n;
  double* sby = scratch + 4 * n;
  double* sbz = scratch + 5 * n;
  double* scx = scratch + 6 * n;
  double* scy = scratch + 7 * n;
  double* scz = scratch + 8 * n;

  const std::size_t vec = n / 2 * 2;
  float64x2_t acc = vdupq_n_f64(0.0);
  const float64x2_t half = vdupq_n_f64(0.5);
  const float64x2_t tiny = vdupq_n_f64(kDegenerate);
  for (std::size_t i = 0; i < vec; i += 2) {
    const Gathered g = gather(t, i);
    const Normal fn = face_normal(g);
    acc = vaddq_f64(acc, fn.len);
    const uint64x2_t mask = vcgtq_f64(fn.len, tiny);
    const float64x2_t inv = vreinterpretq_f64_u64(vandq_u64(
        vreinterpretq_u64_f64(vdivq_f64(half, fn.len)), mask));
    auto cross_store = [&](float64x2_t ex, float64x2_t ey, float64x2_t ez,
                           double* ox, double* oy, double* oz) {
      vst1q_f64(ox + i, vmulq_f64(inv, vsubq_f64(vmulq_f64(fn.ny, ez),
                                                 vmulq_f64(fn.nz, ey))));
      vst1q_f64(oy + i, vmulq_f64(inv, vsubq_f64(vmulq_f64(fn.nz, ex),
                                                 vmulq_f64(fn.nx, ez))));
      vst1q_f64(oz + i, vmulq_f64(inv, vsubq_f64(vmulq_f64(fn.nx, ey),
                                                 vmulq_f64(fn.ny, ex))));
    };
    cross_store(vsubq_f64(g.cx, g.bx), vsubq_f64(g.cy, g.by),
                vsubq_f64(g.cz, g.bz), sax, say, saz);
    cross_store(vsubq_f64(g.ax, g.cx), vsubq_f64(g.ay, g.cy),
                vsubq_f64(g.az, g.cz), sbx, sby, sbz);
    cross_store(vsubq_f64(g.bx, g.ax), vsubq_f64(g.by, g.ay),
                vsubq_f64(g.bz, g.az), scx, scy, scz);
  }
  double area = vaddvq_f64(acc);
  for (std::size_t i = vec; i < n; ++i) {
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
    area += len;
    const double inv = (len > kDegenerate) ? 0.5 / len : 0.0;
    auto cross_store = [&](double ex, double ey, double ez, double* ox, double* oy,
                           double* oz) {
      ox[i] = inv * (ny * ez - nz * ey);
      oy[i] = inv * (nz * ex - nx * ez);
      oz[i] = inv * (nx * ey - ny * ex);
    };
    cross_store(cx - bx, cy - by, cz - bz, sax, say, saz);
    cross_store(ax - cx, ay - cy, az - cz, sbx, sby, sbz);
    cross_store(bx - ax, by - ay, bz - az, scx, scy, scz);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int32_t ia = t.a[i], ib = t.b[i], ic = t.c[i];
    gx[ia] += sax[i];
    gy[ia] += say[i];
    gz[ia] += saz[i];
    gx[ib] += sbx[i];
    gy[ib] += sby[i];
    gz[ib] += sbz[i];
    gx[ic] += scx[i];
    gy[ic] += scy[i];
    gz[ic] += scz[i];
  }
  return 0.5 * area;
}

void axpy(std::size_t n, double alpha, const double* v, double* out) {
  const float64x2_t va = vdupq_n_f64(alpha);
  const std::size_t vec = n / 2 * 2;
  for (std::size_t i = 0; i < vec; i += 2)
    vst1q_f64(out + i, vfmaq_f64(vld1q_f64(out + i), va, vld1q_f64(v + i)));
  for (std::size_t i = vec; i < n; ++i) out[i] += alpha * v[i];
}

double dot(std::size_t n, const double* a, const double* b) {
  float64x2_t acc = vdupq_n_f64(0.0);
  const std::size_t vec = n / 2 * 2;
  for (std::size_t i = 0; i < vec; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  double r = vaddvq_f64(acc);
  for (std::size_t i = vec; i < n; ++i) r += a[i] * b[i];
  return r;
}

double max_abs(std::size_t n, const double* v) {
  float64x2_t acc = vdupq_n_f64(0.0);
  const std::size_t vec = n / 2 * 2;
  for (std::size_t i = 0; i < vec; i += 2)
    acc = vmaxq_f64(acc, vabsq_f64(vld1q_f64(v + i)));
  double m = vmaxvq_f64(acc);
  for (std::size_t i = vec; i < n; ++i) m = std::max(m, std::fabs(v[i]));
  return m;
}

}  // namespace freebound::kernels::neon_impl

#endif  // FREEBOUND_BUILD_NEON
