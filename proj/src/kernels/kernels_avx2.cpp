#include "kernels_impl.hpp"

#if defined(FREEBOUND_BUILD_AVX2)

#include <immintrin.h>

#include <cmath>

namespace freebound::kernels::avx2_impl {

namespace {

constexpr double kDegenerate = 1e-150;

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

struct Gathered {
  __m256d ax, ay, az, bx, by, bz, cx, cy, cz;
};

inline Gathered gather(const TriangleSoA& t, std::size_t i) {
  const __m128i ia = _mm_loadu_si128(reinterpret_cast<const __m128i*>(t.a + i));
  const __m128i ib = _mm_loadu_si128(reinterpret_cast<const __m128i*>(t.b + i));
  const __m128i ic = _mm_loadu_si128(reinterpret_cast<const __m128i*>(t.c + i));
  Gathered g;
  g.ax = _mm256_i32gather_pd(t.x, ia, 8);
  g.ay = _mm256_i32gather_pd(t.y, ia, 8);
  g.az = _mm256_i32gather_pd(t.z, ia, 8);
  g.bx = _mm256_i32gather_pd(t.x, ib, 8);
  g.by = _mm256_i32gather_pd(t.y, ib, 8);
  g.bz = _mm256_i32gather_pd(t.z, ib, 8);
  g.cx = _mm256_i32gather_pd(t.x, ic, 8);
  g.cy = _mm256_i32gather_pd(t.y, ic, 8);
  g.cz = _mm256_i32gather_pd(t.z, ic, 8);
  return g;
}

struct Normal {
  __m256d nx, ny, nz, len;
};

inline Normal face_normal(const Gathered& g) {
  const __m256d e1x = _mm256_sub_pd(g.bx, g.ax);
  const __m256d e1y = _mm256_sub_pd(g.by, g.ay);
  const __m256d e1z = _mm256_sub_pd(g.bz, g.az);
  const __m256d e2x = _mm256_sub_pd(g.cx, g.ax);
  const __m256d e2y = _mm256_sub_pd(g.cy, g.ay);
  const __m256d e2z = _mm256_sub_pd(g.cz, g.az);
  Normal n;
  n.nx = _mm256_fmsub_pd(e1y, e2z, _mm256_mul_pd(e1z, e2y));
  n.ny = _mm256_fmsub_pd(e1z, e2x, _mm256_mul_pd(e1x, e2z));
  n.nz = _mm256_fmsub_pd(e1x, e2y, _mm256_mul_pd(e1y, e2x));
  const __m256d n2 = _mm256_fmadd_pd(
      n.nx, n.nx, _mm256_fmadd_pd(n.ny, n.ny, _mm256_mul_pd(n.nz, n.nz)));
  n.len = _mm256_sqrt_pd(n2);
  return n;
}

}  // namespace

double total_area(const TriangleSoA& t) {
  const std::size_t vec = t.count / 4 * 4;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < vec; i += 4) {
    const Gathered g = gather(t, i);
    acc = _mm256_add_pd(acc, face_normal(g).len);
  }
  double area = hsum(acc);
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
  // Scratch layout: 9 SoA lanes of per-triangle gradient contributions.
  double* sax = scratch;
  double* say = scratch + n;
  double* saz = scratch + 2 * n;
  double* sbx = scratch + 3 * n;
  double* sby = scratch + 4 * n;
  double* sbz = scratch + 5 * n;
  double* scx = scratch + 6 * n;
  double* scy = scratch + 7 * n;
  double* scz = scratch + 8 * n;

  const std::size_t vec = n / 4 * 4;
  __m256d acc = _mm256_setzero_pd();
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d tiny = _mm256_set1_pd(kDegenerate);
  for (std::size_t i = 0; i < vec; i += 4) {
    const Gathered g = gather(t, i);
    const Normal fn = face_normal(g);
    acc = _mm256_add_pd(acc, fn.len);
    const __m256d mask = _mm256_cmp_pd(fn.len, tiny, _CMP_GT_OQ);
    const __m256d inv = _mm256_and_pd(_mm256_div_pd(half, fn.len), mask);
    auto cross_store = [&](__m256d ex, __m256d ey, __m256d ez, double* ox,
                           double* oy, double* oz) {
      _mm256_storeu_pd(ox + i,
                       _mm256_mul_pd(inv, _mm256_fmsub_pd(fn.ny, ez,
                                                          _mm256_mul_pd(fn.nz, ey))));
      _mm256_storeu_pd(oy + i,
                       _mm256_mul_pd(inv, _mm256_fmsub_pd(fn.nz, ex,
                                                          _mm256_mul_pd(fn.nx, ez))));
      _mm256_storeu_pd(oz + i,
                       _mm256_mul_pd(inv, _mm256_fmsub_pd(fn.nx, ey,
                                                          _mm256_mul_pd(fn.ny, ex))));
    };
    cross_store(_mm256_sub_pd(g.cx, g.bx), _mm256_sub_pd(g.cy, g.by),
                _mm256_sub_pd(g.cz, g.bz), sax, say, saz);
    cross_store(_mm256_sub_pd(g.ax, g.cx), _mm256_sub_pd(g.ay, g.cy),
                _mm256_sub_pd(g.az, g.cz), sbx, sby, sbz);
    cross_store(_mm256_sub_pd(g.bx, g.ax), _mm256_sub_pd(g.by, g.ay),
                _mm256_sub_pd(g.bz, g.az), scx, scy, scz);
  }
  double area = hsum(acc);
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
  // Serial scatter; vertices are shared between triangles.
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
  const __m256d va = _mm256_set1_pd(alpha);
  const std::size_t vec = n / 4 * 4;
  for (std::size_t i = 0; i < vec; i += 4) {
    __m256d o = _mm256_loadu_pd(out + i);
    o = _mm256_fmadd_pd(va, _mm256_loadu_pd(v + i), o);
    _mm256_storeu_pd(out + i, o);
  }
  for (std::size_t i = vec; i < n; ++i) out[i] += alpha * v[i];
}

double dot(std::size_t n, const double* a, const double* b) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t vec = n / 4 * 4;
  for (std::size_t i = 0; i < vec; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double r = hsum(acc);
  for (std::size_t i = vec; i < n; ++i) r += a[i] * b[i];
  return r;
}

double max_abs(std::size_t n, const double* v) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  const std::size_t vec = n / 4 * 4;
  for (std::size_t i = 0; i < vec; i += 4)
    acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(v + i)));
  double m = hmax(acc);
  for (std::size_t i = vec; i < n; ++i) m = std::max(m, std::fabs(v[i]));
  return m;
}

}  // namespace freebound::kernels::avx2_impl

#endif  // FREEBOUND_BUILD_AVX2
