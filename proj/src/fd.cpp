#include "freebound/fd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "freebound/types.hpp"

namespace freebound::fd {

std::vector<std::vector<long double>> weights(long double z,
                                              std::span<const long double> x,
                                              int max_order) {
  const int n = static_cast<int>(x.size());
  const int m = max_order;
  // c[j][k]: weight of f(x[j]) in the k-th derivative at z.
  std::vector<std::vector<long double>> c(n, std::vector<long double>(m + 1, 0.0L));
  long double c1 = 1.0L;
  long double c4 = x[0] - z;
  c[0][0] = 1.0L;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    long double c2 = 1.0L;
    long double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const long double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  // Transpose to [order][node] which reads better at call sites.
  std::vector<std::vector<long double>> out(m + 1, std::vector<long double>(n));
  for (int k = 0; k <= m; ++k)
    for (int j = 0; j < n; ++j) out[k][j] = c[j][k];
  return out;
}

Stencil make_stencil(long double t, long double lo, long double hi, bool periodic,
                     long double h, int points) {
  if (points < 3) throw Error("stencil needs at least 3 points");
  Stencil st;
  st.offsets.resize(points);
  const int half = points / 2;
  int base = -half;  // centered ladder for odd `points`
  if (!periodic) {
    // Shift the ladder until all nodes are inside [lo, hi].
    const long double span = (points - 1) * h;
    if (span > hi - lo + 1e-15L * (hi - lo))
      throw StencilOutOfDomainError("stencil span " + std::to_string((double)span) +
                                    " exceeds interval length " +
                                    std::to_string((double)(hi - lo)));
    long double tmin = t + base * h;
    long double tmax = t + (base + points - 1) * h;
    while (tmin < lo - 1e-15L) {
      ++base;
      tmin += h;
      tmax += h;
    }
    while (tmax > hi + 1e-15L) {
      --base;
      tmin -= h;
      tmax -= h;
    }
    if (t + base * h < lo - 1e-12L)
      throw StencilOutOfDomainError("cannot place stencil inside interval");
  }
  std::vector<long double> nodes(points);
  for (int j = 0; j < points; ++j) {
    st.offsets[j] = base + j;
    nodes[j] = st.offsets[j] * h;
  }
  auto w = weights(0.0L, nodes, 2);
  st.w1 = std::move(w[1]);
  st.w2 = std::move(w[2]);
  return st;
}

}  // namespace freebound::fd
