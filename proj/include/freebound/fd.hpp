#pragma once

#include <span>
#include <vector>

namespace freebound::fd {

// Finite-difference weights on arbitrary nodes (Fornberg's recursion).
//
// Given nodes x[0..n) and an evaluation point z, returns w such that
//   f^(k)(z) ≈ Σ_j w[k][j] f(x[j])   for k = 0..max_order.
// The approximation is exact for polynomials of degree < n.
std::vector<std::vector<long double>> weights(long double z,
                                              std::span<const long double> x,
                                              int max_order);

// One-dimensional stencil on an equispaced ladder of integer offsets.
// offsets[j]*h are the sample displacements; weight[k][j] already includes
// the 1/h^k factor, so  f^(k)(t) ≈ Σ_j weight[k][j] f(t + offsets[j]*h).
struct Stencil {
  std::vector<int> offsets;
  std::vector<long double> w1;  // first derivative
  std::vector<long double> w2;  // second derivative
};

// Builds a stencil of `points` nodes for a coordinate t living in [lo, hi].
// Prefers the centered ladder; shifts it when t is too close to an end of a
// non-periodic interval. Throws StencilOutOfDomainError when even the fully
// one-sided ladder would leave [lo, hi].
Stencil make_stencil(long double t, long double lo, long double hi, bool periodic,
                     long double h, int points);

}  // namespace freebound::fd
