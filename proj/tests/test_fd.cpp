#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "freebound/fd.hpp"
#include "freebound/types.hpp"

using namespace freebound;

namespace {

// Evaluate f(t) = sum c_k t^k and its first two derivatives exactly.
double poly(const std::vector<double>& c, double t) {
  double v = 0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) v = v * t + c[k];
  return v;
}
double dpoly(const std::vector<double>& c, double t) {
  double v = 0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) v = v * t + k * c[k];
  return v;
}
double ddpoly(const std::vector<double>& c, double t) {
  double v = 0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 2; --k)
    v = v * t + k * (k - 1) * c[k];
  return v;
}

}  // namespace

TEST_CASE("fornberg weights reproduce derivatives of polynomials exactly") {
  const std::array<long double, 5> nodes = {-2.0L, -0.7L, 0.1L, 1.3L, 2.4L};
  const long double z = 0.35L;
  auto w = fd::weights(z, nodes, 2);
  REQUIRE(w.size() == 3);
  REQUIRE(w[0].size() == nodes.size());

  // Degree 4 polynomial: 5 nodes are exact for all of f, f', f''.
  const std::vector<double> c = {1.5, -2.0, 0.75, 3.0, -1.25};
  double f0 = 0, f1 = 0, f2 = 0;
  for (size_t j = 0; j < nodes.size(); ++j) {
    const double fj = poly(c, static_cast<double>(nodes[j]));
    f0 += static_cast<double>(w[0][j]) * fj;
    f1 += static_cast<double>(w[1][j]) * fj;
    f2 += static_cast<double>(w[2][j]) * fj;
  }
  CHECK(f0 == doctest::Approx(poly(c, static_cast<double>(z))).epsilon(1e-13));
  CHECK(f1 == doctest::Approx(dpoly(c, static_cast<double>(z))).epsilon(1e-12));
  CHECK(f2 == doctest::Approx(ddpoly(c, static_cast<double>(z))).epsilon(1e-11));
}

TEST_CASE("fornberg interpolation weights sum to one") {
  const std::array<long double, 4> nodes = {0.0L, 1.0L, 2.5L, 4.0L};
  auto w = fd::weights(1.7L, nodes, 1);
  long double s0 = 0, s1 = 0;
  for (size_t j = 0; j < nodes.size(); ++j) {
    s0 += w[0][j];
    s1 += w[1][j];
  }
  CHECK(static_cast<double>(s0) == doctest::Approx(1.0).epsilon(1e-15));
  // Derivative weights annihilate constants.
  CHECK(std::abs(static_cast<double>(s1)) < 1e-14);
}

TEST_CASE("centered stencil differentiates smooth functions to high order") {
  const long double h = 1e-3L;
  auto st = fd::make_stencil(0.5L, 0.0L, 1.0L, false, h, 5);
  REQUIRE(st.offsets.size() == 5);
  // Centered ladder expected in the interior.
  CHECK(st.offsets[0] == -2);
  CHECK(st.offsets[4] == 2);

  // weights already include 1/h^k.
  double d1 = 0, d2 = 0;
  for (size_t j = 0; j < st.offsets.size(); ++j) {
    const double t = 0.5 + st.offsets[j] * static_cast<double>(h);
    d1 += static_cast<double>(st.w1[j]) * std::sin(t);
    d2 += static_cast<double>(st.w2[j]) * std::sin(t);
  }
  CHECK(d1 == doctest::Approx(std::cos(0.5)).epsilon(1e-11));
  CHECK(d2 == doctest::Approx(-std::sin(0.5)).epsilon(1e-8));
}

TEST_CASE("stencil shifts one-sided near a non-periodic end") {
  const long double h = 1e-2L;
  auto st = fd::make_stencil(0.0L, 0.0L, 1.0L, false, h, 5);
  // All offsets must stay inside [0, 1].
  for (int off : st.offsets) CHECK(off >= 0);

  double d1 = 0;
  for (size_t j = 0; j < st.offsets.size(); ++j) {
    const double t = st.offsets[j] * static_cast<double>(h);
    d1 += static_cast<double>(st.w1[j]) * std::exp(t);
  }
  CHECK(d1 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("periodic axes always use the centered ladder") {
  const long double h = 1e-2L;
  auto st = fd::make_stencil(0.0L, 0.0L, 1.0L, true, h, 5);
  CHECK(st.offsets.front() == -2);
  CHECK(st.offsets.back() == 2);
}

TEST_CASE("stencil throws when the ladder cannot fit in the interval") {
  CHECK_THROWS_AS(fd::make_stencil(0.5L, 0.0L, 1.0L, false, 0.5L, 5),
                  StencilOutOfDomainError);
}
