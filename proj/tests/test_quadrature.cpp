#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "freebound/quadrature.hpp"

using namespace freebound;

TEST_CASE("gauss-legendre nodes are symmetric and weights sum to 2") {
  for (int n : {2, 5, 16, 64}) {
    const auto& gl = GaussLegendre::get(n);
    REQUIRE(gl.nodes.size() == static_cast<size_t>(n));
    double wsum = 0;
    for (int i = 0; i < n; ++i) {
      wsum += gl.weights[i];
      CHECK(gl.nodes[i] == doctest::Approx(-gl.nodes[n - 1 - i]).epsilon(1e-14));
      CHECK(gl.weights[i] > 0);
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("n-point rule is exact through degree 2n-1 and not beyond") {
  const int n = 4;
  const auto& gl = GaussLegendre::get(n);
  auto integrate_monomial = [&](int k) {
    double v = 0;
    for (int i = 0; i < n; ++i) v += gl.weights[i] * std::pow(gl.nodes[i], k);
    return v;
  };
  for (int k = 0; k <= 2 * n - 1; ++k) {
    const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
    CHECK(integrate_monomial(k) == doctest::Approx(exact).epsilon(1e-13));
  }
  // Degree 2n fails: x^8 with 4 points.
  CHECK(std::abs(integrate_monomial(8) - 2.0 / 9.0) > 1e-4);
}

TEST_CASE("cached rule instances are reused") {
  const auto& a = GaussLegendre::get(32);
  const auto& b = GaussLegendre::get(32);
  CHECK(&a == &b);
}

TEST_CASE("tensor rule integrates over a 2d box") {
  Eigen::VectorXd lo(2), hi(2);
  lo << 0.0, -1.0;
  hi << std::numbers::pi, 1.0;
  QuadratureRule rule(lo, hi, 24);
  CHECK(rule.dim() == 2);
  CHECK(rule.total_points() == 24l * 24l);

  const double got = rule.integrate(
      [](const Eigen::VectorXd& p) { return std::sin(p[0]) * (1.0 + p[1] * p[1]); });
  // int_0^pi sin = 2, int_{-1}^{1} (1 + y^2) = 8/3.
  CHECK(got == doctest::Approx(2.0 * 8.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("for_each_node visits every node with matching weights") {
  Eigen::VectorXd lo(1), hi(1);
  lo << 2.0;
  hi << 5.0;
  QuadratureRule rule(lo, hi, 8);
  long count = 0;
  double wsum = 0;
  rule.for_each_node([&](const Eigen::VectorXd& p, double w) {
    ++count;
    wsum += w;
    CHECK(p[0] > 2.0);
    CHECK(p[0] < 5.0);
  });
  CHECK(count == rule.total_points());
  CHECK(wsum == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("refinement pair reports the relative change between levels") {
  Eigen::VectorXd lo(1), hi(1);
  lo << 0.0;
  hi << 1.0;
  auto pair = integrate_refined(lo, hi, 16,
                                [](const Eigen::VectorXd& p) { return std::exp(p[0]); });
  const double exact = std::exp(1.0) - 1.0;
  CHECK(pair.coarse == doctest::Approx(exact).epsilon(1e-12));
  CHECK(pair.fine == doctest::Approx(exact).epsilon(1e-13));
  CHECK(pair.rel_change() < 1e-12);
  CHECK(pair.rel_change() >= 0.0);
}
