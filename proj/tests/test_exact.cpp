#include <doctest.h>

#include <cmath>

#include <Eigen/Core>

#include "freebound/exact.hpp"
#include "freebound/geometry.hpp"
#include "freebound/types.hpp"

using namespace freebound;

namespace {
constexpr double kS0 = 1.19967864025773383391636984864;
constexpr double kC = 0.460485088250133910858988346805;
constexpr double kArea = 5.23739032798794666209647569736;
constexpr double kBoundaryLength = 10.4747806559758933241929513947;
// Rotational n = 3 solution, frozen from the shooting solver at dt = 2e-5.
constexpr double kWaist3 = 0.5746249776703904;
constexpr double kHalfLength3 = 0.55247520;
}  // namespace

TEST_CASE("the catenoid matching equation s tanh s = 1") {
  const double b = catenoid_s0_bisection();
  const double n = catenoid_s0_newton();
  CHECK(std::abs(b * std::tanh(b) - 1.0) < 1e-12);
  CHECK(std::abs(n * std::tanh(n) - 1.0) < 1e-14);
  CHECK(std::abs(b - n) < 1e-12);
  CHECK(n == doctest::Approx(kS0).epsilon(1e-14));
}

TEST_CASE("critical catenoid parameters satisfy their defining identities") {
  auto cp = critical_catenoid_parameters();
  CHECK(cp.s0 == doctest::Approx(kS0).epsilon(1e-14));
  CHECK(cp.scale == doctest::Approx(kC).epsilon(1e-14));
  CHECK(cp.waist_radius == cp.scale);
  // c cosh s0 = 1/s0 and c s0 = sech s0 follow from s0 tanh s0 = 1.
  CHECK(cp.boundary_radius == doctest::Approx(1.0 / cp.s0).epsilon(1e-13));
  CHECK(cp.scale * cp.s0 == doctest::Approx(1.0 / std::cosh(cp.s0)).epsilon(1e-13));
  CHECK(cp.area == doctest::Approx(kArea).epsilon(1e-13));
  CHECK(cp.boundary_length == doctest::Approx(kBoundaryLength).epsilon(1e-13));
  // Boundary circles land on the unit sphere.
  CHECK(cp.boundary_radius * cp.boundary_radius + cp.scale * cp.s0 * cp.scale * cp.s0 ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("catenoid chart hits the sphere with vanishing support") {
  auto cat = critical_catenoid();
  CHECK(cat.id == "critical-catenoid");
  CHECK(cat.claims_minimal);
  CHECK(cat.claims_free_boundary);
  REQUIRE(cat.sphere_faces.size() == 2);
  for (double th : {0.0, 1.1, 2.7, 5.5}) {
    for (double sv : {-kS0, kS0}) {
      Eigen::Vector2d p(th, sv);
      CHECK(cat.eval(p).norm() == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(std::abs(support_function(cat, p, 1e-3)) < 1e-10);
    }
  }
}

TEST_CASE("model surface construction limits") {
  CHECK(equatorial_disk(2).sphere_faces.size() == 1);
  CHECK(equatorial_disk(3).id == "equatorial-disk-3");
  CHECK_THROWS_AS(equatorial_disk(4), Error);
  CHECK(round_sphere().sphere_faces.empty());
  CHECK_FALSE(round_sphere().claims_minimal);
  auto cap = spherical_cap(0.5);
  CHECK(cap.sphere_faces.size() == 1);
  CHECK_FALSE(cap.claims_minimal);
  CHECK_FALSE(cap.claims_free_boundary);
  // Cap boundary circle is on the sphere even though the contact is slanted.
  Eigen::Vector2d bp(0.3, cap.box.hi[1]);
  CHECK(cap.eval(bp).norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(rotational_minimal(4), Error);
}

TEST_CASE("shooting in dimension 2 reproduces the critical catenoid") {
  auto res = solve_rotational_profile(2);
  CHECK(std::abs(res.contact_u) < 1e-10);
  CHECK(res.waist == doctest::Approx(kC).epsilon(1e-8));
  // Sphere contact at (c cosh s0, c s0); arclength of the half profile is
  // c sinh s0.
  CHECK(res.profile.boundary_r() == doctest::Approx(1.0 / kS0).epsilon(1e-8));
  CHECK(res.profile.boundary_z() == doctest::Approx(kC * kS0).epsilon(1e-8));
  CHECK(res.profile.half_length() ==
        doctest::Approx(kC * std::sinh(kS0)).epsilon(1e-8));
  CHECK(res.bisection_steps > 20);
}

TEST_CASE("profile jets respect the reflection symmetry") {
  auto res = solve_rotational_profile(3);
  const double t = 0.31;
  double jp[6], jm[6];
  res.profile.jet(t, jp);
  res.profile.jet(-t, jm);
  CHECK(jm[0] == doctest::Approx(jp[0]).epsilon(1e-14));   // r even
  CHECK(jm[1] == doctest::Approx(-jp[1]).epsilon(1e-14));  // r' odd
  CHECK(jm[2] == doctest::Approx(jp[2]).epsilon(1e-14));   // r'' even
  CHECK(jm[3] == doctest::Approx(-jp[3]).epsilon(1e-14));  // z odd
  CHECK(jm[4] == doctest::Approx(jp[4]).epsilon(1e-14));   // z' even
  CHECK(jm[5] == doctest::Approx(-jp[5]).epsilon(1e-14));  // z'' odd

  long double r = 0, z = 0;
  res.profile.eval(static_cast<long double>(t), &r, &z);
  CHECK(static_cast<double>(r) == doctest::Approx(jp[0]).epsilon(1e-13));
  CHECK(static_cast<double>(z) == doctest::Approx(jp[3]).epsilon(1e-13));
}

TEST_CASE("rotational minimal hypersurface in dimension 3") {
  auto res = solve_rotational_profile(3);
  CHECK(res.waist == doctest::Approx(kWaist3).epsilon(1e-9));
  CHECK(res.profile.half_length() == doctest::Approx(kHalfLength3).epsilon(1e-6));
  CHECK(std::abs(res.contact_u) < 1e-10);
  CHECK(res.profile.boundary_r() * res.profile.boundary_r() +
            res.profile.boundary_z() * res.profile.boundary_z() ==
        doctest::Approx(1.0).epsilon(1e-10));

  auto rot = rotational_minimal(3);
  CHECK(rot.id == "rotational-minimal-3");
  CHECK(rot.dim == 3);
  CHECK(rot.claims_minimal);
  REQUIRE(rot.sphere_faces.size() == 2);
  // Minimality of the revolved surface, pointwise.
  for (double t : {-0.4, 0.0, 0.25, 0.5}) {
    Eigen::Vector3d p(1.2, 0.7, t);
    CHECK(std::abs(sample_at(rot, p).mean_curvature) < 1e-8);
  }
  // Boundary spheres on the unit sphere.
  Eigen::Vector3d bp(0.9, 2.0, rot.box.hi[2]);
  CHECK(rot.eval(bp).norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(support_function(rot, bp, 1e-3)) < 1e-8);
}

TEST_CASE("rotational minimal in dimension 2 is the catenoid, reparametrized") {
  auto rot = rotational_minimal(2);
  // Waist circle and boundary circle radii match the closed form.
  Eigen::Vector2d waist(0.0, 0.0);
  CHECK(rot.eval(waist).head(2).norm() == doctest::Approx(kC).epsilon(1e-8));
  Eigen::Vector2d bp(0.0, rot.box.hi[1]);
  CHECK(rot.eval(bp).head(2).norm() == doctest::Approx(1.0 / kS0).epsilon(1e-8));
  CHECK(std::abs(sample_at(rot, Eigen::Vector2d(0.4, 0.2)).mean_curvature) < 1e-8);
}

TEST_CASE("shooting reports a bracket failure when the sphere is unreachable") {
  ShootingOptions opt;
  opt.max_arclength = 0.3;  // no profile reaches |x| = 1 this fast
  CHECK_THROWS_AS(solve_rotational_profile(2, opt), ShootingBracketError);
}
