#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Core>

#include "freebound/exact.hpp"
#include "freebound/surface.hpp"
#include "freebound/types.hpp"

using namespace freebound;

TEST_CASE("box containment respects periodic axes and tolerance") {
  Box b;
  b.lo = Eigen::Vector2d(0.0, -1.0);
  b.hi = Eigen::Vector2d(2 * std::numbers::pi, 1.0);
  b.periodic = {true, false};

  CHECK(b.contains(Eigen::Vector2d(3.0, 0.5)));
  // Periodic axis never rejects.
  CHECK(b.contains(Eigen::Vector2d(100.0, 0.0)));
  CHECK_FALSE(b.contains(Eigen::Vector2d(1.0, 1.5)));
  CHECK(b.contains(Eigen::Vector2d(1.0, 1.0 + 1e-9), 1e-8));
  CHECK_FALSE(b.contains(Eigen::Vector3d(1.0, 0.0, 0.0)));
}

TEST_CASE("killing field constructor validates the rotation part") {
  Eigen::MatrixXd notskew = Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(KillingField(notskew, Eigen::Vector3d::Zero()), Error);

  Eigen::MatrixXd bad(3, 2);
  bad.setZero();
  CHECK_THROWS_AS(KillingField(Eigen::MatrixXd::Zero(3, 3), Eigen::Vector2d::Zero()),
                  Error);
}

TEST_CASE("translation and rotation generators act as expected") {
  auto tz = KillingField::translation(Eigen::Vector3d(0, 0, 1));
  CHECK(tz.is_translation());
  CHECK(tz.ambient_dim() == 3);
  Eigen::Vector3d x(0.3, -0.7, 2.0);
  CHECK((tz(x) - Eigen::Vector3d(0, 0, 1)).norm() == doctest::Approx(0.0));

  auto rxy = KillingField::rotation(0, 1, 3);
  CHECK_FALSE(rxy.is_translation());
  // Generator of the motion e_x -> e_y: V(e_x) = e_y.
  Eigen::Vector3d vx = rxy(Eigen::Vector3d(1, 0, 0));
  CHECK(vx[1] == doctest::Approx(1.0));
  CHECK(std::abs(vx[0]) + std::abs(vx[2]) < 1e-15);
  // Tangent to circles: <V(x), x> = 0.
  CHECK(std::abs(rxy(x).dot(x)) < 1e-15);

  CHECK_THROWS_AS(KillingField::rotation(1, 1, 3), Error);
  CHECK_THROWS_AS(KillingField::rotation(0, 3, 3), Error);
}

TEST_CASE("killing basis enumerates translations then rotation planes") {
  auto basis3 = killing_basis(3);
  REQUIRE(basis3.size() == 6);
  std::vector<std::string> want3 = {"tx", "ty", "tz", "rxy", "rxz", "ryz"};
  for (size_t i = 0; i < want3.size(); ++i) CHECK(basis3[i].name == want3[i]);

  auto basis4 = killing_basis(4);
  REQUIRE(basis4.size() == 10);
  std::vector<std::string> want4 = {"tx",  "ty",  "tz",  "tw",  "rxy",
                                    "rxz", "rxw", "ryz", "ryw", "rzw"};
  for (size_t i = 0; i < want4.size(); ++i) CHECK(basis4[i].name == want4[i]);
}

TEST_CASE("killing_by_name resolves names and rejects unknown ones") {
  auto v = killing_by_name("ryz", 3);
  CHECK(v.name == "ryz");
  Eigen::Vector3d y(0, 1, 0);
  CHECK(v(y)[2] == doctest::Approx(1.0));

  CHECK_THROWS_AS(killing_by_name("tq", 3), ParseError);
  CHECK_THROWS_AS(killing_by_name("rxw", 3), ParseError);  // valid only in dim 4
  CHECK_NOTHROW(killing_by_name("rxw", 4));
}

TEST_CASE("conjugation pushes a field forward through a rotation") {
  const double a = 0.7;
  Eigen::Matrix3d R;
  R << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;

  auto tz = killing_by_name("tz", 3);
  auto tzc = tz.conjugated(R);
  CHECK(tzc.name == "tz#conj");
  // V'(Rx) = R V(x).
  Eigen::Vector3d x(0.2, 0.5, -0.3);
  CHECK((tzc(R * x) - R * tz(x)).norm() < 1e-14);

  auto rxz = killing_by_name("rxz", 3);
  auto rxzc = rxz.conjugated(R);
  CHECK((rxzc(R * x) - R * rxz(x)).norm() < 1e-14);
}

TEST_CASE("interior grid is cell-centered and respects the sample margin") {
  auto disk = equatorial_disk(2);
  auto pts = interior_grid(disk, 8);
  CHECK(pts.size() == 64);
  for (const auto& p : pts) {
    CHECK(disk.box.contains(p));
    // Strictly interior along non-periodic axes.
    for (int i = 0; i < disk.box.dim(); ++i) {
      if (disk.box.periodic[i]) continue;
      CHECK(p[i] > disk.box.lo[i]);
      CHECK(p[i] < disk.box.hi[i]);
    }
  }
}

TEST_CASE("face grid pins the face coordinate exactly") {
  auto cat = critical_catenoid();
  REQUIRE(cat.sphere_faces.size() == 2);
  for (const auto& face : cat.sphere_faces) {
    auto pts = face_grid(cat, face, 16);
    CHECK(pts.size() == 16);
    const double want = face.coordinate(cat.box);
    for (const auto& p : pts) CHECK(p[face.axis] == want);
    // Face points land on the unit sphere.
    for (const auto& p : pts) CHECK(cat.eval(p).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("flipping the normal only toggles orientation and tags the id") {
  auto cat = critical_catenoid();
  auto flipped = with_flipped_normal(cat);
  CHECK(flipped.id == cat.id + "#flipped");
  CHECK(flipped.orientation == -cat.orientation);
  Eigen::Vector2d p(0.3, 0.2);
  CHECK((flipped.eval(p) - cat.eval(p)).norm() == 0.0);
}

TEST_CASE("rotating a surface rotates chart and jet consistently") {
  auto cat = critical_catenoid();
  const double a = 0.3;
  Eigen::Matrix3d R;
  R << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  auto rot = rotated(cat, R);
  CHECK(rot.id == cat.id + "#rotated");
  REQUIRE(rot.has_jet());

  Eigen::Vector2d p(1.1, -0.4);
  CHECK((rot.eval(p) - R * cat.eval(p)).norm() < 1e-15);

  auto j0 = cat.jet(p);
  auto j1 = rot.jet(p);
  CHECK((j1.point - R * j0.point).norm() < 1e-15);
  CHECK((j1.d1 - R * j0.d1).norm() < 1e-15);
  CHECK((j1.second(0, 1) - R * j0.second(0, 1)).norm() < 1e-15);

  Eigen::MatrixXd wrong = Eigen::MatrixXd::Identity(4, 4);
  CHECK_THROWS_AS(rotated(cat, wrong), Error);
}
