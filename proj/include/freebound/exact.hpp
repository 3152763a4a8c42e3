#pragma once

#include <functional>
#include <vector>

#include "freebound/surface.hpp"

namespace freebound {

// Parameters of the rotationally symmetric minimal annulus meeting the unit
// sphere orthogonally. s0 solves s*tanh(s) = 1; the scale c makes the
// boundary circles land on the sphere.
struct CatenoidParameters {
  double s0 = 0;
  double scale = 0;            // c = 1/sqrt(cosh^2 s0 + s0^2)
  double waist_radius = 0;     // c
  double boundary_radius = 0;  // c cosh s0
  double area = 0;             // 2 pi c^2 (s0 + sinh s0 cosh s0)
  double boundary_length = 0;  // 4 pi c cosh s0
};

CatenoidParameters critical_catenoid_parameters();
// Root of s*tanh(s) - 1 by each method; the two must agree to ~1e-14.
double catenoid_s0_bisection(double tol = 1e-14);
double catenoid_s0_newton(double tol = 1e-15);

// Flat n-disk through the origin, chart (r, angles...), boundary at r = 1.
ParametricHypersurface equatorial_disk(int n);

// Chart (theta, s) -> c (cosh s cos theta, cosh s sin theta, s/1) scaled so
// both boundary circles are on the unit sphere and meet it orthogonally.
ParametricHypersurface critical_catenoid();

// Non-minimal control: spherical cap of the given apex height in (0, 2),
// boundary circle on the unit sphere but meeting it at a non-right angle.
// Chart (theta, t) with t the polar angle from the apex.
ParametricHypersurface spherical_cap(double height);

// Round unit sphere (control surface with no boundary), chart is polar:
// n = 2 only.
ParametricHypersurface round_sphere();

// Profile curve (r(t), z(t)) of a rotationally symmetric minimal
// hypersurface, arclength parameter t in [-T, T], produced by the shooting
// solver. States are stored on a uniform grid and interpolated with cubic
// Hermite polynomials whose endpoint derivatives come from the generating
// ODE, so interpolation error is far below double roundoff at the step
// sizes used.
class ProfileCurve {
 public:
  ProfileCurve() = default;
  ProfileCurve(int n, double dt, std::vector<double> r, std::vector<double> z,
               std::vector<double> psi, double T, double r_end, double z_end,
               double psi_end);

  int surface_dim() const { return n_; }
  double half_length() const { return T_; }
  double boundary_r() const { return r_end_; }
  double boundary_z() const { return z_end_; }
  double boundary_psi() const { return psi_end_; }
  double waist() const { return r_.empty() ? 0.0 : r_[0]; }

  // jet[0..5] = r, r', r'', z, z', z''  at t (negative t by symmetry).
  void jet(double t, double out[6]) const;
  void eval(long double t, long double* r, long double* z) const;

 private:
  void state(double t, double* r, double* z, double* psi) const;

  int n_ = 0;
  double dt_ = 0;
  double T_ = 0;
  std::vector<double> r_, z_, psi_;
  double r_end_ = 0, z_end_ = 0, psi_end_ = 0;
};

struct ShootingOptions {
  double dt = 2e-5;
  double bracket_lo = 0;  // 0 = pick a default for the dimension
  double bracket_hi = 0;
  double waist_tol = 1e-13;
  double max_arclength = 5.0;
};

struct ShootingResult {
  double waist = 0;      // r at the neck
  double contact_u = 0;  // support function at sphere contact; ~0 at the root
  int bisection_steps = 0;
  ProfileCurve profile;
};

// Shoots the generating ODE  r' = cos psi, z' = sin psi,
// psi' = -(n-1) sin(psi)/r  from (a, 0, pi/2) until the curve hits the unit
// sphere, and bisects the waist radius a until the free-boundary functional
// u = r sin(psi) - z cos(psi) vanishes at contact.
ShootingResult solve_rotational_profile(int n, const ShootingOptions& opt = {});

// Rotationally symmetric free-boundary minimal hypersurface M^n in R^{n+1}
// from the shooting solver. n = 2 reproduces the critical catenoid up to
// reparametrization; n = 3 is the genuinely new case. Chart order is
// (angles..., t).
ParametricHypersurface rotational_minimal(int n, const ShootingOptions& opt = {});

}  // namespace freebound
