#include "freebound/exact.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "freebound/types.hpp"

namespace freebound {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr long double kPiL = 3.141592653589793238462643383279502884L;

double s0_equation(double s) { return s * std::tanh(s) - 1.0; }

// Circle and 2-sphere direction vectors with their angle jets; these feed
// every surface-of-revolution chart below.
struct OmegaJet {
  Eigen::VectorXd w;                  // omega
  std::vector<Eigen::VectorXd> dw;    // d omega / d angle_i
  std::vector<Eigen::VectorXd> ddw;   // flattened i*k+j second derivatives
};

OmegaJet circle_jet(double th) {
  OmegaJet o;
  const double c = std::cos(th), s = std::sin(th);
  o.w = Eigen::Vector2d(c, s);
  o.dw = {Eigen::Vector2d(-s, c)};
  o.ddw = {Eigen::Vector2d(-c, -s)};
  return o;
}

OmegaJet sphere_jet(double phi, double th) {
  OmegaJet o;
  const double cf = std::cos(phi), sf = std::sin(phi);
  const double ct = std::cos(th), st = std::sin(th);
  o.w = Eigen::Vector3d(sf * ct, sf * st, cf);
  o.dw = {Eigen::Vector3d(cf * ct, cf * st, -sf),
          Eigen::Vector3d(-sf * st, sf * ct, 0.0)};
  o.ddw.resize(4);
  o.ddw[0] = -o.w;                                      // phi phi
  o.ddw[1] = Eigen::Vector3d(-cf * st, cf * ct, 0.0);   // phi theta
  o.ddw[2] = o.ddw[1];                                  // theta phi
  o.ddw[3] = Eigen::Vector3d(-sf * ct, -sf * st, 0.0);  // theta theta
  return o;
}

// Profile (r(t), z(t)) with two derivatives; drives the revolution charts.
struct ProfileJet {
  double r, rp, rpp, z, zp, zpp;
};
using ProfileJetFn = std::function<ProfileJet(double)>;
using ProfileEvalL = std::function<void(long double, long double*, long double*)>;

ParametricHypersurface revolution_surface(std::string id, int n, double t_lo,
                                          double t_hi, ProfileEvalL eval,
                                          ProfileJetFn pjet, bool face_lo,
                                          bool face_hi, double polar_margin,
                                          double t_margin) {
  if (n != 2 && n != 3)
    throw Error("revolution surfaces implemented for dim 2 and 3 only");
  ParametricHypersurface s;
  s.id = std::move(id);
  s.dim = n;
  if (n == 2) {
    s.box.lo = Eigen::Vector2d(0.0, t_lo);
    s.box.hi = Eigen::Vector2d(2 * kPi, t_hi);
    s.box.periodic = {true, false};
    s.sample_margin = Eigen::Vector2d(0.0, t_margin);
  } else {
    s.box.lo = Eigen::Vector3d(0.0, 0.0, t_lo);
    s.box.hi = Eigen::Vector3d(kPi, 2 * kPi, t_hi);
    s.box.periodic = {false, true, false};
    s.sample_margin = Eigen::Vector3d(polar_margin, 0.0, t_margin);
  }
  s.chart = [n, eval](const long double* p, long double* out) {
    long double r, z;
    eval(p[n - 1], &r, &z);
    if (n == 2) {
      out[0] = r * std::cos(p[0]);
      out[1] = r * std::sin(p[0]);
      out[2] = z;
    } else {
      const long double sf = std::sin(p[0]), cf = std::cos(p[0]);
      out[0] = r * sf * std::cos(p[1]);
      out[1] = r * sf * std::sin(p[1]);
      out[2] = r * cf;
      out[3] = z;
    }
  };
  s.jet = [n, pjet](const Eigen::VectorXd& p) {
    const ProfileJet pr = pjet(p[n - 1]);
    OmegaJet o = (n == 2) ? circle_jet(p[0]) : sphere_jet(p[0], p[1]);
    const int m = n + 1;
    const int k = n - 1;  // number of angle axes
    ChartJet jet;
    jet.point.resize(m);
    jet.point << pr.r * o.w, pr.z;
    jet.d1.resize(m, n);
    for (int i = 0; i < k; ++i) {
      jet.d1.col(i).head(m - 1) = pr.r * o.dw[i];
      jet.d1(m - 1, i) = 0.0;
    }
    jet.d1.col(n - 1).head(m - 1) = pr.rp * o.w;
    jet.d1(m - 1, n - 1) = pr.zp;
    jet.d2.assign(n * n, Eigen::VectorXd::Zero(m));
    auto set = [&](int i, int j, const Eigen::VectorXd& top, double last) {
      Eigen::VectorXd v(m);
      v << top, last;
      jet.d2[i * n + j] = v;
      jet.d2[j * n + i] = std::move(v);
    };
    for (int i = 0; i < k; ++i)
      for (int j = i; j < k; ++j) set(i, j, pr.r * o.ddw[i * k + j], 0.0);
    for (int i = 0; i < k; ++i) set(i, n - 1, pr.rp * o.dw[i], 0.0);
    set(n - 1, n - 1, pr.rpp * o.w, pr.zpp);
    return jet;
  };
  if (face_lo) s.sphere_faces.push_back({n - 1, false});
  if (face_hi) s.sphere_faces.push_back({n - 1, true});
  return s;
}

}  // namespace

double catenoid_s0_bisection(double tol) {
  double lo = 0.5, hi = 2.0;
  if (s0_equation(lo) >= 0 || s0_equation(hi) <= 0)
    throw Error("catenoid bracket invalid");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (s0_equation(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double catenoid_s0_newton(double tol) {
  double s = 1.2;
  for (int i = 0; i < 100; ++i) {
    const double th = std::tanh(s);
    const double sech = 1.0 / std::cosh(s);
    const double f = s * th - 1.0;
    const double fp = th + s * sech * sech;
    const double step = f / fp;
    s -= step;
    if (std::fabs(step) < tol) return s;
  }
  throw Error("catenoid Newton iteration did not converge");
}

CatenoidParameters critical_catenoid_parameters() {
  CatenoidParameters cp;
  cp.s0 = catenoid_s0_newton();
  const double ch = std::cosh(cp.s0), sh = std::sinh(cp.s0);
  cp.scale = 1.0 / std::sqrt(ch * ch + cp.s0 * cp.s0);
  cp.waist_radius = cp.scale;
  cp.boundary_radius = cp.scale * ch;
  cp.area = 2 * kPi * cp.scale * cp.scale * (cp.s0 + sh * ch);
  cp.boundary_length = 4 * kPi * cp.scale * ch;
  return cp;
}

ParametricHypersurface equatorial_disk(int n) {
  if (n != 2 && n != 3) throw Error("equatorial_disk implemented for n = 2, 3");
  ParametricHypersurface s;
  s.id = "equatorial-disk-" + std::to_string(n);
  s.dim = n;
  s.claims_minimal = true;
  s.claims_free_boundary = true;
  if (n == 2) {
    s.box.lo = Eigen::Vector2d(0.0, 0.0);
    s.box.hi = Eigen::Vector2d(1.0, 2 * kPi);
    s.box.periodic = {false, true};
    s.sample_margin = Eigen::Vector2d(0.02, 0.0);
    s.chart = [](const long double* p, long double* out) {
      out[0] = p[0] * std::cos(p[1]);
      out[1] = p[0] * std::sin(p[1]);
      out[2] = 0.0L;
    };
    s.jet = [](const Eigen::VectorXd& p) {
      OmegaJet o = circle_jet(p[1]);
      ChartJet jet;
      jet.point.resize(3);
      jet.point << p[0] * o.w, 0.0;
      jet.d1.resize(3, 2);
      jet.d1.col(0) << o.w, 0.0;
      jet.d1.col(1) << p[0] * o.dw[0], 0.0;
      jet.d2.assign(4, Eigen::VectorXd::Zero(3));
      jet.d2[1].head(2) = o.dw[0];
      jet.d2[2] = jet.d2[1];
      jet.d2[3].head(2) = p[0] * o.ddw[0];
      return jet;
    };
  } else {
    s.box.lo = Eigen::Vector3d(0.0, 0.0, 0.0);
    s.box.hi = Eigen::Vector3d(1.0, kPi, 2 * kPi);
    s.box.periodic = {false, false, true};
    s.sample_margin = Eigen::Vector3d(0.02, 0.02, 0.0);
    s.chart = [](const long double* p, long double* out) {
      const long double sf = std::sin(p[1]), cf = std::cos(p[1]);
      out[0] = p[0] * sf * std::cos(p[2]);
      out[1] = p[0] * sf * std::sin(p[2]);
      out[2] = p[0] * cf;
      out[3] = 0.0L;
    };
    s.jet = [](const Eigen::VectorXd& p) {
      OmegaJet o = sphere_jet(p[1], p[2]);
      ChartJet jet;
      jet.point.resize(4);
      jet.point << p[0] * o.w, 0.0;
      jet.d1.resize(4, 3);
      jet.d1.col(0) << o.w, 0.0;
      jet.d1.col(1) << p[0] * o.dw[0], 0.0;
      jet.d1.col(2) << p[0] * o.dw[1], 0.0;
      jet.d2.assign(9, Eigen::VectorXd::Zero(4));
      auto set = [&](int i, int j, const Eigen::Vector3d& top) {
        Eigen::VectorXd v(4);
        v << top, 0.0;
        jet.d2[i * 3 + j] = v;
        jet.d2[j * 3 + i] = std::move(v);
      };
      set(0, 1, o.dw[0]);
      set(0, 2, o.dw[1]);
      set(1, 1, p[0] * o.ddw[0]);
      set(1, 2, p[0] * o.ddw[1]);
      set(2, 2, p[0] * o.ddw[3]);
      return jet;
    };
  }
  s.sphere_faces.push_back({0, true});
  return s;
}

ParametricHypersurface critical_catenoid() {
  const CatenoidParameters cp = critical_catenoid_parameters();
  const double c = cp.scale;
  const long double cl = (long double)c;
  ProfileEvalL eval = [cl](long double t, long double* r, long double* z) {
    *r = cl * std::cosh(t);
    *z = cl * t;
  };
  ProfileJetFn pjet = [c](double t) {
    ProfileJet p;
    p.r = c * std::cosh(t);
    p.rp = c * std::sinh(t);
    p.rpp = c * std::cosh(t);
    p.z = c * t;
    p.zp = c;
    p.zpp = 0.0;
    return p;
  };
  ParametricHypersurface s = revolution_surface("critical-catenoid", 2, -cp.s0,
                                                cp.s0, eval, pjet, true, true,
                                                0.0, 0.0);
  s.claims_minimal = true;
  s.claims_free_boundary = true;
  return s;
}

ParametricHypersurface spherical_cap(double height) {
  if (!(height > 0.0 && height < 2.0))
    throw Error("cap height must lie in (0, 2)");
  const double d = (height * height - 1.0) / (2.0 * height);
  const double R = (height * height + 1.0) / (2.0 * height);
  const double tb = std::acos(-d / R);
  const long double dl = d, Rl = R;
  ProfileEvalL eval = [Rl, dl](long double t, long double* r, long double* z) {
    *r = Rl * std::sin(t);
    *z = dl + Rl * std::cos(t);
  };
  ProfileJetFn pjet = [R, d](double t) {
    ProfileJet p;
    const double st = std::sin(t), ct = std::cos(t);
    p.r = R * st;
    p.rp = R * ct;
    p.rpp = -R * st;
    p.z = d + R * ct;
    p.zp = -R * st;
    p.zpp = -R * ct;
    return p;
  };
  ParametricHypersurface s = revolution_surface(
      "spherical-cap", 2, 0.0, tb, eval, pjet, false, true, 0.0, 0.02);
  s.claims_minimal = false;
  s.claims_free_boundary = false;
  return s;
}

ParametricHypersurface round_sphere() {
  ProfileEvalL eval = [](long double t, long double* r, long double* z) {
    *r = std::sin(t);
    *z = std::cos(t);
  };
  ProfileJetFn pjet = [](double t) {
    ProfileJet p;
    const double st = std::sin(t), ct = std::cos(t);
    p.r = st;
    p.rp = ct;
    p.rpp = -st;
    p.z = ct;
    p.zp = -st;
    p.zpp = -ct;
    return p;
  };
  ParametricHypersurface s = revolution_surface("round-sphere", 2, 0.0, kPi, eval,
                                                pjet, false, false, 0.0, 0.02);
  s.claims_minimal = false;
  s.claims_free_boundary = false;
  return s;
}

namespace {

struct OdeState {
  double r, z, psi;
};

OdeState rhs(int n, const OdeState& y) {
  return {std::cos(y.psi), std::sin(y.psi), -(n - 1) * std::sin(y.psi) / y.r};
}

OdeState rk4_step(int n, const OdeState& y, double dt) {
  const OdeState k1 = rhs(n, y);
  const OdeState y2{y.r + 0.5 * dt * k1.r, y.z + 0.5 * dt * k1.z,
                    y.psi + 0.5 * dt * k1.psi};
  const OdeState k2 = rhs(n, y2);
  const OdeState y3{y.r + 0.5 * dt * k2.r, y.z + 0.5 * dt * k2.z,
                    y.psi + 0.5 * dt * k2.psi};
  const OdeState k3 = rhs(n, y3);
  const OdeState y4{y.r + dt * k3.r, y.z + dt * k3.z, y.psi + dt * k3.psi};
  const OdeState k4 = rhs(n, y4);
  return {y.r + dt / 6.0 * (k1.r + 2 * k2.r + 2 * k3.r + k4.r),
          y.z + dt / 6.0 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z),
          y.psi + dt / 6.0 * (k1.psi + 2 * k2.psi + 2 * k3.psi + k4.psi)};
}

double hermite(double p0, double m0, double p1, double m1, double s, double dt) {
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * dt * m0 +
         (-2 * s3 + 3 * s2) * p1 + (s3 - s2) * dt * m1;
}

OdeState hermite_state(int n, const OdeState& a, const OdeState& b, double s,
                       double dt) {
  const OdeState fa = rhs(n, a), fb = rhs(n, b);
  return {hermite(a.r, fa.r, b.r, fb.r, s, dt),
          hermite(a.z, fa.z, b.z, fb.z, s, dt),
          hermite(a.psi, fa.psi, b.psi, fb.psi, s, dt)};
}

struct ContactResult {
  bool hit = false;
  double T = 0;
  OdeState end{};
  std::vector<OdeState> states;  // uniform grid, only when requested
};

ContactResult integrate_to_sphere(int n, double a, double dt, double maxT,
                                  bool store) {
  ContactResult out;
  OdeState y{a, 0.0, kPi / 2};
  if (store) out.states.push_back(y);
  double t = 0.0;
  const auto radius2 = [](const OdeState& s) { return s.r * s.r + s.z * s.z; };
  while (t < maxT) {
    OdeState y1 = rk4_step(n, y, dt);
    if (radius2(y1) >= 1.0) {
      double slo = 0.0, shi = 1.0;
      for (int it = 0; it < 80; ++it) {
        const double sm = 0.5 * (slo + shi);
        (radius2(hermite_state(n, y, y1, sm, dt)) < 1.0 ? slo : shi) = sm;
      }
      const double sm = 0.5 * (slo + shi);
      out.hit = true;
      out.T = t + sm * dt;
      out.end = hermite_state(n, y, y1, sm, dt);
      return out;
    }
    y = y1;
    t += dt;
    if (store) out.states.push_back(y);
  }
  return out;
}

double contact_support(const OdeState& s) {
  return s.r * std::sin(s.psi) - s.z * std::cos(s.psi);
}

}  // namespace

ProfileCurve::ProfileCurve(int n, double dt, std::vector<double> r,
                           std::vector<double> z, std::vector<double> psi, double T,
                           double r_end, double z_end, double psi_end)
    : n_(n),
      dt_(dt),
      T_(T),
      r_(std::move(r)),
      z_(std::move(z)),
      psi_(std::move(psi)),
      r_end_(r_end),
      z_end_(z_end),
      psi_end_(psi_end) {
  // Keep the final partial interval at least half a step long so the Hermite
  // coefficients stay well scaled.
  while (r_.size() > 1 && T_ - (r_.size() - 1) * dt_ < 0.5 * dt_) {
    r_.pop_back();
    z_.pop_back();
    psi_.pop_back();
  }
}

void ProfileCurve::state(double t, double* r, double* z, double* psi) const {
  const size_t K = r_.size() - 1;  // last uniform index
  double tl = std::min(t, T_);
  size_t k = std::min<size_t>(static_cast<size_t>(tl / dt_), K);
  OdeState a{r_[k], z_[k], psi_[k]};
  OdeState b;
  double seg;
  if (k == K) {
    b = {r_end_, z_end_, psi_end_};
    seg = T_ - K * dt_;
  } else {
    b = {r_[k + 1], z_[k + 1], psi_[k + 1]};
    seg = dt_;
  }
  const double s = (tl - k * dt_) / seg;
  OdeState y = hermite_state(n_, a, b, s, seg);
  *r = y.r;
  *z = y.z;
  *psi = y.psi;
}

void ProfileCurve::jet(double t, double out[6]) const {
  const double ta = std::fabs(t);
  double r, z, psi;
  state(ta, &r, &z, &psi);
  const double sp = std::sin(psi), cp = std::cos(psi);
  double rp = cp, zp = sp;
  double rpp = (n_ - 1) * sp * sp / r;
  double zpp = -(n_ - 1) * sp * cp / r;
  double zv = z;
  if (t < 0) {
    // r even, z odd under the reflection t -> -t.
    rp = -rp;
    zv = -zv;
    zpp = -zpp;
  }
  out[0] = r;
  out[1] = rp;
  out[2] = rpp;
  out[3] = zv;
  out[4] = zp;
  out[5] = zpp;
}

void ProfileCurve::eval(long double t, long double* r, long double* z) const {
  const double ta = std::fabs(static_cast<double>(t));
  double rv, zv, psi;
  state(ta, &rv, &zv, &psi);
  *r = rv;
  *z = (t < 0) ? -zv : zv;
}

ShootingResult solve_rotational_profile(int n, const ShootingOptions& opt) {
  if (n != 2 && n != 3) throw Error("rotational profiles implemented for n = 2, 3");
  double lo = opt.bracket_lo, hi = opt.bracket_hi;
  if (lo <= 0 || hi <= 0) {
    lo = (n == 2) ? 0.30 : 0.45;
    hi = 0.70;
  }
  const auto g = [&](double a) {
    ContactResult c = integrate_to_sphere(n, a, opt.dt, opt.max_arclength, false);
    if (!c.hit)
      throw ShootingBracketError("profile from waist " + std::to_string(a) +
                                 " never reached the unit sphere");
    return contact_support(c.end);
  };
  double glo = g(lo), ghi = g(hi);
  if (glo * ghi > 0) {
    // Scan for a usable bracket before giving up.
    bool found = false;
    double prev_a = 0.05, prev_g = g(prev_a);
    for (double a = 0.10; a <= 0.95; a += 0.05) {
      const double ga = g(a);
      if (prev_g * ga <= 0) {
        lo = prev_a;
        hi = a;
        glo = prev_g;
        ghi = ga;
        found = true;
        break;
      }
      prev_a = a;
      prev_g = ga;
    }
    if (!found)
      throw ShootingBracketError(
          "no sign change of the boundary functional for waist in [0.05, 0.95]");
  }
  ShootingResult res;
  while (hi - lo > opt.waist_tol) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    ++res.bisection_steps;
    if (glo * gm <= 0) {
      hi = mid;
      ghi = gm;
    } else {
      lo = mid;
      glo = gm;
    }
  }
  const double a = 0.5 * (lo + hi);
  ContactResult c = integrate_to_sphere(n, a, opt.dt, opt.max_arclength, true);
  if (!c.hit) throw ShootingBracketError("final profile lost the sphere contact");
  res.waist = a;
  res.contact_u = contact_support(c.end);
  std::vector<double> rr, zz, pp;
  rr.reserve(c.states.size());
  zz.reserve(c.states.size());
  pp.reserve(c.states.size());
  for (const OdeState& st : c.states) {
    rr.push_back(st.r);
    zz.push_back(st.z);
    pp.push_back(st.psi);
  }
  res.profile = ProfileCurve(n, opt.dt, std::move(rr), std::move(zz), std::move(pp),
                             c.T, c.end.r, c.end.z, c.end.psi);
  return res;
}

ParametricHypersurface rotational_minimal(int n, const ShootingOptions& opt) {
  ShootingResult sol = solve_rotational_profile(n, opt);
  auto pc = std::make_shared<ProfileCurve>(std::move(sol.profile));
  const double T = pc->half_length();
  ProfileEvalL eval = [pc](long double t, long double* r, long double* z) {
    pc->eval(t, r, z);
  };
  ProfileJetFn pjet = [pc](double t) {
    double j[6];
    pc->jet(t, j);
    return ProfileJet{j[0], j[1], j[2], j[3], j[4], j[5]};
  };
  ParametricHypersurface s =
      revolution_surface("rotational-minimal-" + std::to_string(n), n, -T, T, eval,
                         pjet, true, true, 0.02, 0.0);
  s.claims_minimal = true;
  s.claims_free_boundary = true;
  return s;
}

}  // namespace freebound
