#include "freebound/surface.hpp"

#include <cmath>

namespace freebound {

bool Box::contains(const Eigen::VectorXd& p, double tol) const {
  if (p.size() != lo.size()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (periodic[i]) continue;
    if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
  }
  return true;
}

Eigen::VectorXd ParametricHypersurface::eval(const Eigen::VectorXd& p) const {
  std::vector<long double> pin(dim), out(dim + 1);
  for (int i = 0; i < dim; ++i) pin[i] = p[i];
  chart(pin.data(), out.data());
  Eigen::VectorXd r(dim + 1);
  for (int i = 0; i <= dim; ++i) r[i] = static_cast<double>(out[i]);
  return r;
}

ParametricHypersurface with_flipped_normal(const ParametricHypersurface& s) {
  ParametricHypersurface r = s;
  r.orientation = -s.orientation;
  r.id = s.id + "#flipped";
  return r;
}

ParametricHypersurface rotated(const ParametricHypersurface& s,
                               const Eigen::MatrixXd& R) {
  const int m = s.dim + 1;
  if (R.rows() != m || R.cols() != m) throw Error("rotation matrix has wrong size");
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  MatL Rl = R.cast<long double>();
  ParametricHypersurface r = s;
  r.id = s.id + "#rotated";
  auto base = s.chart;
  int n = s.dim;
  r.chart = [base, Rl, n](const long double* p, long double* out) {
    std::vector<long double> tmp(n + 1);
    base(p, tmp.data());
    for (int i = 0; i <= n; ++i) {
      long double acc = 0.0L;
      for (int j = 0; j <= n; ++j) acc += Rl(i, j) * tmp[j];
      out[i] = acc;
    }
  };
  if (s.jet) {
    auto bjet = s.jet;
    Eigen::MatrixXd Rd = R;
    r.jet = [bjet, Rd](const Eigen::VectorXd& p) {
      ChartJet j = bjet(p);
      j.point = Rd * j.point;
      j.d1 = Rd * j.d1;
      for (auto& v : j.d2) v = Rd * v;
      return j;
    };
  }
  return r;
}

KillingField::KillingField(Eigen::MatrixXd skew, Eigen::VectorXd trans)
    : skew_(std::move(skew)), trans_(std::move(trans)) {
  if (skew_.rows() != skew_.cols() || skew_.rows() != trans_.size())
    throw Error("Killing field dimensions mismatch");
  const double asym = (skew_ + skew_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * (1.0 + skew_.cwiseAbs().maxCoeff()))
    throw Error("rotation part is not skew-symmetric");
  // Symmetrize exactly so downstream algebra sees a true Killing field.
  skew_ = 0.5 * (skew_ - skew_.transpose().eval());
}

KillingField KillingField::translation(const Eigen::VectorXd& b) {
  KillingField v(Eigen::MatrixXd::Zero(b.size(), b.size()), b);
  return v;
}

KillingField KillingField::rotation(int i, int j, int ambient_dim) {
  if (i == j || i < 0 || j < 0 || i >= ambient_dim || j >= ambient_dim)
    throw Error("invalid rotation plane");
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(ambient_dim, ambient_dim);
  B(i, j) = -1.0;
  B(j, i) = 1.0;  // V(x) = e_j x_i - e_i x_j, the generator of e_i -> e_j motion
  return KillingField(B, Eigen::VectorXd::Zero(ambient_dim));
}

bool KillingField::is_translation() const {
  return skew_.cwiseAbs().maxCoeff() == 0.0;
}

KillingField KillingField::conjugated(const Eigen::MatrixXd& R) const {
  KillingField v(R * skew_ * R.transpose(), R * trans_);
  v.name = name.empty() ? "" : name + "#conj";
  return v;
}

std::vector<KillingField> killing_basis(int ambient_dim) {
  static const char* axis_names = "xyzw";
  std::vector<KillingField> basis;
  for (int i = 0; i < ambient_dim; ++i) {
    KillingField v = KillingField::translation(Eigen::VectorXd::Unit(ambient_dim, i));
    v.name = std::string("t") + (i < 4 ? std::string(1, axis_names[i]) : std::to_string(i));
    basis.push_back(std::move(v));
  }
  for (int i = 0; i < ambient_dim; ++i)
    for (int j = i + 1; j < ambient_dim; ++j) {
      KillingField v = KillingField::rotation(i, j, ambient_dim);
      std::string a = i < 4 ? std::string(1, axis_names[i]) : std::to_string(i);
      std::string b = j < 4 ? std::string(1, axis_names[j]) : std::to_string(j);
      v.name = "r" + a + b;
      basis.push_back(std::move(v));
    }
  return basis;
}

KillingField killing_by_name(const std::string& name, int ambient_dim) {
  for (auto& v : killing_basis(ambient_dim))
    if (v.name == name) return v;
  throw ParseError("unknown Killing field '" + name + "' for ambient dim " +
                   std::to_string(ambient_dim));
}

static std::vector<double> axis_samples(const ParametricHypersurface& s, int axis,
                                        int per_axis, bool on_face, double face_coord) {
  std::vector<double> ts;
  if (on_face) {
    ts.assign(1, face_coord);
    return ts;
  }
  const bool per = s.box.periodic[axis];
  double lo = s.box.lo[axis], hi = s.box.hi[axis];
  if (!per && s.sample_margin.size() == s.box.dim()) {
    lo += s.sample_margin[axis];
    hi -= s.sample_margin[axis];
  }
  ts.reserve(per_axis);
  if (per) {
    const double step = (hi - lo) / per_axis;
    for (int k = 0; k < per_axis; ++k) ts.push_back(lo + k * step);
  } else {
    const double step = (hi - lo) / per_axis;
    for (int k = 0; k < per_axis; ++k) ts.push_back(lo + (k + 0.5) * step);
  }
  return ts;
}

static std::vector<Eigen::VectorXd> tensor_grid(
    const std::vector<std::vector<double>>& axes) {
  std::vector<Eigen::VectorXd> pts;
  const int d = static_cast<int>(axes.size());
  std::vector<size_t> idx(d, 0);
  size_t total = 1;
  for (auto& a : axes) total *= a.size();
  pts.reserve(total);
  Eigen::VectorXd p(d);
  while (true) {
    for (int i = 0; i < d; ++i) p[i] = axes[i][idx[i]];
    pts.push_back(p);
    int ax = 0;
    while (ax < d && ++idx[ax] == axes[ax].size()) idx[ax++] = 0;
    if (ax == d) break;
  }
  return pts;
}

std::vector<Eigen::VectorXd> interior_grid(const ParametricHypersurface& s,
                                           int per_axis) {
  std::vector<std::vector<double>> axes;
  for (int i = 0; i < s.dim; ++i)
    axes.push_back(axis_samples(s, i, per_axis, false, 0.0));
  return tensor_grid(axes);
}

std::vector<Eigen::VectorXd> face_grid(const ParametricHypersurface& s,
                                       const BoundaryFace& face, int per_axis) {
  std::vector<std::vector<double>> axes;
  for (int i = 0; i < s.dim; ++i) {
    const bool fixed = (i == face.axis);
    axes.push_back(axis_samples(s, i, per_axis, fixed, face.coordinate(s.box)));
  }
  return tensor_grid(axes);
}

}  // namespace freebound
