#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "freebound/types.hpp"

namespace freebound {

// Chart evaluation in extended precision: p has dim entries, out has dim+1.
// Extended precision matters because curvature pipelines difference the chart
// twice; the extra mantissa bits push the roundoff floor well below the
// truncation error at the step sizes used here.
using ChartFn = std::function<void(const long double* p, long double* out)>;

// Second-order jet of the immersion at a parameter point.
struct ChartJet {
  Eigen::VectorXd point;            // F(p), in R^{n+1}
  Eigen::MatrixXd d1;               // (n+1) x n, column i is ∂_i F
  std::vector<Eigen::VectorXd> d2;  // flattened i*n+j, ∂_i ∂_j F (symmetric)

  const Eigen::VectorXd& second(int i, int j) const {
    const int n = static_cast<int>(d1.cols());
    return d2[i * n + j];
  }
};

using JetFn = std::function<ChartJet(const Eigen::VectorXd&)>;

// Axis-aligned parameter box, possibly periodic per axis.
struct Box {
  Eigen::VectorXd lo, hi;
  std::vector<bool> periodic;

  int dim() const { return static_cast<int>(lo.size()); }
  double length(int axis) const { return hi[axis] - lo[axis]; }
  bool contains(const Eigen::VectorXd& p, double tol = 0.0) const;
};

// A face of the parameter box whose image lies on the unit sphere.
struct BoundaryFace {
  int axis = 0;
  bool upper = true;
  double coordinate(const Box& b) const { return upper ? b.hi[axis] : b.lo[axis]; }
};

// Immersed hypersurface patch F : box ⊂ R^n → R^{n+1}.
//
// `chart` is mandatory. `jet` is an optional closed-form second-order jet;
// when present it is preferred by the geometry layer unless finite
// differencing is explicitly requested. Flags record what the constructor
// claims about the surface; verification routines re-measure before trusting
// them.
struct ParametricHypersurface {
  std::string id;
  int dim = 0;  // n; ambient space is R^{n+1}
  Box box;
  ChartFn chart;
  JetFn jet;
  std::vector<BoundaryFace> sphere_faces;
  bool claims_minimal = false;
  bool claims_free_boundary = false;
  double orientation = 1.0;      // -1 flips the unit normal
  Eigen::VectorXd sample_margin;  // per-axis inset for interior sample grids

  Eigen::VectorXd eval(const Eigen::VectorXd& p) const;
  bool has_jet() const { return static_cast<bool>(jet); }
};

// Same surface with the normal orientation reversed.
ParametricHypersurface with_flipped_normal(const ParametricHypersurface& s);

// Image of the surface under the ambient rotation x ↦ R x.
ParametricHypersurface rotated(const ParametricHypersurface& s,
                               const Eigen::MatrixXd& R);

// Killing field of R^{n+1}: V(x) = B x + b with B skew-symmetric.
class KillingField {
 public:
  KillingField() = default;
  KillingField(Eigen::MatrixXd skew, Eigen::VectorXd trans);

  static KillingField translation(const Eigen::VectorXd& b);
  // Generator of rotations in the (e_i, e_j) coordinate plane.
  static KillingField rotation(int i, int j, int ambient_dim);

  int ambient_dim() const { return static_cast<int>(trans_.size()); }
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    return skew_ * x + trans_;
  }
  const Eigen::MatrixXd& skew() const { return skew_; }
  const Eigen::VectorXd& translation_part() const { return trans_; }
  bool is_translation() const;

  // Push-forward under the ambient rotation x ↦ R x.
  KillingField conjugated(const Eigen::MatrixXd& R) const;

  std::string name;

 private:
  Eigen::MatrixXd skew_;
  Eigen::VectorXd trans_;
};

// The standard basis: translations along each axis, then rotation generators
// for each coordinate plane. For ambient dim 3: tx ty tz rxy rxz ryz.
std::vector<KillingField> killing_basis(int ambient_dim);
// Parses "tx", "ty", "tz", "rxy", ... against the basis; throws ParseError.
KillingField killing_by_name(const std::string& name, int ambient_dim);

// Uniform lattice strictly inside the box (cell-centered after shrinking
// non-periodic axes by sample_margin). per_axis points along every axis.
std::vector<Eigen::VectorXd> interior_grid(const ParametricHypersurface& s,
                                           int per_axis);
// Lattice on a sphere face: the face coordinate is exact, the remaining axes
// follow the interior rule.
std::vector<Eigen::VectorXd> face_grid(const ParametricHypersurface& s,
                                       const BoundaryFace& face, int per_axis);

}  // namespace freebound
