#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace freebound {

// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  static const GaussLegendre& get(int n);  // cached per order
};

// Tensor-product rule over an axis-aligned box in parameter space.
class QuadratureRule {
 public:
  QuadratureRule(Eigen::VectorXd lo, Eigen::VectorXd hi, int points_per_axis);

  int dim() const { return static_cast<int>(lo_.size()); }
  int points_per_axis() const { return points_; }
  // Total node count = points_per_axis ^ dim.
  long total_points() const;

  // Integrates f over the box. Nodes are strictly interior.
  double integrate(const std::function<double(const Eigen::VectorXd&)>& f) const;

  // Iterates nodes without allocating them all: cb(node, weight).
  void for_each_node(
      const std::function<void(const Eigen::VectorXd&, double)>& cb) const;

  const Eigen::VectorXd& lo() const { return lo_; }
  const Eigen::VectorXd& hi() const { return hi_; }

 private:
  Eigen::VectorXd lo_, hi_;
  int points_;
};

// Integrates with `points` and 2*`points` per axis and reports both values;
// used to certify convergence of area/volume integrals.
struct RefinementPair {
  double coarse = 0, fine = 0;
  double rel_change() const;
};
RefinementPair integrate_refined(
    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int points,
    const std::function<double(const Eigen::VectorXd&)>& f);

}  // namespace freebound
