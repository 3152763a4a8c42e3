#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "freebound/quadrature.hpp"
#include "freebound/surface.hpp"

namespace freebound {

// How second-order jets of the chart are obtained.
struct JetOptions {
  enum class Mode {
    automatic,          // closed form when the surface has one, else FD
    analytic,           // require the closed form
    finite_difference,  // force FD even when a closed form exists
  };
  Mode mode = Mode::automatic;
  // Relative FD step for chart derivatives; the absolute step on axis i is
  // h * (hi_i - lo_i).
  double h = 1e-3;
  int points = 5;  // stencil size; 4th-order central, widened off-center
};

ChartJet jet_at(const ParametricHypersurface& s, const Eigen::VectorXd& p,
                const JetOptions& opt = {});

// Pointwise first/second fundamental data, plus the Killing-field scalars
// when a field is supplied.
struct GeometrySample {
  Eigen::VectorXd point;
  Eigen::MatrixXd metric;
  Eigen::MatrixXd inverse_metric;
  Eigen::VectorXd normal;
  Eigen::MatrixXd second_form;
  double sqrt_det_g = 0;
  double mean_curvature = 0;
  double a_norm_sq = 0;
  double support = 0;  // u = <F, nu>
  double s_v = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> v_sq;  // 1/s_v^2, absent when s_v is (numerically) 0
  std::optional<double> q;     // u^2 v^2
};

GeometrySample sample_from_jet(const ChartJet& jet, double orientation,
                               const KillingField* V = nullptr);
GeometrySample sample_at(const ParametricHypersurface& s, const Eigen::VectorXd& p,
                         const JetOptions& opt = {}, const KillingField* V = nullptr);

// Named entry points matching the operation vocabulary. `h` is the relative
// FD step used when the surface has no closed-form jet.
Eigen::MatrixXd metric_at(const ParametricHypersurface& s, const Eigen::VectorXd& p,
                          double h);
Eigen::VectorXd unit_normal(const ParametricHypersurface& s, const Eigen::VectorXd& p,
                            double h);
GeometrySample shape_operator(const ParametricHypersurface& s,
                              const Eigen::VectorXd& p, double h);
double graph_quantity(const ParametricHypersurface& s, const KillingField& V,
                      const Eigen::VectorXd& p, double h);
double support_function(const ParametricHypersurface& s, const Eigen::VectorXd& p,
                        double h);
// u^2 / s_V^2; throws ZeroGraphQuantityError when |s_V| <= 1e-10.
double q_quantity(const ParametricHypersurface& s, const KillingField& V,
                  const Eigen::VectorXd& p, double h);

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

// Laplace-Beltrami of a chart scalar field by finite differences with
// relative step h. Two algebraically equivalent discretizations:
//
//   - laplace_beltrami: g^{ij} (d_i d_j f - Gamma^k_ij d_k f), second
//     differences of f plus first differences of the metric. Smaller O(h^2)
//     constant; the identity checks use this one.
//   - laplace_beltrami_divergence: nested first differences of
//     (1/sqrt(g)) d_i (sqrt(g) g^{ij} d_j f). Kept as an independent
//     discretization for cross-validation.
//
// Both are second order in h at interior points.
double laplace_beltrami(const ParametricHypersurface& s, const ScalarField& f,
                        const Eigen::VectorXd& p, double h,
                        const JetOptions& jets = {});
double laplace_beltrami_divergence(const ParametricHypersurface& s,
                                   const ScalarField& f, const Eigen::VectorXd& p,
                                   double h, const JetOptions& jets = {});

// Extended-precision path for fields that get differenced twice. A second
// difference divides the roundoff of the field values by h^2; at h = 1e-3
// that floors a double-precision field near 1e-10, which drowns comparisons
// that must hold tighter (ambient-rotation invariance of the identity
// residuals). These evaluators rebuild the few scalars the checks difference
// from the long double chart (finite differences; closed-form jets only
// exist in double), dropping the floor by the ratio of the two epsilons.
using LongScalarField = std::function<long double(const Eigen::VectorXd&)>;

struct ExtendedSample {
  long double support = 0;    // u = <F, nu>
  long double s_v = 0;        // <nu, V(F)>; 0 when no field is given
  long double a_norm_sq = 0;  // |A|^2
};
ExtendedSample extended_sample_at(const ParametricHypersurface& s,
                                  const Eigen::VectorXd& p, const JetOptions& opt = {},
                                  const KillingField* V = nullptr);

// laplace_beltrami with the field sampled and accumulated in long double;
// metric, inverse metric and Christoffel data still come from the double
// pipeline (their errors enter unamplified).
double laplace_beltrami_extended(const ParametricHypersurface& s,
                                 const LongScalarField& f, const Eigen::VectorXd& p,
                                 double h, const JetOptions& jets = {});

struct SurfaceGradient {
  Eigen::VectorXd partials;          // d_i f
  Eigen::VectorXd chart_components;  // (grad f)^i = g^{ij} d_j f
  Eigen::VectorXd ambient;           // push-forward d1 . chart_components
  double norm_sq = 0;                // g^{ij} d_i f d_j f
};
SurfaceGradient surface_gradient(const ParametricHypersurface& s, const ScalarField& f,
                                 const Eigen::VectorXd& p, double h,
                                 const JetOptions& jets = {});

// Christoffel symbols Gamma[k](i,j) from first differences of the metric.
std::vector<Eigen::MatrixXd> christoffels(const ParametricHypersurface& s,
                                          const Eigen::VectorXd& p, double h,
                                          const JetOptions& jets = {});

struct SecondFormDerivative {
  std::vector<Eigen::MatrixXd> cov;  // cov[k](i,j) = nabla_k h_ij
  double norm_sq = 0;                // |nabla A|^2
};
SecondFormDerivative second_form_derivative(const ParametricHypersurface& s,
                                            const Eigen::VectorXd& p, double h,
                                            const JetOptions& jets = {});
double nabla_A_norm_sq(const ParametricHypersurface& s, const Eigen::VectorXd& p,
                       double h);

// Outward unit conormal of the boundary face, i.e. the outward normal of
// dM inside M.
struct Conormal {
  Eigen::VectorXd chart_components;
  Eigen::VectorXd ambient;
};
Conormal outward_conormal(const ParametricHypersurface& s, const BoundaryFace& face,
                          const Eigen::VectorXd& p, const JetOptions& jets = {});
// <grad f, conormal> at a face point (one-sided stencils across the face).
double normal_derivative(const ParametricHypersurface& s, const BoundaryFace& face,
                         const ScalarField& f, const Eigen::VectorXd& p, double h,
                         const JetOptions& jets = {});

// Quadrature helpers bound to the surface's parameter box.
QuadratureRule quadrature_for(const ParametricHypersurface& s, int points_per_axis);

double surface_area(const ParametricHypersurface& s, const QuadratureRule& quad);
double boundary_volume(const ParametricHypersurface& s, const QuadratureRule& quad);

// Integral with convergence certification: points per axis double until the
// relative change drops below rel_tol (or the cap is reached).
struct CertifiedIntegral {
  double value = 0;
  double rel_change = 1;
  int points = 0;
  bool converged = false;
};
CertifiedIntegral certified_surface_area(const ParametricHypersurface& s,
                                         int initial_points = 16,
                                         double rel_tol = 1e-10,
                                         int max_points = 512);
CertifiedIntegral certified_boundary_volume(const ParametricHypersurface& s,
                                            int initial_points = 16,
                                            double rel_tol = 1e-10,
                                            int max_points = 512);

// Integrates a pointwise scalar over the surface / over its sphere boundary.
double integrate_scalar(const ParametricHypersurface& s, const QuadratureRule& quad,
                        const std::function<double(const Eigen::VectorXd&)>& value);
double integrate_boundary_scalar(
    const ParametricHypersurface& s, int points_per_axis,
    const std::function<double(const BoundaryFace&, const Eigen::VectorXd&)>& value);

}  // namespace freebound
