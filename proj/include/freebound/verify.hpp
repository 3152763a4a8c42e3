#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "freebound/geometry.hpp"
#include "freebound/surface.hpp"

namespace freebound {

// Residual checks for the pointwise identities, boundary relations, and
// integral balances satisfied by free-boundary minimal hypersurfaces in the
// unit ball. Each check evaluates a residual over a sample grid and reports
// max and RMS norms against an explicit tolerance; nothing is implicit in
// the output. Pointwise residuals are normalized as
//
//   r = |lhs - rhs| / max(1, |lhs|, |rhs|)
//
// so identities between large curvature terms are judged relative to their
// size while near-zero identities stay absolute.

// Defaults, recorded verbatim in every report that uses them.
inline constexpr double kInteriorTolerance = 1e-3;  // centered stencils, h = 1e-3
inline constexpr double kBoundaryTolerance = 5e-3;  // one-sided stencils lose a constant
inline constexpr double kMinimalityGate = 1e-6;     // max |H| accepted as minimal
inline constexpr double kGraphicalCutoff = 0.05;    // |s_V| below this counts as a zero

// Chart-space evaluation points plus the description that goes in reports.
struct SampleGrid {
  std::vector<Eigen::VectorXd> points;
  std::string description;
};

SampleGrid interior_sample_grid(const ParametricHypersurface& s, int per_axis);
// Cell-centered lattice of an arbitrary sub-box; used to restrict a check to
// a graphical region where |s_V| stays away from zero.
SampleGrid sample_grid_in_box(const Box& box, int per_axis, const std::string& label);

struct BoundarySample {
  BoundaryFace face;
  Eigen::VectorXd point;
};
struct BoundaryGrid {
  std::vector<BoundarySample> samples;
  std::string description;
};
// per_axis points along every non-face axis of every sphere face.
BoundaryGrid boundary_sample_grid(const ParametricHypersurface& s, int per_axis);

struct VerificationReport {
  std::string check_name;
  std::string surface_id;
  std::string grid;
  double residual_max = 0;
  double residual_l2 = 0;  // root mean square over the grid
  double tolerance = 0;
  double h_used = 0;
  bool passed = false;  // residual_max < tolerance, always
  std::string notes;
};

// lap s_V = -|A|^2 s_V on minimal surfaces, for a Killing field V.
// Throws PreconditionViolation unless the surface is flagged minimal and
// max |H| over the grid stays under the gate.
VerificationReport check_graph_laplacian(const ParametricHypersurface& s,
                                         const KillingField& V, const SampleGrid& grid,
                                         double h,
                                         double tolerance = kInteriorTolerance,
                                         double minimality_gate = kMinimalityGate);

// lap v^2 = 2|A|^2 v^2 + 6 |grad v|^2 with v = 1/s_V, valid where the
// surface is graphical for V. Throws ZeroGraphQuantityError (listing the
// offending points) if |s_V| <= cutoff anywhere on the grid.
VerificationReport check_v2_identity(const ParametricHypersurface& s,
                                     const KillingField& V, const SampleGrid& grid,
                                     double h, double tolerance = kInteriorTolerance,
                                     double cutoff = kGraphicalCutoff);

// lap u^2 = -2|A|^2 u^2 + 2 |grad u|^2 with u = <F, nu>, on minimal surfaces.
VerificationReport check_u2_identity(const ParametricHypersurface& s,
                                     const SampleGrid& grid, double h,
                                     double tolerance = kInteriorTolerance,
                                     double minimality_gate = kMinimalityGate);

// D = lap Q - 2 <grad v / v, grad Q> with Q = u^2 v^2 must be nonnegative;
// the check asserts D >= -tolerance at every sample and verifies the exact
// rearrangement D = 2 v^2 |grad u|^2 + 2 u^2 |grad v|^2 + 4 u v <grad u, grad v>
// = 2 |v grad u + u grad v|^2 as a residual. residual_max folds together the
// rearrangement residual and any inequality violation max(0, -D), so the
// pass flag still means residual_max < tolerance.
VerificationReport check_q_inequality(const ParametricHypersurface& s,
                                      const KillingField& V, const SampleGrid& grid,
                                      double h, double tolerance = kInteriorTolerance,
                                      double cutoff = kGraphicalCutoff);

// 0.5 lap |A|^2 = |grad A|^2 - |A|^4 on minimal hypersurfaces.
VerificationReport check_simons(const ParametricHypersurface& s, const SampleGrid& grid,
                                double h, double tolerance = kInteriorTolerance,
                                double minimality_gate = kMinimalityGate);

// Orthonormal frame adapted to a boundary point: tangent[0..n-2] span the
// boundary tangent space, conormal is the outward sphere normal (equal to
// the outward conormal of the boundary inside the surface when the contact
// is orthogonal). chart coefficient vectors satisfy d1 * chart = ambient.
struct AdaptedFrame {
  std::vector<Eigen::VectorXd> tangent;        // ambient, unit, n-1 of them
  std::vector<Eigen::VectorXd> tangent_chart;  // chart coefficients
  Eigen::VectorXd conormal;                    // ambient, unit
  Eigen::VectorXd conormal_chart;
};
// Throws FrameConstructionError when a chart face direction degenerates.
AdaptedFrame adapted_boundary_frame(const ParametricHypersurface& s,
                                    const BoundaryFace& face, const Eigen::VectorXd& p,
                                    double h);

// Per-point data behind check_boundary_relations, exposed for tests that pin
// the individual relations separately.
struct BoundaryRelationSample {
  Eigen::VectorXd point;
  double h_in_max = 0;          // max_i |h(tau_i, conormal)|, i < n
  double grad_H = 0;            // one-sided conormal derivative of H
  double diag_residual_max = 0; // max_i normalized |grad_n h_ii - (h_nn - h_ii)|
  double h_nn = 0;
};
std::vector<BoundaryRelationSample> boundary_relation_samples(
    const ParametricHypersurface& s, const BoundaryGrid& grid, double h);

// Boundary relations of a free-boundary minimal hypersurface in the adapted
// frame: h_in = 0 for i < n, grad_n H = 0, grad_n h_ii = h_nn - h_ii. The
// conormal derivative is a one-sided 3-point stencil along the inward ray.
VerificationReport check_boundary_relations(const ParametricHypersurface& s,
                                            const BoundaryGrid& grid, double h,
                                            double tolerance = kBoundaryTolerance,
                                            double minimality_gate = kMinimalityGate);

struct NormalDerivativeSample {
  Eigen::VectorXd point;
  double grad_n_A2 = 0;  // one-sided conormal derivative of |A|^2
  double a2 = 0;
  double h_nn = 0;
};
std::vector<NormalDerivativeSample> normal_derivative_A2_samples(
    const ParametricHypersurface& s, const BoundaryGrid& grid, double h);

// grad_n |A|^2 = -2|A|^2 - 2 n h_nn^2 on the boundary.
VerificationReport check_normal_derivative_A2(const ParametricHypersurface& s,
                                              const BoundaryGrid& grid, double h,
                                              double tolerance = kBoundaryTolerance,
                                              double minimality_gate = kMinimalityGate);

// n |M| = |boundary| for free-boundary minimal hypersurfaces, by tensor
// Gauss-Legendre quadrature with the given points per axis. Also verifies
// the integral form behind it: the surface integral of |dF|^2 (= n
// pointwise) equals the boundary integral of <conormal, F> (= 1 pointwise
// exactly when the contact is orthogonal). Runs on any surface with sphere
// faces; non-minimal controls are expected to fail rather than gate.
// Throws Error when doubling the quadrature moves either integral by more
// than the convergence guard.
VerificationReport check_isoperimetric(const ParametricHypersurface& s, int quad_points,
                                       double tolerance = 1e-8);

// Scalars entering the curvature gap inequality plus the integral balances
// from its proof. For surfaces flagged minimal + free-boundary the flux
// balance pairs the interior integral of lap |A|^2 against the boundary
// integral of -(2|A|^2 + 2 n h_nn^2); otherwise (controls) it falls back to
// the hypothesis-free divergence form with a one-sided conormal derivative
// and skips the chain identity. FD integrands are Richardson-extrapolated
// from steps h and h/2; h is clamped so the centered stencils clear the
// innermost Gauss-Legendre node (which sits ~j1^2/(4 N^2) of the axis length
// from the faces), because a stencil shifted one-sided there drops to first
// order and poisons the extrapolation. Residuals are absolute, not
// normalized.
struct CurvatureGapReport {
  std::string surface_id;
  std::string grid;
  double sup_interior_A2 = 0;
  double inf_boundary_A2 = 0;
  double gap = 0;  // (sup)^2 - n * inf
  double flux_residual = 0;
  std::optional<double> chain_residual;  // int |grad A|^2 - int |A|^4 - 0.5 int lap |A|^2
  double tolerance = 0;
  double h_used = 0;
  bool passed = false;  // flux (and chain when present) under tolerance
  std::string notes;
};
CurvatureGapReport curvature_gap_report(const ParametricHypersurface& s,
                                        const SampleGrid& grid, int boundary_samples = 64,
                                        int quad_points = 64, double h = 2.5e-4,
                                        double tolerance = 1e-5);

// Zero hunt for s_V: sign scan over a cell-centered lattice (per_axis points
// per axis, periodic axes wrap) followed by bisection along sign-changing
// lattice edges down to 1e-10 in parameter. When the field keeps one sign,
// the result records min |s_V| as the margin; the certificate is only as
// strong as the lattice resolution (no interval arithmetic).
struct ZeroCrossing {
  Eigen::VectorXd parameter;
  Eigen::VectorXd position;  // F(parameter)
};
struct KillingZeroReport {
  std::string surface_id;
  std::string field_name;
  std::string grid;
  std::vector<ZeroCrossing> zeros;
  bool vanishes_identically = false;  // |s_V| < 1e-12 across the whole grid
  bool certified_sign_definite = false;
  double min_s_v = 0;      // signed extremes over the grid
  double max_s_v = 0;
  double min_abs_s_v = 0;
  std::string notes;
};
KillingZeroReport killing_zero_search(const ParametricHypersurface& s,
                                      const KillingField& V, int per_axis = 64,
                                      double h = 1e-3);

}  // namespace freebound
