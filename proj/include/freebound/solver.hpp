#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "freebound/mesh.hpp"

namespace freebound {

// Projected gradient descent on triangle area with boundary vertices
// constrained to the unit sphere. Steps are accepted under an Armijo
// sufficient-decrease test; the boundary condition is enforced by stepping in
// the sphere tangent plane and renormalizing. Free-boundary orthogonality is
// not imposed, it is measured on the result.
//
// Raw area descent never settles on a critical surface here: constrained
// critical points of this functional are saddle points. A flat disk spanning
// a latitude circle at height c has area pi*(1-c^2), so the equatorial disk
// loses area under a rigid vertical slide; the catenoid has three more such
// escape directions (the other translations and a dilation-type mode), and
// sliding boundary vertices along the boundary polygon strictly shrinks the
// inscribed area, a pure discretization artifact. The stabilized mode
// therefore (a) restricts boundary motion to the direction perpendicular to
// the boundary curve in the sphere tangent plane, and (b) treats the
// low-dimensional collective drift span (ambient translations, the dilation,
// and the vertex-normal field, boundary-constrained and orthonormalized)
// minimax style. The normal field completes the even unstable mode of the
// catenoid, whose normal part does not vanish at the boundary while the
// dilation's does; on a flat disk it orthogonalizes away. Each drift
// direction is
// classified by a second-difference probe of the area along it: concave
// directions (genuine unstable modes) take a Newton ascent step toward the
// ridge, flat directions (discrete in-surface reparametrizations, where
// unsigned area would only grow by folding) are frozen, and convex ones are
// left to the descent. The step descends on the orthogonal complement under
// the Armijo test, so the flow converges to the genuine critical point
// instead of escaping through it. DriftProjection::none recovers the literal
// raw flow.
enum class DriftProjection { none, translations, full };

struct SolverConfig {
  double initial_step = 0.25;
  double max_step = 1.0;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  double step_growth = 1.3;
  int max_backtracks = 60;
  double tol_displacement = 1e-8;
  double tol_gradient = 1e-8;
  int64_t max_iterations = 500000;
  int64_t trace_stride = 200;
  int64_t quality_check_stride = 5000;
  bool allow_remesh_retry = true;  // one uniform refinement on quality failure
  DriftProjection drift_projection = DriftProjection::full;
};

struct TraceRow {
  int64_t iteration = 0;
  double area = 0;
  double grad_max = 0;
  double boundary_orthogonality = 0;
};

struct SolveResult {
  TriMesh mesh;
  std::vector<TraceRow> trace;
  bool converged = false;
  bool remeshed = false;
  int64_t iterations = 0;
  double area = 0;
  double grad_max = 0;
  double boundary_orthogonality = 0;
  std::string stop_reason;
};

SolveResult minimize(const TriMesh& initial, const SolverConfig& config = {});

void write_trace_csv(const std::vector<TraceRow>& trace,
                     const std::string& path);

}  // namespace freebound
