#include "freebound/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <tuple>
#include <unordered_map>

#include "freebound/kernels/kernels.hpp"
#include "freebound/types.hpp"

namespace freebound {

namespace {

using Field = std::array<std::vector<double>, 3>;

// Drift handling: the area along each drift direction is probed by a central
// second difference every kProbeStride iterations. Concave directions take a
// Newton step toward the ridge, trust-limited to kDriftTrust probe amplitudes
// so a stale curvature estimate cannot kick the mesh beyond the scale the
// quadratic model was measured at. The basis itself is refreshed every
// kBasisStride iterations, or immediately after a large step, since it
// drifts only with the geometry.
constexpr double kProbeDelta = 1e-3;
constexpr int64_t kProbeStride = 25;
constexpr int64_t kBasisStride = 10;
constexpr double kBasisRefreshStep = 1e-3;
constexpr double kDriftTrust = 10.0;

double field_dot(std::size_t n, const Field& a, const Field& b) {
  return kernels::dot(n, a[0].data(), b[0].data()) +
         kernels::dot(n, a[1].data(), b[1].data()) +
         kernels::dot(n, a[2].data(), b[2].data());
}

void field_axpy(std::size_t n, double alpha, const Field& v, Field& out) {
  for (int c = 0; c < 3; ++c)
    kernels::axpy(n, alpha, v[c].data(), out[c].data());
}

double field_max(std::size_t nv, const Field& g) {
  double worst = 0;
  for (std::size_t v = 0; v < nv; ++v) {
    double n2 = g[0][v] * g[0][v] + g[1][v] * g[1][v] + g[2][v] * g[2][v];
    worst = std::max(worst, n2);
  }
  return std::sqrt(worst);
}

// Boundary vertices with their two neighbors along the boundary loop.
// Constrained motion: tangent to the sphere and perpendicular to the
// boundary curve. Removing the along-curve component suppresses the discrete
// reparametrization drift (sliding vertices along the boundary polygon
// strictly decreases inscribed area, so the raw flow bunches them up).
struct BoundaryFrame {
  std::vector<int32_t> verts;
  std::vector<std::array<int32_t, 2>> nbrs;

  explicit BoundaryFrame(const TriMesh& m) : verts(m.boundary_vertices()) {
    std::unordered_map<int64_t, int> undirected;
    undirected.reserve(m.triangle_count() * 2);
    auto key = [](int32_t a, int32_t b) {
      if (a > b) std::swap(a, b);
      return (static_cast<int64_t>(a) << 32) | static_cast<uint32_t>(b);
    };
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
      undirected[key(m.ta[t], m.tb[t])]++;
      undirected[key(m.tb[t], m.tc[t])]++;
      undirected[key(m.tc[t], m.ta[t])]++;
    }
    std::unordered_map<int32_t, std::array<int32_t, 2>> link;
    for (const auto& [k, count] : undirected) {
      if (count != 1) continue;
      auto a = static_cast<int32_t>(k >> 32);
      auto b = static_cast<int32_t>(k & 0xffffffff);
      for (auto [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
        auto it = link.find(from);
        if (it == link.end())
          link[from] = {to, -1};
        else
          it->second[1] = to;
      }
    }
    nbrs.reserve(verts.size());
    for (int32_t v : verts) nbrs.push_back(link.at(v));
  }

  // Project the field at boundary vertices: drop the radial component, then
  // the component along the boundary curve. Interior entries untouched.
  void constrain(const TriMesh& m, Field& f, bool drop_along_curve) const {
    for (std::size_t i = 0; i < verts.size(); ++i) {
      int32_t v = verts[i];
      double p[3] = {m.x[v], m.y[v], m.z[v]};
      double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
      if (r2 <= 0) continue;
      double rad = (f[0][v] * p[0] + f[1][v] * p[1] + f[2][v] * p[2]) / r2;
      for (int c = 0; c < 3; ++c) f[c][v] -= rad * p[c];
      if (!drop_along_curve) continue;
      auto [na, nb] = nbrs[i];
      if (na < 0 || nb < 0) continue;
      double tau[3] = {m.x[nb] - m.x[na], m.y[nb] - m.y[na],
                       m.z[nb] - m.z[na]};
      double tr = (tau[0] * p[0] + tau[1] * p[1] + tau[2] * p[2]) / r2;
      for (int c = 0; c < 3; ++c) tau[c] -= tr * p[c];
      double t2 = tau[0] * tau[0] + tau[1] * tau[1] + tau[2] * tau[2];
      if (t2 <= 0) continue;
      double along =
          (f[0][v] * tau[0] + f[1][v] * tau[1] + f[2][v] * tau[2]) / t2;
      for (int c = 0; c < 3; ++c) f[c][v] -= along * tau[c];
    }
  }

  void renormalize(TriMesh& m) const {
    for (int32_t v : verts) {
      double r = std::sqrt(m.x[v] * m.x[v] + m.y[v] * m.y[v] +
                           m.z[v] * m.z[v]);
      if (r > 0) {
        m.x[v] /= r;
        m.y[v] /= r;
        m.z[v] /= r;
      }
    }
  }
};

// Orthonormalized collective drift fields: ambient translations and (for
// full) the dilation x -> x + eps x plus the vertex-normal field, all
// constrained at the boundary the same way as the gradient. These span the
// unstable directions of the constrained area functional; see the header
// comment. slot[i] names the generator (0..2 translations, 3 dilation,
// 4 normal) so probe state can be tracked across iterations even if a
// degenerate direction drops out.
constexpr int kDriftSlots = 5;

struct DriftBasis {
  std::vector<Field> q;
  std::vector<int> slot;

  DriftBasis(const TriMesh& m, const BoundaryFrame& frame,
             DriftProjection mode) {
    if (mode == DriftProjection::none) return;
    const std::size_t nv = m.vertex_count();
    const int count = mode == DriftProjection::translations ? 3 : kDriftSlots;
    std::vector<Eigen::Vector3d> normals;
    for (int k = 0; k < count; ++k) {
      Field f;
      for (auto& c : f) c.assign(nv, 0.0);
      if (k < 3) {
        std::fill(f[k].begin(), f[k].end(), 1.0);
      } else if (k == 3) {
        std::copy(m.x.begin(), m.x.end(), f[0].begin());
        std::copy(m.y.begin(), m.y.end(), f[1].begin());
        std::copy(m.z.begin(), m.z.end(), f[2].begin());
      } else {
        if (normals.empty()) normals = vertex_normals(m);
        for (std::size_t v = 0; v < nv; ++v)
          for (int c = 0; c < 3; ++c) f[c][v] = normals[v][c];
      }
      frame.constrain(m, f, true);
      for (const auto& prev : q)
        field_axpy(nv, -field_dot(nv, f, prev), prev, f);
      double norm = std::sqrt(field_dot(nv, f, f));
      if (norm < 1e-10 * std::sqrt(static_cast<double>(nv))) continue;
      for (auto& c : f)
        for (double& x : c) x /= norm;
      q.push_back(std::move(f));
      slot.push_back(k);
    }
  }
};

struct Workspace {
  Field g;                      // constrained gradient, then descent part
  Field drift;                  // scaled ascent step along the drift span
  Field trial;                  // candidate positions
  std::vector<double> scratch;  // kernel staging, 9 per triangle

  explicit Workspace(const TriMesh& m) : scratch(9 * m.triangle_count()) {
    for (auto& c : g) c.assign(m.vertex_count(), 0.0);
    for (auto& c : drift) c.assign(m.vertex_count(), 0.0);
    for (auto& c : trial) c.assign(m.vertex_count(), 0.0);
  }
};

// out = positions + alpha * dir, boundary renormalized to the sphere.
void build_trial(const TriMesh& m, const BoundaryFrame& frame,
                 const Field& dir, double alpha, Field& out) {
  const std::size_t n = m.vertex_count();
  std::copy(m.x.begin(), m.x.end(), out[0].begin());
  std::copy(m.y.begin(), m.y.end(), out[1].begin());
  std::copy(m.z.begin(), m.z.end(), out[2].begin());
  field_axpy(n, alpha, dir, out);
  for (int32_t v : frame.verts) {
    double r = std::sqrt(out[0][v] * out[0][v] + out[1][v] * out[1][v] +
                         out[2][v] * out[2][v]);
    if (r > 0)
      for (int c = 0; c < 3; ++c) out[c][v] /= r;
  }
}

double trial_total_area(const TriMesh& m, const Field& trial) {
  kernels::TriangleSoA soa{trial[0].data(), trial[1].data(), trial[2].data(),
                           m.ta.data(),     m.tb.data(),     m.tc.data(),
                           m.triangle_count()};
  return kernels::total_area(soa);
}

SolveResult run_descent(const TriMesh& initial, const SolverConfig& cfg) {
  TriMesh mesh = initial;
  validate_mesh(mesh);
  const std::size_t nv = mesh.vertex_count();
  BoundaryFrame frame(mesh);
  Workspace w(mesh);
  const bool stabilized = cfg.drift_projection != DriftProjection::none;

  SolveResult res;
  double step = cfg.initial_step;

  std::array<double, kDriftSlots> curv{};
  std::array<bool, kDriftSlots> have_curv{};
  DriftBasis basis(mesh, frame, cfg.drift_projection);
  bool basis_stale = false;

  // Computes the area and the boundary-constrained gradient in w.g; returns
  // {area, max per-vertex gradient norm} before any drift split.
  auto evaluate = [&]() {
    for (auto& c : w.g) std::fill(c.begin(), c.end(), 0.0);
    double a = kernels::area_with_gradient(mesh.tri_view(), w.g[0].data(),
                                           w.g[1].data(), w.g[2].data(),
                                           w.scratch.data());
    frame.constrain(mesh, w.g, stabilized);
    return std::pair{a, field_max(nv, w.g)};
  };

  const MeshAdjacency adjacency = build_adjacency(mesh);
  auto record = [&](int64_t iter, double a, double gmax) {
    res.trace.push_back(
        {iter, a, gmax, boundary_orthogonality_residual(mesh, adjacency)});
  };

  double area = 0;
  double gmax = 0;
  int64_t iter = 0;
  for (; iter < cfg.max_iterations; ++iter) {
    std::tie(area, gmax) = evaluate();
    if (iter % cfg.trace_stride == 0) record(iter, area, gmax);
    if (gmax < cfg.tol_gradient) {
      res.converged = true;
      res.stop_reason = "gradient below tolerance";
      break;
    }

    // Split the drift span off the descent direction. Concave directions get
    // a Newton ascent step in w.drift; flat ones are frozen (in-surface
    // reparametrizations, where only folding could raise the area); convex
    // ones stay in w.g for the descent.
    if (basis_stale || iter % kBasisStride == 0) {
      basis = DriftBasis(mesh, frame, cfg.drift_projection);
      basis_stale = false;
    }
    for (auto& c : w.drift) std::fill(c.begin(), c.end(), 0.0);
    const bool refresh = iter % kProbeStride == 0;
    const double flat_tol = 1e-6 * std::max(1.0, area);
    for (std::size_t i = 0; i < basis.q.size(); ++i) {
      const int s = basis.slot[i];
      const double coeff = field_dot(nv, w.g, basis.q[i]);
      if (refresh || !have_curv[s]) {
        build_trial(mesh, frame, basis.q[i], kProbeDelta, w.trial);
        const double ahead = trial_total_area(mesh, w.trial);
        build_trial(mesh, frame, basis.q[i], -kProbeDelta, w.trial);
        const double behind = trial_total_area(mesh, w.trial);
        curv[s] = (ahead + behind - 2 * area) / (kProbeDelta * kProbeDelta);
        have_curv[s] = true;
      }
      if (curv[s] > flat_tol) continue;
      field_axpy(nv, -coeff, basis.q[i], w.g);
      if (curv[s] >= -flat_tol) continue;
      double ascent = coeff / -curv[s];
      const double cap = kDriftTrust * kProbeDelta;
      if (std::abs(ascent) > cap) ascent = (ascent > 0 ? cap : -cap);
      field_axpy(nv, ascent, basis.q[i], w.drift);
    }
    const double drift_step_max = field_max(nv, w.drift);

    const double descent_max = field_max(nv, w.g);
    const double gnorm2 = field_dot(nv, w.g, w.g);
    double sigma = step;
    double trial_area = area;
    bool accepted = false;
    if (descent_max > 0) {
      for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
        build_trial(mesh, frame, w.g, -sigma, w.trial);
        trial_area = trial_total_area(mesh, w.trial);
        if (trial_area <= area - cfg.armijo_c * sigma * gnorm2) {
          accepted = true;
          break;
        }
        sigma *= cfg.backtrack_factor;
      }
      if (accepted) {
        if (trial_area > area)
          throw Error("area increased on an accepted descent step");
        mesh.x.swap(w.trial[0]);
        mesh.y.swap(w.trial[1]);
        mesh.z.swap(w.trial[2]);
        area = trial_area;
        step = std::min(sigma * cfg.step_growth, cfg.max_step);
        if (sigma * descent_max > kBasisRefreshStep) basis_stale = true;
      } else if (drift_step_max < cfg.tol_displacement) {
        // Descent cannot move and the drift step is negligible.
        if (sigma * descent_max < cfg.tol_displacement) {
          res.converged = true;
          res.stop_reason = "step collapsed below displacement tolerance";
        } else {
          res.stop_reason = "line search failed";
        }
        break;
      }
    }

    // Ascent along the concave drift span: relaxes the collective
    // coordinates toward the critical point instead of escaping through it.
    if (drift_step_max > 0) {
      for (int c = 0; c < 3; ++c)
        kernels::axpy(nv, 1.0, w.drift[c].data(),
                      (c == 0 ? mesh.x : c == 1 ? mesh.y : mesh.z).data());
      frame.renormalize(mesh);
      if (drift_step_max > kBasisRefreshStep) basis_stale = true;
    }

    if (cfg.quality_check_stride > 0 &&
        (iter + 1) % cfg.quality_check_stride == 0)
      validate_mesh(mesh);

    const double displacement =
        std::max(accepted ? sigma * descent_max : 0.0, drift_step_max);
    if (displacement < cfg.tol_displacement) {
      ++iter;
      res.converged = true;
      res.stop_reason = "displacement below tolerance";
      break;
    }
  }
  if (res.stop_reason.empty()) res.stop_reason = "iteration limit reached";

  validate_mesh(mesh);
  std::tie(res.area, res.grad_max) = evaluate();
  res.iterations = iter;
  record(iter, res.area, res.grad_max);
  res.boundary_orthogonality = res.trace.back().boundary_orthogonality;
  res.mesh = std::move(mesh);
  return res;
}

}  // namespace

SolveResult minimize(const TriMesh& initial, const SolverConfig& config) {
  try {
    return run_descent(initial, config);
  } catch (const MeshQualityError&) {
    if (!config.allow_remesh_retry) throw;
    SolveResult res = run_descent(midpoint_refine(initial), config);
    res.remeshed = true;
    return res;
  }
}

void write_trace_csv(const std::vector<TraceRow>& trace,
                     const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << "iteration,area,grad_max,boundary_orthogonality\n";
  f.precision(17);
  for (const auto& row : trace)
    f << row.iteration << ',' << row.area << ',' << row.grad_max << ','
      << row.boundary_orthogonality << '\n';
  if (!f.good()) throw Error("write to " + path + " failed");
}

}  // namespace freebound
