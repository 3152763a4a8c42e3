#include "freebound/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include <Eigen/Dense>

#include "freebound/exact.hpp"
#include "freebound/types.hpp"

namespace freebound {

namespace {

constexpr double kMinTriangleArea = 1e-12;
const double kMinAngle = std::acos(-1.0) / 180.0;  // 1 degree

inline int64_t edge_key(int32_t a, int32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<int64_t>(a) << 32) | static_cast<uint32_t>(b);
}

// Structured disk: center vertex, ring k holds 6k vertices.
int32_t disk_vertex(int k, int m) {
  if (k == 0) return 0;
  int six = 6 * k;
  m %= six;
  if (m < 0) m += six;
  return 1 + 3 * k * (k - 1) + m;
}

void disk_connectivity(int rings, TriMesh& m) {
  for (int k = 0; k < rings; ++k) {
    for (int s = 0; s < 6; ++s) {
      for (int t = 0; t <= k; ++t) {
        int32_t o0 = disk_vertex(k + 1, s * (k + 1) + t);
        int32_t o1 = disk_vertex(k + 1, s * (k + 1) + t + 1);
        int32_t i0 = disk_vertex(k, s * k + t);
        m.ta.push_back(o0);
        m.tb.push_back(o1);
        m.tc.push_back(i0);
        if (t < k) {
          int32_t i1 = disk_vertex(k, s * k + t + 1);
          m.ta.push_back(i0);
          m.tb.push_back(o1);
          m.tc.push_back(i1);
        }
      }
    }
  }
}

TriMesh disk_shell(int rings) {
  if (rings < 1) throw PreconditionViolation("disk resolution must be >= 1");
  TriMesh m;
  std::size_t nv = 1 + 3 * static_cast<std::size_t>(rings) * (rings + 1);
  m.x.assign(nv, 0.0);
  m.y.assign(nv, 0.0);
  m.z.assign(nv, 0.0);
  m.boundary.assign(nv, 0);
  disk_connectivity(rings, m);
  for (int mth = 0; mth < 6 * rings; ++mth)
    m.boundary[disk_vertex(rings, mth)] = 1;
  return m;
}

struct EdgeInfo {
  int count = 0;
  int32_t mid = -1;
};

}  // namespace

std::vector<int32_t> TriMesh::boundary_vertices() const {
  std::vector<int32_t> out;
  for (std::size_t v = 0; v < boundary.size(); ++v)
    if (boundary[v]) out.push_back(static_cast<int32_t>(v));
  return out;
}

TriMesh init_graph_disk(int resolution,
                        const std::function<double(double, double)>& height) {
  TriMesh m = disk_shell(resolution);
  for (int k = 0; k <= resolution; ++k) {
    int count = k == 0 ? 1 : 6 * k;
    double r = static_cast<double>(k) / resolution;
    for (int j = 0; j < count; ++j) {
      double phi = 2.0 * std::acos(-1.0) * j / count;
      int32_t v = disk_vertex(k, j);
      double px = r * std::cos(phi);
      double py = r * std::sin(phi);
      m.x[v] = px;
      m.y[v] = py;
      m.z[v] = height(px, py);
    }
  }
  for (int32_t v : m.boundary_vertices()) {
    Eigen::Vector3d p = m.position(v);
    double n = p.norm();
    if (n < 1e-12)
      throw GraphicalityViolation("boundary vertex " + std::to_string(v) +
                                  " collapses to the origin");
    m.set_position(v, p / n);
  }

  auto normals = vertex_normals(m);
  double worst = 1.0;
  int32_t worst_v = -1;
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    double s = normals[v].z();
    if (s < worst) {
      worst = s;
      worst_v = static_cast<int32_t>(v);
    }
  }
  if (worst <= 0.0) {
    Eigen::Vector3d p = m.position(worst_v);
    std::ostringstream msg;
    msg << "initial mesh is not a graph over e3: vertex " << worst_v << " at ("
        << p.x() << ", " << p.y() << ", " << p.z() << ") has discrete support "
        << worst;
    throw GraphicalityViolation(msg.str());
  }
  validate_mesh(m);
  return m;
}

TriMesh build_annulus_catenoid(int resolution, double radial_perturbation) {
  if (resolution < 4) throw PreconditionViolation("annulus resolution must be >= 4");
  auto par = critical_catenoid_parameters();
  int rows = resolution;          // meridian intervals
  int cols = 3 * resolution;      // angular samples (periodic)
  TriMesh m;
  std::size_t nv = static_cast<std::size_t>(rows + 1) * cols;
  m.x.assign(nv, 0.0);
  m.y.assign(nv, 0.0);
  m.z.assign(nv, 0.0);
  m.boundary.assign(nv, 0);
  auto vid = [&](int i, int j) { return static_cast<int32_t>(i * cols + ((j % cols + cols) % cols)); };
  for (int i = 0; i <= rows; ++i) {
    double s = par.s0 * (2.0 * i / rows - 1.0);
    double r = par.scale * std::cosh(s);
    double bump = 1.0 + radial_perturbation * (1.0 - (s / par.s0) * (s / par.s0));
    r *= bump;
    double zz = par.scale * s;
    for (int j = 0; j < cols; ++j) {
      double th = 2.0 * std::acos(-1.0) * j / cols;
      int32_t v = vid(i, j);
      m.x[v] = r * std::cos(th);
      m.y[v] = r * std::sin(th);
      m.z[v] = zz;
      if (i == 0 || i == rows) m.boundary[v] = 1;
    }
  }
  for (int32_t v : m.boundary_vertices()) {
    Eigen::Vector3d p = m.position(v);
    m.set_position(v, p / p.norm());
  }
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      int32_t v00 = vid(i, j), v01 = vid(i, j + 1);
      int32_t v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1);
      m.ta.push_back(v00);
      m.tb.push_back(v01);
      m.tc.push_back(v11);
      m.ta.push_back(v00);
      m.tb.push_back(v11);
      m.tc.push_back(v10);
    }
  }
  validate_mesh(m);
  return m;
}

TriMesh build_sphere_patch(int resolution, double angular_radius) {
  if (angular_radius <= 0 || angular_radius >= std::acos(-1.0))
    throw PreconditionViolation("angular radius must lie in (0, pi)");
  TriMesh m = disk_shell(resolution);
  for (int k = 0; k <= resolution; ++k) {
    int count = k == 0 ? 1 : 6 * k;
    double rho = angular_radius * k / resolution;
    for (int j = 0; j < count; ++j) {
      double phi = 2.0 * std::acos(-1.0) * j / count;
      int32_t v = disk_vertex(k, j);
      m.x[v] = std::sin(rho) * std::cos(phi);
      m.y[v] = std::sin(rho) * std::sin(phi);
      m.z[v] = std::cos(rho);
    }
  }
  validate_mesh(m);
  return m;
}

TriMesh midpoint_refine(const TriMesh& m) {
  TriMesh out;
  out.x = m.x;
  out.y = m.y;
  out.z = m.z;
  out.boundary = m.boundary;
  std::unordered_map<int64_t, EdgeInfo> edges;
  edges.reserve(m.triangle_count() * 2);
  auto midpoint = [&](int32_t a, int32_t b) -> int32_t {
    EdgeInfo& e = edges[edge_key(a, b)];
    e.count++;
    if (e.mid < 0) {
      e.mid = static_cast<int32_t>(out.x.size());
      out.x.push_back(0.5 * (m.x[a] + m.x[b]));
      out.y.push_back(0.5 * (m.y[a] + m.y[b]));
      out.z.push_back(0.5 * (m.z[a] + m.z[b]));
      out.boundary.push_back(0);
    }
    return e.mid;
  };
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    int32_t a = m.ta[t], b = m.tb[t], c = m.tc[t];
    int32_t ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
    out.ta.insert(out.ta.end(), {a, b, c, ab});
    out.tb.insert(out.tb.end(), {ab, bc, ca, bc});
    out.tc.insert(out.tc.end(), {ca, ab, bc, ca});
  }
  for (const auto& [key, e] : edges) {
    if (e.count != 1) continue;  // interior edge
    out.boundary[e.mid] = 1;
    Eigen::Vector3d p = out.position(e.mid);
    double n = p.norm();
    if (n > 1e-12) out.set_position(e.mid, p / n);
  }
  return out;
}

void validate_mesh(const TriMesh& m) {
  const auto nv = static_cast<int64_t>(m.vertex_count());
  const auto nt = m.triangle_count();
  if (m.y.size() != m.x.size() || m.z.size() != m.x.size() ||
      m.boundary.size() != m.x.size() || m.tb.size() != m.ta.size() ||
      m.tc.size() != m.ta.size())
    throw MeshQualityError("inconsistent mesh array sizes");
  if (nt == 0) throw MeshQualityError("mesh has no triangles");

  std::unordered_map<int64_t, int> undirected;
  std::set<std::pair<int32_t, int32_t>> directed;
  std::vector<uint8_t> used(nv, 0);
  undirected.reserve(nt * 2);
  for (std::size_t t = 0; t < nt; ++t) {
    int32_t v[3] = {m.ta[t], m.tb[t], m.tc[t]};
    for (int32_t vi : v) {
      if (vi < 0 || vi >= nv)
        throw MeshQualityError("triangle " + std::to_string(t) +
                               " references vertex " + std::to_string(vi));
      used[vi] = 1;
    }
    if (v[0] == v[1] || v[1] == v[2] || v[2] == v[0])
      throw MeshQualityError("triangle " + std::to_string(t) + " is degenerate");
    for (int e = 0; e < 3; ++e) {
      int32_t a = v[e], b = v[(e + 1) % 3];
      if (!directed.insert({a, b}).second)
        throw MeshQualityError("directed edge (" + std::to_string(a) + ", " +
                               std::to_string(b) +
                               ") repeats: non-manifold or inconsistent winding");
      undirected[edge_key(a, b)]++;
    }

    Eigen::Vector3d pa = m.position(v[0]), pb = m.position(v[1]),
                    pc = m.position(v[2]);
    double area = 0.5 * (pb - pa).cross(pc - pa).norm();
    if (!(area > kMinTriangleArea))
      throw MeshQualityError("triangle " + std::to_string(t) + " has area " +
                             std::to_string(area));
    Eigen::Vector3d p[3] = {pa, pb, pc};
    for (int c = 0; c < 3; ++c) {
      Eigen::Vector3d u = p[(c + 1) % 3] - p[c];
      Eigen::Vector3d w = p[(c + 2) % 3] - p[c];
      double ang = std::atan2(u.cross(w).norm(), u.dot(w));
      if (!(ang > kMinAngle))
        throw MeshQualityError("triangle " + std::to_string(t) +
                               " has corner angle below one degree");
    }
  }
  for (int64_t vtx = 0; vtx < nv; ++vtx)
    if (!used[vtx])
      throw MeshQualityError("vertex " + std::to_string(vtx) + " is isolated");

  std::vector<int> boundary_degree(nv, 0);
  for (const auto& [key, count] : undirected) {
    if (count > 2)
      throw MeshQualityError("edge shared by more than two triangles");
    if (count == 1) {
      auto a = static_cast<int32_t>(key >> 32);
      auto b = static_cast<int32_t>(key & 0xffffffff);
      boundary_degree[a]++;
      boundary_degree[b]++;
    }
  }
  for (int64_t vtx = 0; vtx < nv; ++vtx) {
    bool flagged = m.boundary[vtx] != 0;
    bool incident = boundary_degree[vtx] > 0;
    if (flagged != incident)
      throw MeshQualityError("boundary flag of vertex " + std::to_string(vtx) +
                             " disagrees with connectivity");
    if (incident && boundary_degree[vtx] != 2)
      throw MeshQualityError("boundary loop not closed at vertex " +
                             std::to_string(vtx));
    if (flagged) {
      double r = m.position(static_cast<int32_t>(vtx)).norm();
      if (std::abs(r - 1.0) > 1e-12)
        throw MeshQualityError("boundary vertex " + std::to_string(vtx) +
                               " lies off the unit sphere by " +
                               std::to_string(std::abs(r - 1.0)));
    }
  }
}

MeshAdjacency build_adjacency(const TriMesh& m) {
  MeshAdjacency adj;
  adj.vertex_triangles.assign(m.vertex_count(), {});
  adj.one_ring.assign(m.vertex_count(), {});
  std::vector<std::set<int32_t>> ring(m.vertex_count());
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    int32_t v[3] = {m.ta[t], m.tb[t], m.tc[t]};
    for (int e = 0; e < 3; ++e) {
      adj.vertex_triangles[v[e]].push_back(static_cast<int32_t>(t));
      ring[v[e]].insert(v[(e + 1) % 3]);
      ring[v[e]].insert(v[(e + 2) % 3]);
    }
  }
  for (std::size_t v = 0; v < m.vertex_count(); ++v)
    adj.one_ring[v].assign(ring[v].begin(), ring[v].end());
  return adj;
}

std::vector<Eigen::Vector3d> vertex_normals(const TriMesh& m) {
  std::vector<Eigen::Vector3d> n(m.vertex_count(), Eigen::Vector3d::Zero());
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    Eigen::Vector3d a = m.position(m.ta[t]);
    Eigen::Vector3d b = m.position(m.tb[t]);
    Eigen::Vector3d c = m.position(m.tc[t]);
    Eigen::Vector3d fn = (b - a).cross(c - a);  // area-weighted
    n[m.ta[t]] += fn;
    n[m.tb[t]] += fn;
    n[m.tc[t]] += fn;
  }
  for (auto& v : n) {
    double len = v.norm();
    if (len > 1e-300) v /= len;
  }
  return n;
}

DiscreteCurvature discrete_mean_curvature(const TriMesh& m) {
  const std::size_t nv = m.vertex_count();
  DiscreteCurvature out;
  out.mean_curvature_vector.assign(nv, Eigen::Vector3d::Zero());
  out.scalar.assign(nv, 0.0);
  out.vertex_area.assign(nv, 0.0);
  std::vector<Eigen::Vector3d> acc(nv, Eigen::Vector3d::Zero());

  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    int32_t v[3] = {m.ta[t], m.tb[t], m.tc[t]};
    Eigen::Vector3d p[3] = {m.position(v[0]), m.position(v[1]),
                            m.position(v[2])};
    double area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]).norm();
    double cot[3];
    double corner_dot[3];
    for (int c = 0; c < 3; ++c) {
      Eigen::Vector3d u = p[(c + 1) % 3] - p[c];
      Eigen::Vector3d w = p[(c + 2) % 3] - p[c];
      double cr = u.cross(w).norm();
      corner_dot[c] = u.dot(w);
      cot[c] = corner_dot[c] / std::max(cr, 1e-300);
    }
    // cot weight of the edge opposite corner c applies to its two endpoints
    for (int c = 0; c < 3; ++c) {
      int ia = (c + 1) % 3, ib = (c + 2) % 3;
      acc[v[ia]] += cot[c] * (p[ib] - p[ia]);
      acc[v[ib]] += cot[c] * (p[ia] - p[ib]);
    }
    // mixed Voronoi area (barycentric split when a corner is obtuse)
    int obtuse = -1;
    for (int c = 0; c < 3; ++c)
      if (corner_dot[c] < 0) obtuse = c;
    for (int c = 0; c < 3; ++c) {
      if (obtuse < 0) {
        Eigen::Vector3d e1 = p[(c + 1) % 3] - p[c];
        Eigen::Vector3d e2 = p[(c + 2) % 3] - p[c];
        out.vertex_area[v[c]] +=
            (e1.squaredNorm() * cot[(c + 2) % 3] +
             e2.squaredNorm() * cot[(c + 1) % 3]) /
            8.0;
      } else {
        out.vertex_area[v[c]] += (c == obtuse) ? area / 2.0 : area / 4.0;
      }
    }
  }

  auto normals = vertex_normals(m);
  for (std::size_t v = 0; v < nv; ++v) {
    double a = out.vertex_area[v];
    Eigen::Vector3d lap =
        a > 1e-300 ? (acc[v] / (2.0 * a)).eval() : Eigen::Vector3d::Zero();
    Eigen::Vector3d hvec = -lap;  // approx H * normal
    if (m.boundary[v]) {
      Eigen::Vector3d radial = m.position(static_cast<int32_t>(v));
      double rn = radial.norm();
      if (rn > 1e-300) {
        radial /= rn;
        hvec -= hvec.dot(radial) * radial;
      }
    }
    out.mean_curvature_vector[v] = hvec;
    out.scalar[v] = hvec.dot(normals[v]);
  }
  return out;
}

namespace {

struct QuadricFit {
  bool ok = false;
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();  // second-order accurate
  double a2 = std::numeric_limits<double>::quiet_NaN();
};

// Least-squares quadric over the 2-ring in the tangent frame of the rough
// vertex normal. The linear terms absorb the frame's first-order bias, which
// matters for one-sided (boundary) neighborhoods.
QuadricFit fit_vertex_quadric(const TriMesh& m, const MeshAdjacency& adj,
                              const std::vector<Eigen::Vector3d>& normals,
                              int32_t v) {
  QuadricFit out;
  std::set<int32_t> two_ring;
  for (int32_t n1 : adj.one_ring[v]) {
    two_ring.insert(n1);
    for (int32_t n2 : adj.one_ring[n1]) two_ring.insert(n2);
  }
  two_ring.erase(v);
  if (two_ring.size() < 5) return out;

  Eigen::Vector3d nu = normals[v];
  Eigen::Vector3d p = m.position(v);
  int least = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(nu[k]) < std::abs(nu[least])) least = k;
  Eigen::Vector3d t1 = Eigen::Vector3d::Unit(least).cross(nu).normalized();
  Eigen::Vector3d t2 = nu.cross(t1);

  double scale = 0;
  for (int32_t q : two_ring) scale += (m.position(q) - p).norm();
  scale /= static_cast<double>(two_ring.size());
  if (!(scale > 1e-300)) return out;

  Eigen::MatrixXd M(static_cast<int>(two_ring.size()), 5);
  Eigen::VectorXd rhs(static_cast<int>(two_ring.size()));
  int row = 0;
  for (int32_t q : two_ring) {
    Eigen::Vector3d d = (m.position(q) - p) / scale;
    double al = d.dot(t1), be = d.dot(t2), w = d.dot(nu);
    M.row(row) << 0.5 * al * al, al * be, 0.5 * be * be, al, be;
    rhs[row] = w;
    ++row;
  }
  Eigen::VectorXd sol = M.colPivHouseholderQr().solve(rhs);
  double a = sol[0] / scale, b = sol[1] / scale, c = sol[2] / scale;
  double d1 = sol[3], d2 = sol[4];
  double denom = std::sqrt(1.0 + d1 * d1 + d2 * d2);
  Eigen::Matrix2d g;
  g << 1.0 + d1 * d1, d1 * d2, d1 * d2, 1.0 + d2 * d2;
  Eigen::Matrix2d h;
  h << a, b, b, c;
  h /= denom;
  Eigen::Matrix2d shape = g.inverse() * h;
  out.a2 = (shape * shape).trace();
  out.normal = (nu - d1 * t1 - d2 * t2).normalized();
  out.ok = true;
  return out;
}

}  // namespace

DiscreteA2 discrete_A2(const TriMesh& m) {
  const std::size_t nv = m.vertex_count();
  DiscreteA2 out;
  out.value.assign(nv, std::numeric_limits<double>::quiet_NaN());
  auto adj = build_adjacency(m);
  auto normals = vertex_normals(m);

  for (std::size_t vi = 0; vi < nv; ++vi) {
    auto v = static_cast<int32_t>(vi);
    QuadricFit fit = fit_vertex_quadric(m, adj, normals, v);
    if (!fit.ok) {
      out.excluded.push_back(v);
      continue;
    }
    out.value[v] = fit.a2;
  }
  return out;
}

double mesh_area(const TriMesh& m) { return kernels::total_area(m.tri_view()); }

double boundary_length(const TriMesh& m) {
  std::unordered_map<int64_t, int> undirected;
  undirected.reserve(m.triangle_count() * 2);
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    undirected[edge_key(m.ta[t], m.tb[t])]++;
    undirected[edge_key(m.tb[t], m.tc[t])]++;
    undirected[edge_key(m.tc[t], m.ta[t])]++;
  }
  double len = 0;
  for (const auto& [key, count] : undirected) {
    if (count != 1) continue;
    auto a = static_cast<int32_t>(key >> 32);
    auto b = static_cast<int32_t>(key & 0xffffffff);
    len += (m.position(a) - m.position(b)).norm();
  }
  return len;
}

double discrete_isoperimetric_residual(const TriMesh& m) {
  double length = boundary_length(m);
  if (length <= 0)
    throw PreconditionViolation("mesh has no boundary");
  return std::abs(2.0 * mesh_area(m) - length) / length;
}

double boundary_orthogonality_residual(const TriMesh& m) {
  return boundary_orthogonality_residual(m, build_adjacency(m));
}

double boundary_orthogonality_residual(const TriMesh& m,
                                       const MeshAdjacency& adj) {
  auto normals = vertex_normals(m);
  double worst = 0;
  for (int32_t v : m.boundary_vertices()) {
    Eigen::Vector3d p = m.position(v);
    double n = p.norm();
    if (n <= 1e-300) continue;
    // The one-sided fan normal carries an O(h) bias at the boundary; the
    // quadric-fit normal is second order. Fall back if the fit degenerates.
    QuadricFit fit = fit_vertex_quadric(m, adj, normals, v);
    const Eigen::Vector3d& nu = fit.ok ? fit.normal : normals[v];
    worst = std::max(worst, std::abs(nu.dot(p / n)));
  }
  return worst;
}

FlatnessMetrics flatness_metrics(const TriMesh& m) {
  FlatnessMetrics out;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    Eigen::Vector3d p = m.position(static_cast<int32_t>(v));
    cov += p * p.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  Eigen::Vector3d n = eig.eigenvectors().col(0);  // smallest eigenvalue
  out.plane_normal = n;
  for (std::size_t v = 0; v < m.vertex_count(); ++v)
    out.plane_deviation = std::max(
        out.plane_deviation, std::abs(n.dot(m.position(static_cast<int32_t>(v)))));

  auto a2 = discrete_A2(m);
  for (double val : a2.value)
    if (std::isfinite(val)) out.max_a2 = std::max(out.max_a2, val);

  auto normals = vertex_normals(m);
  out.min_s = 1.0;
  for (const auto& nu : normals) out.min_s = std::min(out.min_s, nu.z());
  return out;
}

void write_obj(const TriMesh& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  f.precision(17);
  for (std::size_t v = 0; v < m.vertex_count(); ++v)
    f << "v " << m.x[v] << ' ' << m.y[v] << ' ' << m.z[v] << '\n';
  for (std::size_t t = 0; t < m.triangle_count(); ++t)
    f << "f " << m.ta[t] + 1 << ' ' << m.tb[t] + 1 << ' ' << m.tc[t] + 1
      << '\n';
  if (!f.good()) throw Error("write to " + path + " failed");
}

TriMesh read_obj(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  TriMesh m;
  std::string line;
  int lineno = 0;
  auto face_index = [&](std::string tok) -> int32_t {
    auto slash = tok.find('/');
    if (slash != std::string::npos) tok = tok.substr(0, slash);
    long idx = 0;
    try {
      idx = std::stol(tok);
    } catch (const std::exception&) {
      throw ParseError("bad face index at line " + std::to_string(lineno));
    }
    if (idx < 0) idx = static_cast<long>(m.x.size()) + idx + 1;
    if (idx < 1 || idx > static_cast<long>(m.x.size()))
      throw ParseError("face index out of range at line " +
                       std::to_string(lineno));
    return static_cast<int32_t>(idx - 1);
  };
  while (std::getline(f, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string head;
    if (!(ss >> head)) continue;
    if (head == "v") {
      double a, b, c;
      if (!(ss >> a >> b >> c))
        throw ParseError("bad vertex at line " + std::to_string(lineno));
      m.x.push_back(a);
      m.y.push_back(b);
      m.z.push_back(c);
    } else if (head == "f") {
      std::vector<std::string> toks;
      std::string tok;
      while (ss >> tok) toks.push_back(tok);
      if (toks.size() != 3)
        throw ParseError("only triangle faces supported (line " +
                         std::to_string(lineno) + ")");
      m.ta.push_back(face_index(toks[0]));
      m.tb.push_back(face_index(toks[1]));
      m.tc.push_back(face_index(toks[2]));
    }  // other record types ignored
  }
  m.boundary.assign(m.x.size(), 0);
  std::unordered_map<int64_t, int> undirected;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    undirected[edge_key(m.ta[t], m.tb[t])]++;
    undirected[edge_key(m.tb[t], m.tc[t])]++;
    undirected[edge_key(m.tc[t], m.ta[t])]++;
  }
  for (const auto& [key, count] : undirected) {
    if (count != 1) continue;
    m.boundary[static_cast<int32_t>(key >> 32)] = 1;
    m.boundary[static_cast<int32_t>(key & 0xffffffff)] = 1;
  }
  return m;
}

}  // namespace freebound
