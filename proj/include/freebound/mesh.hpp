#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "freebound/kernels/kernels.hpp"

namespace freebound {

// Indexed triangle mesh, structure-of-arrays so the kernels can consume the
// buffers directly. Boundary flags mark vertices constrained to the unit
// sphere during solves.
struct TriMesh {
  std::vector<double> x, y, z;
  std::vector<int32_t> ta, tb, tc;
  std::vector<uint8_t> boundary;

  std::size_t vertex_count() const { return x.size(); }
  std::size_t triangle_count() const { return ta.size(); }

  Eigen::Vector3d position(int32_t v) const { return {x[v], y[v], z[v]}; }
  void set_position(int32_t v, const Eigen::Vector3d& p) {
    x[v] = p.x();
    y[v] = p.y();
    z[v] = p.z();
  }

  kernels::TriangleSoA tri_view() const {
    return {x.data(), y.data(), z.data(),
            ta.data(), tb.data(), tc.data(), ta.size()};
  }
  std::vector<int32_t> boundary_vertices() const;
};

// Structured disk triangulation (ring k carries 6k vertices) of the unit
// disk, lifted by the height function and with the boundary ring radially
// projected onto the unit sphere. Fails with GraphicalityViolation when any
// discrete vertex normal has non-positive e3 component.
TriMesh init_graph_disk(int resolution,
                        const std::function<double(double, double)>& height);

// Structured annulus sampled from the critical catenoid profile, optionally
// pushed outward by a radial bump (relative amplitude) to start the solver
// off the exact solution. Boundary rings lie on the unit sphere.
TriMesh build_annulus_catenoid(int resolution, double radial_perturbation = 0.0);

// Geodesic cap of the unit sphere (control surface for curvature
// estimators), disk connectivity mapped by polar angle.
TriMesh build_sphere_patch(int resolution, double angular_radius = 0.8);

// 1:4 refinement with edge midpoints; midpoints of boundary edges are
// re-projected to the sphere.
TriMesh midpoint_refine(const TriMesh& m);

// Structural checks: manifold-with-boundary, consistent orientation,
// boundary flags match connectivity, closed boundary loops, triangle quality
// (min angle > 1 degree, area > 1e-12). Throws MeshQualityError.
void validate_mesh(const TriMesh& m);

struct MeshAdjacency {
  std::vector<std::vector<int32_t>> vertex_triangles;
  std::vector<std::vector<int32_t>> one_ring;
};
MeshAdjacency build_adjacency(const TriMesh& m);

// Area-weighted vertex normals following the triangle winding.
std::vector<Eigen::Vector3d> vertex_normals(const TriMesh& m);

// Cotangent-Laplacian mean curvature with mixed Voronoi areas (barycentric
// fallback on obtuse triangles). The vector is approximately H * normal; the
// scalar is its component along the vertex normal. At boundary vertices only
// the component tangential to the sphere is kept.
struct DiscreteCurvature {
  std::vector<Eigen::Vector3d> mean_curvature_vector;
  std::vector<double> scalar;       // signed, along the vertex normal
  std::vector<double> vertex_area;  // mixed Voronoi area
};
DiscreteCurvature discrete_mean_curvature(const TriMesh& m);

// Per-vertex |A|^2 = k1^2 + k2^2 by quadric fit over the 2-ring in the
// tangent frame. Vertices with fewer than 5 usable neighbors are excluded
// (value NaN, index listed).
struct DiscreteA2 {
  std::vector<double> value;
  std::vector<int32_t> excluded;
};
DiscreteA2 discrete_A2(const TriMesh& m);

double mesh_area(const TriMesh& m);
double boundary_length(const TriMesh& m);
// |2 area - boundary length| / boundary length  (n = 2 isoperimetric form).
double discrete_isoperimetric_residual(const TriMesh& m);

// Max |<normal, position>| over boundary vertices: 0 when the mesh meets the
// sphere orthogonally. Uses quadric-fit vertex normals, which stay second
// order on the one-sided boundary neighborhoods. The adjacency overload lets
// callers reuse connectivity across repeated evaluations.
double boundary_orthogonality_residual(const TriMesh& m);
double boundary_orthogonality_residual(const TriMesh& m,
                                       const MeshAdjacency& adj);

struct FlatnessMetrics {
  double plane_deviation = 0;  // max distance to best-fit plane through 0
  double max_a2 = 0;           // over non-excluded vertices
  double min_s = 0;            // min <normal, e3>
  Eigen::Vector3d plane_normal = Eigen::Vector3d::Zero();
};
FlatnessMetrics flatness_metrics(const TriMesh& m);

void write_obj(const TriMesh& m, const std::string& path);
TriMesh read_obj(const std::string& path);  // boundary flags from connectivity

}  // namespace freebound
