#pragma once

#include "shapeflow/types.hpp"

#include <memory>
#include <span>
#include <vector>

namespace shapeflow {

/// Connectivity shared by every mesh with the same faces. Built once; immutable.
struct Topology {
  std::vector<Face> faces;
  std::vector<std::vector<int>> incident_faces;
  /// Ordered one-ring per vertex; empty when the vertex is not a manifold interior vertex.
  std::vector<std::vector<int>> rings;
  std::vector<bool> ring_ok;
  /// Unique undirected edges (lo, hi).
  std::vector<std::array<int, 2>> edges;
  /// Number of faces using each edge, parallel to `edges`.
  std::vector<int> edge_face_count;
};

/// Triangle mesh: vertex positions plus shared, immutable connectivity.
/// Faces are counter-clockwise seen from outside.
class TriMesh {
 public:
  TriMesh() = default;
  /// Throws ValidationError on out-of-range or repeated face indices.
  TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t face_count() const { return topo_ ? topo_->faces.size() : 0; }
  bool empty() const { return vertices_.empty(); }

  std::span<const Vec3> vertices() const { return vertices_; }
  const Vec3& vertex(std::size_t i) const { return vertices_[i]; }
  std::span<const Face> faces() const;
  const Topology& topology() const { return *topo_; }

  /// Same connectivity, new positions (size must match).
  TriMesh with_vertices(std::vector<Vec3> vertices) const;

  std::size_t edge_count() const { return topo_ ? topo_->edges.size() : 0; }
  /// Every edge is shared by exactly two faces.
  bool is_closed() const;
  long euler_characteristic() const;
  /// Sum over faces of det[v0, v1, v2] / 6.
  double signed_volume() const;
  double area() const;

  /// Throws ValidationError unless closed, Euler characteristic 2 and positive volume.
  void validate_closed_genus0() const;

 private:
  std::vector<Vec3> vertices_;
  std::shared_ptr<const Topology> topo_;
};

/// Subdivided icosahedron with every vertex projected to the sphere of `radius`.
/// Requires radius > 0 and 0 <= subdiv <= 7.
TriMesh icosphere(double radius, int subdiv);

/// Unit vertex normals: normalized sum of incident face normals, each face
/// weighted by cross(e1, e2) / (|e1|^2 |e2|^2) at the vertex corner. This weighting is
/// exact for vertices whose neighbours lie on a common sphere. Throws DegenerateNormal.
std::vector<Vec3> vertex_normals(const TriMesh& mesh);
/// As vertex_normals, but degenerate vertices get the zero vector instead of throwing.
std::vector<Vec3> vertex_normals_partial(const TriMesh& mesh);

/// Neighbours of v in rotational order (counter-clockwise about the outward normal).
/// Throws NonManifoldVertex if the incident faces do not form one cycle.
std::span<const int> one_ring(const TriMesh& mesh, int v);

/// Vertices at graph distance 1 or 2 from v, ring order first then second ring ascending.
std::vector<int> two_ring(const TriMesh& mesh, int v);

/// One third of the area of each incident face.
std::vector<double> lumped_vertex_area(const TriMesh& mesh);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
/// Smallest interior angle over all faces, degrees.
double min_triangle_angle_deg(const TriMesh& mesh);

}  // namespace shapeflow
