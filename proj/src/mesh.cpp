#include "shapeflow/mesh.hpp"

#include "shapeflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>

namespace shapeflow {

namespace {

std::vector<int> ordered_ring(int v, const std::vector<Face>& faces, const std::vector<int>& incident, bool& ok) {
  ok = false;
  if (incident.size() < 2) return {};
  std::vector<std::pair<int, int>> next;  // (b, c) for face (v, b, c)
  next.reserve(incident.size());
  for (int f : incident) {
    const Face& t = faces[f];
    const int k = t[0] == v ? 0 : t[1] == v ? 1 : 2;
    next.emplace_back(t[(k + 1) % 3], t[(k + 2) % 3]);
  }
  std::sort(next.begin(), next.end());
  for (std::size_t i = 1; i < next.size(); ++i) {
    if (next[i].first == next[i - 1].first) return {};
  }
  auto successor = [&](int b) -> int {
    auto it = std::lower_bound(next.begin(), next.end(), std::make_pair(b, -1));
    return (it != next.end() && it->first == b) ? it->second : -1;
  };
  // Start from the face listed first so ring order follows face order, not index order.
  const Face& f0 = faces[incident.front()];
  const int k0 = f0[0] == v ? 0 : f0[1] == v ? 1 : 2;
  const int start = f0[(k0 + 1) % 3];
  std::vector<int> ring{start};
  for (int cur = successor(start); cur != start; cur = successor(cur)) {
    if (cur < 0 || ring.size() > next.size()) return {};
    ring.push_back(cur);
  }
  if (ring.size() != next.size()) return {};
  ok = true;
  return ring;
}

std::shared_ptr<const Topology> build_topology(std::size_t nv, std::vector<Face> faces) {
  auto topo = std::make_shared<Topology>();
  topo->incident_faces.assign(nv, {});
  std::vector<std::array<int, 2>> half;
  half.reserve(faces.size() * 3);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& t = faces[f];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || static_cast<std::size_t>(t[k]) >= nv) {
        throw ValidationError("face " + std::to_string(f) + " references missing vertex " + std::to_string(t[k]));
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw ValidationError("face " + std::to_string(f) + " repeats a vertex index");
    }
    for (int k = 0; k < 3; ++k) {
      topo->incident_faces[t[k]].push_back(static_cast<int>(f));
      const int a = t[k], b = t[(k + 1) % 3];
      half.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  std::sort(half.begin(), half.end());
  for (std::size_t i = 0; i < half.size();) {
    std::size_t j = i;
    while (j < half.size() && half[j] == half[i]) ++j;
    topo->edges.push_back(half[i]);
    topo->edge_face_count.push_back(static_cast<int>(j - i));
    i = j;
  }
  topo->rings.resize(nv);
  topo->ring_ok.assign(nv, false);
  for (std::size_t v = 0; v < nv; ++v) {
    bool ok = false;
    topo->rings[v] = ordered_ring(static_cast<int>(v), faces, topo->incident_faces[v], ok);
    topo->ring_ok[v] = ok;
  }
  topo->faces = std::move(faces);
  return topo;
}

}  // namespace

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), topo_(build_topology(vertices_.size(), std::move(faces))) {}

std::span<const Face> TriMesh::faces() const {
  if (!topo_) return {};
  return topo_->faces;
}

TriMesh TriMesh::with_vertices(std::vector<Vec3> vertices) const {
  if (vertices.size() != vertices_.size()) throw InvalidArgument("with_vertices: vertex count changed");
  TriMesh out;
  out.vertices_ = std::move(vertices);
  out.topo_ = topo_;
  return out;
}

bool TriMesh::is_closed() const {
  if (!topo_ || topo_->faces.empty()) return false;
  return std::all_of(topo_->edge_face_count.begin(), topo_->edge_face_count.end(), [](int c) { return c == 2; });
}

long TriMesh::euler_characteristic() const {
  return static_cast<long>(vertex_count()) - static_cast<long>(edge_count()) + static_cast<long>(face_count());
}

double TriMesh::signed_volume() const {
  double vol = 0.0;
  for (const Face& f : faces()) {
    vol += vertices_[f[0]].dot(vertices_[f[1]].cross(vertices_[f[2]]));
  }
  return vol / 6.0;
}

double TriMesh::area() const {
  double a = 0.0;
  for (const Face& f : faces()) a += triangle_area(vertices_[f[0]], vertices_[f[1]], vertices_[f[2]]);
  return a;
}

void TriMesh::validate_closed_genus0() const {
  if (!topo_ || topo_->faces.empty()) throw ValidationError("mesh has no faces");
  for (std::size_t e = 0; e < topo_->edges.size(); ++e) {
    if (topo_->edge_face_count[e] != 2) {
      throw ValidationError("edge (" + std::to_string(topo_->edges[e][0]) + ", " + std::to_string(topo_->edges[e][1]) +
                            ") is used by " + std::to_string(topo_->edge_face_count[e]) + " faces");
    }
  }
  for (std::size_t v = 0; v < vertex_count(); ++v) {
    if (!topo_->ring_ok[v]) throw ValidationError("vertex " + std::to_string(v) + " is not a manifold vertex");
  }
  if (euler_characteristic() != 2) {
    throw ValidationError("Euler characteristic is " + std::to_string(euler_characteristic()) + ", expected 2");
  }
  if (!(signed_volume() > 0.0)) throw ValidationError("mesh is not outward oriented (signed volume <= 0)");
}

TriMesh icosphere(double radius, int subdiv) {
  if (!(radius > 0.0) || subdiv < 0 || subdiv > 7) throw InvalidArgument("icosphere needs radius > 0 and 0 <= subdiv <= 7");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : v) p.normalize();
  std::vector<Face> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                         {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                         {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdiv; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto [it, inserted] = midpoint.try_emplace(key, static_cast<int>(v.size()));
      if (inserted) v.push_back((v[a] + v[b]).normalized());
      return it->second;
    };
    std::vector<Face> next;
    next.reserve(f.size() * 4);
    for (const Face& tri : f) {
      const int ab = mid(tri[0], tri[1]), bc = mid(tri[1], tri[2]), ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  for (Vec3& p : v) p *= radius;
  return TriMesh(std::move(v), std::move(f));
}

namespace {

// Unnormalized weighted sums and the sum of weight magnitudes per vertex.
void accumulate_normals(const TriMesh& mesh, std::vector<Vec3>& sum, std::vector<double>& mag) {
  const auto verts = mesh.vertices();
  sum.assign(verts.size(), Vec3::Zero());
  mag.assign(verts.size(), 0.0);
  for (const Face& f : mesh.faces()) {
    for (int k = 0; k < 3; ++k) {
      const int a = f[k], b = f[(k + 1) % 3], c = f[(k + 2) % 3];
      const Vec3 e1 = verts[b] - verts[a];
      const Vec3 e2 = verts[c] - verts[a];
      const double denom = e1.squaredNorm() * e2.squaredNorm();
      if (!(denom > 0.0)) continue;
      const Vec3 w = e1.cross(e2) / denom;
      sum[a] += w;
      mag[a] += w.norm();
    }
  }
}

bool normalize_in_place(Vec3& v, double mag) {
  const double n = v.norm();
  if (!(n > 1e-12 * mag) || !std::isfinite(n)) return false;
  v /= n;
  return true;
}

}  // namespace

std::vector<Vec3> vertex_normals(const TriMesh& mesh) {
  std::vector<Vec3> sum;
  std::vector<double> mag;
  accumulate_normals(mesh, sum, mag);
  for (std::size_t i = 0; i < sum.size(); ++i) {
    if (!normalize_in_place(sum[i], mag[i])) throw DegenerateNormal(i);
  }
  return sum;
}

std::vector<Vec3> vertex_normals_partial(const TriMesh& mesh) {
  std::vector<Vec3> sum;
  std::vector<double> mag;
  accumulate_normals(mesh, sum, mag);
  for (std::size_t i = 0; i < sum.size(); ++i) {
    if (!normalize_in_place(sum[i], mag[i])) sum[i].setZero();
  }
  return sum;
}

std::span<const int> one_ring(const TriMesh& mesh, int v) {
  if (v < 0 || static_cast<std::size_t>(v) >= mesh.vertex_count()) throw InvalidArgument("one_ring: vertex out of range");
  if (!mesh.topology().ring_ok[v]) throw NonManifoldVertex(static_cast<std::size_t>(v));
  return mesh.topology().rings[v];
}

std::vector<int> two_ring(const TriMesh& mesh, int v) {
  const auto first = one_ring(mesh, v);
  std::vector<int> out(first.begin(), first.end());
  std::vector<int> second;
  for (int u : first) {
    for (int f : mesh.topology().incident_faces[u]) {
      for (int w : mesh.topology().faces[f]) {
        if (w != v && std::find(first.begin(), first.end(), w) == first.end()) second.push_back(w);
      }
    }
  }
  std::sort(second.begin(), second.end());
  second.erase(std::unique(second.begin(), second.end()), second.end());
  out.insert(out.end(), second.begin(), second.end());
  return out;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) { return 0.5 * (b - a).cross(c - a).norm(); }

std::vector<double> lumped_vertex_area(const TriMesh& mesh) {
  std::vector<double> area(mesh.vertex_count(), 0.0);
  const auto v = mesh.vertices();
  for (const Face& f : mesh.faces()) {
    const double third = triangle_area(v[f[0]], v[f[1]], v[f[2]]) / 3.0;
    for (int k : f) area[k] += third;
  }
  return area;
}

double min_triangle_angle_deg(const TriMesh& mesh) {
  double best = 180.0;
  const auto v = mesh.vertices();
  for (const Face& f : mesh.faces()) {
    for (int k = 0; k < 3; ++k) {
      const Vec3 e1 = v[f[(k + 1) % 3]] - v[f[k]];
      const Vec3 e2 = v[f[(k + 2) % 3]] - v[f[k]];
      const double ang = std::atan2(e1.cross(e2).norm(), e1.dot(e2));
      best = std::min(best, ang * 180.0 / std::numbers::pi);
    }
  }
  return best;
}

}  // namespace shapeflow
