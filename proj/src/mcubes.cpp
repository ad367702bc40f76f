#include "shapeflow/mcubes.hpp"

#include "shapeflow/curvature.hpp"
#include "shapeflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace shapeflow {

namespace {

Vec3 corner_pos(int c) { return Vec3(c & 1, (c >> 1) & 1, (c >> 2) & 1); }

int edge_between(int a, int b) {
  for (int e = 0; e < 12; ++e) {
    const auto& ec = kCubeEdgeCorners[e];
    if ((ec[0] == a && ec[1] == b) || (ec[0] == b && ec[1] == a)) return e;
  }
  return -1;
}

Vec3 edge_mid(int e) { return 0.5 * (corner_pos(kCubeEdgeCorners[e][0]) + corner_pos(kCubeEdgeCorners[e][1])); }

/// True when both cube edges lie on one cube face.
bool share_face(int e0, int e1) {
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      bool all = true;
      for (int e : {e0, e1})
        for (int c : kCubeEdgeCorners[e]) all = all && ((c >> axis) & 1) == side;
      if (all) return true;
    }
  }
  return false;
}

/// Triangulates a closed loop of cube edges without chords between
/// non-consecutive vertices on one cube face: such a chord would lie in the
/// face and be repeated by the neighbouring cell. The result depends only on
/// the loop as an unoriented cycle, so a reversed loop gives reversed triangles.
void triangulate_loop(std::vector<int> loop, std::vector<std::array<int, 3>>& out) {
  const int n = static_cast<int>(loop.size());
  std::rotate(loop.begin(), std::min_element(loop.begin(), loop.end()), loop.end());
  const bool reversed = loop[1] > loop[n - 1];
  if (reversed) std::reverse(loop.begin() + 1, loop.end());

  auto chord_ok = [&](int i, int j) { return j - i == 1 || (i == 0 && j == n - 1) || !share_face(loop[i], loop[j]); };
  // feasible[i][j]: polygon loop[i..j] can be triangulated with allowed chords.
  std::vector<std::vector<int>> split(n, std::vector<int>(n, -1));
  std::vector<std::vector<char>> feasible(n, std::vector<char>(n, 0));
  for (int i = 0; i + 1 < n; ++i) feasible[i][i + 1] = 1;
  for (int len = 2; len < n; ++len) {
    for (int i = 0; i + len < n; ++i) {
      const int j = i + len;
      if (!chord_ok(i, j)) continue;
      for (int k = i + 1; k < j && !feasible[i][j]; ++k) {
        if (feasible[i][k] && feasible[k][j]) {
          feasible[i][j] = 1;
          split[i][j] = k;
        }
      }
    }
  }
  if (!feasible[0][n - 1]) throw std::logic_error("marching cubes: loop has no face-consistent triangulation");

  std::vector<std::array<int, 2>> stack{{0, n - 1}};
  while (!stack.empty()) {
    const auto [i, j] = stack.back();
    stack.pop_back();
    if (j - i < 2) continue;
    const int k = split[i][j];
    if (reversed) out.push_back({loop[i], loop[j], loop[k]});
    else out.push_back({loop[i], loop[k], loop[j]});
    stack.push_back({i, k});
    stack.push_back({k, j});
  }
}

CellCase build_case(int mask) {
  auto negative = [mask](int c) { return (mask >> c) & 1; };
  std::map<int, int> next;  // directed segments: edge -> edge

  for (int axis = 0; axis < 3; ++axis) {
    const int u = axis == 0 ? 1 : 0;
    const int v = axis == 2 ? 1 : 2;
    for (int side = 0; side < 2; ++side) {
      // Face corners in cyclic order (0,0) (1,0) (1,1) (0,1) over (u, v).
      std::array<int, 4> q{};
      const int offs[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
      for (int k = 0; k < 4; ++k) q[k] = (side << axis) | (offs[k][0] << u) | (offs[k][1] << v);
      Vec3 normal = Vec3::Zero();
      normal[axis] = side ? 1.0 : -1.0;
      const Vec3 center = 0.25 * (corner_pos(q[0]) + corner_pos(q[1]) + corner_pos(q[2]) + corner_pos(q[3]));

      std::vector<int> crossing;  // indices k of face edges q[k]-q[k+1] that change sign
      for (int k = 0; k < 4; ++k) {
        if (negative(q[k]) != negative(q[(k + 1) % 4])) crossing.push_back(k);
      }
      auto add_segment = [&](int ka, int kb, const Vec3& towards_positive) {
        int ea = edge_between(q[ka], q[(ka + 1) % 4]);
        int eb = edge_between(q[kb], q[(kb + 1) % 4]);
        const Vec3 dir = towards_positive.cross(normal);
        if ((edge_mid(eb) - edge_mid(ea)).dot(dir) < 0.0) std::swap(ea, eb);
        next[ea] = eb;
      };
      auto corner_side = [&](int k) {
        const Vec3 p = corner_pos(q[k]);
        return negative(q[k]) ? Vec3(center - p) : Vec3(p - center);
      };

      if (crossing.size() == 2) {
        Vec3 pos = Vec3::Zero(), neg = Vec3::Zero();
        int np = 0, nn = 0;
        for (int k = 0; k < 4; ++k) {
          if (negative(q[k])) {
            neg += corner_pos(q[k]);
            ++nn;
          } else {
            pos += corner_pos(q[k]);
            ++np;
          }
        }
        add_segment(crossing[0], crossing[1], pos / np - neg / nn);
      } else if (crossing.size() == 4) {
        // Cut off q0 (edges 3 and 0) and q2 (edges 1 and 2).
        add_segment(3, 0, corner_side(0));
        add_segment(1, 2, corner_side(2));
      }
    }
  }

  CellCase cc;
  cc.mask = static_cast<std::uint8_t>(mask);
  while (!next.empty()) {
    std::vector<int> loop;
    int e = next.begin()->first;
    while (next.count(e)) {
      loop.push_back(e);
      const int n = next[e];
      next.erase(e);
      e = n;
    }
    triangulate_loop(loop, cc.triangles);
  }
  return cc;
}

}  // namespace

const std::array<CellCase, 256>& marching_cubes_table() {
  static const std::array<CellCase, 256> table = [] {
    std::array<CellCase, 256> t;
    for (int m = 0; m < 256; ++m) t[m] = build_case(m);
    return t;
  }();
  return table;
}

TriMesh marching_cubes(const ScalarGrid& grid, double iso) {
  const auto& table = marching_cubes_table();
  const GridSpec& spec = grid.spec();
  const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
  std::vector<int> edge_vertex(grid.size() * 3, -1);
  std::vector<Vec3> verts;
  std::vector<Face> faces;

  auto vertex_on = [&](int i, int j, int k, int cube_edge) {
    const int c0 = kCubeEdgeCorners[cube_edge][0];
    const int c1 = kCubeEdgeCorners[cube_edge][1];
    const int axis = cube_edge / 4;
    const int i0 = i + (c0 & 1), j0 = j + ((c0 >> 1) & 1), k0 = k + ((c0 >> 2) & 1);
    const int i1 = i + (c1 & 1), j1 = j + ((c1 >> 1) & 1), k1 = k + ((c1 >> 2) & 1);
    const std::size_t key = spec.index(i0, j0, k0) * 3 + static_cast<std::size_t>(axis);
    if (edge_vertex[key] < 0) {
      const double v0 = grid.at(i0, j0, k0), v1 = grid.at(i1, j1, k1);
      const double t = (iso - v0) / (v1 - v0);
      const Vec3 p0 = spec.node(i0, j0, k0), p1 = spec.node(i1, j1, k1);
      edge_vertex[key] = static_cast<int>(verts.size());
      verts.push_back(p0 + t * (p1 - p0));
    }
    return edge_vertex[key];
  };

  for (int k = 0; k + 1 < nz; ++k) {
    for (int j = 0; j + 1 < ny; ++j) {
      for (int i = 0; i + 1 < nx; ++i) {
        int mask = 0;
        for (int c = 0; c < 8; ++c) {
          if (grid.at(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1)) < iso) mask |= 1 << c;
        }
        for (const auto& tri : table[mask].triangles) {
          faces.push_back({vertex_on(i, j, k, tri[0]), vertex_on(i, j, k, tri[1]), vertex_on(i, j, k, tri[2])});
        }
      }
    }
  }
  return TriMesh(std::move(verts), std::move(faces));
}

SummaryStats summarize(std::span<const double> values) {
  SummaryStats s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  for (double v : values) s.std += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(s.std / n);
  std::vector<double> a(values.size());
  std::transform(values.begin(), values.end(), a.begin(), [](double v) { return std::abs(v); });
  std::sort(a.begin(), a.end());
  // Nearest rank.
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * n));
  s.p95_abs = a[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

McReport mc_report(const TriMesh& surface, const FieldSource& src) {
  McReport r;
  r.vertex_count = surface.vertex_count();
  r.face_count = surface.face_count();
  if (surface.empty()) return r;

  std::vector<Vec3> inside;
  for (const Vec3& p : surface.vertices()) {
    if (src.admissible(p)) inside.push_back(p);
  }
  if (!inside.empty()) {
    FieldBatch field;
    src.sample_batch(inside, field);
    for (std::size_t i = 0; i < field.size(); ++i) {
      const double g = std::sqrt(field.gx[i] * field.gx[i] + field.gy[i] * field.gy[i] + field.gz[i] * field.gz[i]);
      const double d = std::abs(field.phi[i]) / std::max(g, 1e-9);
      r.mean_dist += d;
      r.max_dist = std::max(r.max_dist, d);
    }
    r.mean_dist /= static_cast<double>(field.size());
  }

  const auto normals = vertex_normals_partial(surface);
  const auto curv = curvature_field_partial(surface, normals);
  std::vector<double> H, G;
  for (const auto& c : curv) {
    if (!c) continue;
    H.push_back(c->H);
    G.push_back(c->G);
  }
  r.curvature_vertices = H.size();
  if (!H.empty()) {
    r.H = summarize(H);
    r.G = summarize(G);
  }
  return r;
}

}  // namespace shapeflow
