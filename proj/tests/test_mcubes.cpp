#include "oracles.hpp"

#include "shapeflow/errors.hpp"
#include "shapeflow/mcubes.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

using namespace shapeflow;

namespace {

Vec3 corner(int c) { return Vec3(c & 1, (c >> 1) & 1, (c >> 2) & 1); }
Vec3 edge_mid(int e) { return 0.5 * (corner(kCubeEdgeCorners[e][0]) + corner(kCubeEdgeCorners[e][1])); }

/// Rotation-canonical form of a triangle.
std::array<int, 3> canon(std::array<int, 3> t) {
  while (t[0] != std::min({t[0], t[1], t[2]})) std::rotate(t.begin(), t.begin() + 1, t.end());
  return t;
}

/// Every directed edge used once and matched by its reverse.
bool oriented_closed(const TriMesh& m) {
  std::map<std::pair<int, int>, int> directed;
  for (const Face& f : m.faces())
    for (int k = 0; k < 3; ++k) ++directed[{f[k], f[(k + 1) % 3]}];
  for (const auto& [e, n] : directed) {
    if (n != 1) return false;
    auto it = directed.find({e.second, e.first});
    if (it == directed.end() || it->second != 1) return false;
  }
  return !directed.empty();
}

/// Linear interpolation error of each vertex along the grid edge it sits on,
/// relative to the value range of that edge.
double worst_edge_residual(const ScalarGrid& g, const TriMesh& m, double iso) {
  const GridSpec& s = g.spec();
  double worst = 0.0;
  for (const Vec3& p : m.vertices()) {
    Vec3 u = (p - s.origin).cwiseQuotient(s.spacing);
    int axis = -1;
    std::array<int, 3> lo{};
    for (int a = 0; a < 3; ++a) {
      const double r = std::round(u[a]);
      if (std::abs(u[a] - r) <= 1e-9) {
        lo[a] = static_cast<int>(r);
      } else {
        REQUIRE(axis == -1);
        axis = a;
        lo[a] = static_cast<int>(std::floor(u[a]));
      }
    }
    if (axis < 0) continue;  // vertex on a node
    std::array<int, 3> hi = lo;
    ++hi[axis];
    const double a = g.at(lo[0], lo[1], lo[2]), b = g.at(hi[0], hi[1], hi[2]);
    const double t = u[axis] - lo[axis];
    worst = std::max(worst, std::abs((1 - t) * a + t * b - iso) / std::max(std::abs(b - a), 1e-300));
  }
  return worst;
}

ScalarGrid random_grid(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return oracle::tabulate(GridSpec::cube(n, 0.0, 1.0), [&](const Vec3& p) {
    const bool boundary = (p.array() <= 1e-12).any() || (p.array() >= 1 - 1e-12).any();
    return boundary ? 1.0 : u(rng);
  });
}

}  // namespace

TEST_CASE("case table") {
  const auto& table = marching_cubes_table();
  CHECK(table[0].triangles.empty());
  CHECK(table[255].triangles.empty());
  for (int m = 0; m < 256; ++m) {
    CAPTURE(m);
    CHECK(table[m].mask == m);
    // Complement gives the same triangles, reversed.
    std::multiset<std::array<int, 3>> a, b;
    for (auto t : table[m].triangles) a.insert(canon({t[0], t[2], t[1]}));
    for (auto t : table[255 - m].triangles) b.insert(canon(t));
    CHECK(a == b);
    // Only edges whose corners differ in sign are used.
    for (const auto& t : table[m].triangles)
      for (int e : t) CHECK(((m >> kCubeEdgeCorners[e][0]) & 1) != ((m >> kCubeEdgeCorners[e][1]) & 1));
  }
  // Single-corner cases: one triangle facing away from the negative corner.
  for (int c = 0; c < 8; ++c) {
    const auto& tri = table[1 << c].triangles;
    REQUIRE(tri.size() == 1);
    const Vec3 n = (edge_mid(tri[0][1]) - edge_mid(tri[0][0])).cross(edge_mid(tri[0][2]) - edge_mid(tri[0][0]));
    CHECK(n.dot(edge_mid(tri[0][0]) - corner(c)) > 0.0);
  }
  // Two corners sharing an edge: one quad.
  CHECK(table[0b11].triangles.size() == 2);
}

TEST_CASE("trivial grids") {
  const GridSpec cell = GridSpec::cube(2, 0.0, 1.0);
  CHECK(marching_cubes(ScalarGrid(cell, std::vector<double>(8, 1.0))).empty());
  CHECK(marching_cubes(ScalarGrid(cell, std::vector<double>(8, -1.0))).empty());
  std::vector<double> v(8, 1.0);
  v[0] = -1.0;
  const TriMesh m = marching_cubes(ScalarGrid(cell, v));
  CHECK(m.face_count() == 1);
  CHECK(m.vertex_count() == 3);
  for (const Vec3& p : m.vertices()) CHECK(p.sum() == doctest::Approx(0.5));

  const GridSpec spec = GridSpec::cube(9, -1, 1);
  CHECK(marching_cubes(oracle::tabulate(spec, [](const Vec3&) { return 2.0; })).vertex_count() == 0);
  auto one = oracle::tabulate(spec, [](const Vec3&) { return 2.0; });
  one.at(4, 4, 4) = -1.0;
  const TriMesh oct = marching_cubes(one);
  CHECK(oct.vertex_count() == 6);
  CHECK(oct.face_count() == 8);
  CHECK(oriented_closed(oct));
  CHECK(oct.signed_volume() > 0.0);
}

TEST_CASE("sphere grid") {
  const ScalarGrid g = rasterize(Phantom::Sphere, GridSpec::standard());
  const TriMesh m = marching_cubes(g);
  REQUIRE(m.vertex_count() > 0);
  CHECK(m.is_closed());
  CHECK(oriented_closed(m));
  CHECK(m.signed_volume() > 0.0);
  CHECK_NOTHROW(m.validate_closed_genus0());
  const double diag = std::sqrt(3.0) * 5.0 / 63.0;
  for (const Vec3& p : m.vertices()) CHECK(std::abs(p.norm() - 1.0) <= diag);
  CHECK(worst_edge_residual(g, m, 0.0) <= 1e-9);

  const McReport r = mc_report(m, GridField(g));
  CHECK(r.vertex_count == m.vertex_count());
  CHECK(r.face_count == m.face_count());
  CHECK(r.mean_dist <= 0.01);
  CHECK(r.max_dist >= r.mean_dist);
  CHECK(r.curvature_vertices > 0);
  REQUIRE(r.H.has_value());
  CHECK(r.H->mean == doctest::Approx(1.0).epsilon(0.1));

  const TriMesh m3 = marching_cubes(g, 3.0);
  for (const Vec3& p : m3.vertices()) CHECK(std::abs(p.norm() - 2.0) <= diag);
  CHECK(worst_edge_residual(g, m3, 3.0) <= 1e-9);
  CHECK(oriented_closed(m3));
}

TEST_CASE("phantom grids are watertight") {
  for (Phantom p : {Phantom::Sphere, Phantom::Ellipsoid, Phantom::FusedSpheres, Phantom::Cylinder}) {
    CAPTURE(to_string(p));
    const ScalarGrid g = rasterize(p, GridSpec::standard());
    const TriMesh m = marching_cubes(g);
    CHECK(m.is_closed());
    CHECK(oriented_closed(m));
    CHECK(m.signed_volume() > 0.0);
    CHECK(m.euler_characteristic() == 2);
    CHECK(worst_edge_residual(g, m, 0.0) <= 1e-9);
  }
}

TEST_CASE("random grids with a positive boundary close up") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    CAPTURE(seed);
    const ScalarGrid g = random_grid(8, seed);
    const TriMesh m = marching_cubes(g);
    bool sign_change = false;
    for (double v : g.values()) sign_change = sign_change || v < 0.0;
    CHECK((m.vertex_count() > 0) == sign_change);
    if (m.vertex_count() == 0) continue;
    CHECK(m.is_closed());
    CHECK(oriented_closed(m));
    CHECK(m.signed_volume() > 0.0);
    CHECK(worst_edge_residual(g, m, 0.0) <= 1e-9);
  }
}

TEST_CASE("report on an empty or partial surface") {
  const McReport e = mc_report(TriMesh(), AnalyticField(Phantom::Sphere));
  CHECK(e.vertex_count == 0);
  CHECK_FALSE(e.H.has_value());
  // Two cubes touching at one corner give a non-manifold vertex that is skipped.
  const GridSpec spec = GridSpec::cube(6, 0, 5);
  auto g = oracle::tabulate(spec, [](const Vec3&) { return 1.0; });
  g.at(2, 2, 2) = -1.0;
  g.at(3, 3, 3) = -1.0;
  const TriMesh m = marching_cubes(g);
  const McReport r = mc_report(m, AnalyticField(Phantom::Sphere));
  CHECK(r.vertex_count == 12);
  CHECK(r.curvature_vertices <= r.vertex_count);
}

TEST_CASE("summary statistics") {
  std::vector<double> v{-3, 1, 2, 0.5, -0.25, 4, 1.5, -2, 0, 7};
  const SummaryStats s = summarize(v);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  CHECK(s.mean == doctest::Approx(mean));
  CHECK(s.std == doctest::Approx(std::sqrt(var / v.size())));
  CHECK(s.p95_abs == oracle::percentile_abs(v, 0.95));
}
