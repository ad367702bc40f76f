#pragma once

#include "shapeflow/field.hpp"
#include "shapeflow/grid.hpp"
#include "shapeflow/mesh.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace shapeflow {

/// Cube corners: bit b of the corner index is the offset along axis b.
/// Cube edges 0-3 run along x, 4-7 along y, 8-11 along z.
inline constexpr std::array<std::array<int, 2>, 12> kCubeEdgeCorners = {{
    {0, 1}, {2, 3}, {4, 5}, {6, 7},  // x edges at (y,z) = (0,0) (1,0) (0,1) (1,1)
    {0, 2}, {1, 3}, {4, 6}, {5, 7},  // y edges at (x,z) = (0,0) (1,0) (0,1) (1,1)
    {0, 4}, {1, 5}, {2, 6}, {3, 7},  // z edges at (x,y) = (0,0) (1,0) (0,1) (1,1)
}};

/// Triangulation of one corner-sign configuration. Bit c of the mask is set
/// when corner c is below the iso value.
struct CellCase {
  std::uint8_t mask = 0;
  /// Triples of cube-edge ids; triangles face towards the corners above iso.
  std::vector<std::array<int, 3>> triangles;
};

/// The 256-entry case table. Built once by walking the cube faces: every face
/// contributes the segments separating its corners (ambiguous faces always
/// keep the corners of their (0,0)-(1,1) diagonal apart), segments chain into
/// loops, loops are triangulated without chords lying in a cube face. The
/// face rule depends only on the face, so neighbouring cells agree and mask m
/// and 255-m give the same triangles with opposite orientation.
const std::array<CellCase, 256>& marching_cubes_table();

/// Isosurface {phi = iso} of the grid. Vertices are placed by linear
/// interpolation along cell edges and welded by grid-edge identity; triangles
/// face increasing phi. Empty mesh when nothing crosses iso.
TriMesh marching_cubes(const ScalarGrid& grid, double iso = 0.0);

struct SummaryStats {
  double mean = 0.0;
  double std = 0.0;
  double p95_abs = 0.0;
};
/// Mean, population standard deviation, and nearest-rank 95th percentile of |x|.
SummaryStats summarize(std::span<const double> values);

struct McReport {
  std::size_t vertex_count = 0;
  std::size_t face_count = 0;
  double mean_dist = 0.0;
  double max_dist = 0.0;
  /// Vertices where curvature could be estimated (manifold, fit succeeded).
  std::size_t curvature_vertices = 0;
  std::optional<SummaryStats> H;
  std::optional<SummaryStats> G;
};

/// Comparison record: distance to the level set and curvature statistics
/// over the vertices where curvature is available.
McReport mc_report(const TriMesh& surface, const FieldSource& src);

}  // namespace shapeflow
