#pragma once

#include "shapeflow/mesh.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace shapeflow {

/// Reads `v x y z` and `f i j k` records (1-based; `i/t/n` forms and negative
/// indices accepted; polygons fan-triangulated). Other records are ignored.
/// Throws ParseError with the line number, IoError if unreadable, and
/// ValidationError if `require_closed_genus0` and the mesh is not a closed,
/// outward-oriented genus-0 surface.
TriMesh read_obj(const std::filesystem::path& path, bool require_closed_genus0 = true);
void write_obj(const TriMesh& mesh, const std::filesystem::path& path);

/// ASCII PLY with double x, y, z and one float `quality` per vertex.
void write_ply(const TriMesh& mesh, std::span<const double> quality, const std::filesystem::path& path);

struct PlyMesh {
  TriMesh mesh;
  std::vector<double> quality;
};
/// Reads the ASCII PLY layout written by write_ply.
PlyMesh read_ply(const std::filesystem::path& path);

}  // namespace shapeflow
