#pragma once

#include "shapeflow/types.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace shapeflow {

/// Regular lattice description. Node (i,j,k) sits at origin + (i,j,k)*spacing.
struct GridSpec {
  std::array<int, 3> dims{64, 64, 64};
  Vec3 origin{-2.5, -2.5, -2.5};
  Vec3 spacing{5.0 / 63.0, 5.0 / 63.0, 5.0 / 63.0};

  /// Cube [lo, hi]^3 sampled with n nodes per axis.
  static GridSpec cube(int n, double lo, double hi);
  /// [-2.5, 2.5]^3 with 64^3 nodes.
  static GridSpec standard() { return cube(64, -2.5, 2.5); }

  /// Throws InvalidArgument unless all dims >= 2 and all spacing > 0.
  void validate() const;

  std::size_t node_count() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
           static_cast<std::size_t>(dims[2]);
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(k));
  }
  Vec3 node(int i, int j, int k) const {
    return origin + Vec3(i * spacing.x(), j * spacing.y(), k * spacing.z());
  }
  Vec3 upper() const { return node(dims[0] - 1, dims[1] - 1, dims[2] - 1); }

  bool operator==(const GridSpec&) const = default;
};

/// Node values of a level-set function, x-fastest then y then z.
class ScalarGrid {
 public:
  ScalarGrid() = default;
  /// Zero-filled grid.
  explicit ScalarGrid(const GridSpec& spec);
  /// Takes ownership of values; throws InvalidArgument on size mismatch or non-finite values.
  ScalarGrid(const GridSpec& spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }

  double at(int i, int j, int k) const { return values_[spec_.index(i, j, k)]; }
  double& at(int i, int j, int k) { return values_[spec_.index(i, j, k)]; }

  bool operator==(const ScalarGrid&) const = default;

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

/// Cells kept clear of every face when sampling (see GridField).
inline constexpr double kSamplingMarginCells = 2.0;

/// True iff p lies inside the bounding box shrunk by margin_cells cells on every face.
bool inside_margin(const GridSpec& spec, const Vec3& p, double margin_cells = kSamplingMarginCells);

/// Trilinear blend of the 8 nodes enclosing p. Throws OutOfDomain when p violates the margin.
double sample_trilinear(const ScalarGrid& grid, const Vec3& p,
                        double margin_cells = kSamplingMarginCells);

// Pointwise CSG on grids sharing a GridSpec (InvalidArgument otherwise).
ScalarGrid csg_union(const ScalarGrid& a, const ScalarGrid& b);
ScalarGrid csg_intersect(const ScalarGrid& a, const ScalarGrid& b);
ScalarGrid csg_complement(const ScalarGrid& a);
ScalarGrid csg_subtract(const ScalarGrid& a, const ScalarGrid& b);

enum class Sdf1Encoding { Le64, Ascii };

/// SDF1 grid file: five ASCII header lines followed by a le64 or ascii payload.
void write_sdf1(const ScalarGrid& grid, const std::filesystem::path& path,
                Sdf1Encoding encoding = Sdf1Encoding::Le64);
ScalarGrid read_sdf1(const std::filesystem::path& path);

}  // namespace shapeflow
