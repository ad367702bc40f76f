#pragma once

#include "shapeflow/grid.hpp"

#include <cstdint>

namespace shapeflow::detail {

/// Lower-corner node index and fractional cell offsets of p. Cells are clamped
/// to the grid, so callers check the domain first.
void locate(const GridSpec& spec, const Vec3& p, std::int64_t& base, double& fx, double& fy, double& fz);

}  // namespace shapeflow::detail
