#pragma once

#include "shapeflow/grid.hpp"
#include "shapeflow/types.hpp"

#include <functional>
#include <optional>
#include <string_view>

namespace shapeflow {

/// Value, gradient and Hessian of a level-set function at one point.
struct FieldSample {
  double phi = 0.0;
  Vec3 grad = Vec3::Zero();
  Mat3 hess = Mat3::Zero();
};

/// Analytic level-set function carrying exact first and second derivatives.
///
/// CSG combinators select the active operand pointwise, so derivatives of a
/// composed field are those of the branch that attains the min/max (ties go
/// to the left operand). The result is C0 across creases and exact elsewhere.
class Implicit {
 public:
  using Evaluator = std::function<FieldSample(const Vec3&)>;

  Implicit() = default;
  explicit Implicit(Evaluator eval) : eval_(std::move(eval)) {}

  FieldSample sample(const Vec3& p) const { return eval_(p); }
  double operator()(const Vec3& p) const { return eval_(p).phi; }

  /// |p - center|^2 - radius^2
  static Implicit sphere(const Vec3& center, double radius);
  /// sum_i ((p_i - c_i) / a_i)^2 - 1
  static Implicit ellipsoid(const Vec3& center, const Vec3& semi_axes);
  /// normal . p - offset (half-space, negative on the side opposite the normal)
  static Implicit plane(const Vec3& normal, double offset);
  /// (p_x - c_x)^2 + (p_y - c_y)^2 - radius^2, an infinite cylinder along z
  static Implicit z_cylinder(double cx, double cy, double radius);

 private:
  Evaluator eval_;
};

inline double csg_union(double a, double b) { return a <= b ? a : b; }
inline double csg_intersect(double a, double b) { return a >= b ? a : b; }
inline double csg_complement(double a) { return -a; }
inline double csg_subtract(double a, double b) { return csg_intersect(a, -b); }

Implicit csg_union(Implicit a, Implicit b);
Implicit csg_intersect(Implicit a, Implicit b);
Implicit csg_complement(Implicit a);
Implicit csg_subtract(Implicit a, Implicit b);

enum class Phantom { Sphere, Ellipsoid, FusedSpheres, Cylinder };

std::string_view to_string(Phantom phantom);
/// Accepts "sphere", "ellipsoid", "fused", "cylinder" (and the enum spellings, case-insensitive).
std::optional<Phantom> parse_phantom(std::string_view name);

/// The phantom as a composed analytic field:
///   Sphere:       x^2 + y^2 + z^2 - 1
///   Ellipsoid:    x^2 + y^2/4 + z^2 - 1
///   FusedSpheres: min of spheres of radius 0.8 centred at (0,0,+-0.7)
///   Cylinder:     max(z - 1, -(z + 1), x^2 + y^2 - 0.16)
Implicit phantom_implicit(Phantom phantom);

double phantom_field(Phantom phantom, const Vec3& p);

/// values[i,j,k] = field(node(i,j,k)).
ScalarGrid rasterize(const Implicit& field, const GridSpec& spec);
ScalarGrid rasterize(Phantom phantom, const GridSpec& spec);

}  // namespace shapeflow
