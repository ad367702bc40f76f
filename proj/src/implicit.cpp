#include "shapeflow/implicit.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

namespace shapeflow {

Implicit Implicit::sphere(const Vec3& center, double radius) {
  return Implicit([center, r2 = radius * radius](const Vec3& p) {
    const Vec3 d = p - center;
    return FieldSample{d.squaredNorm() - r2, 2.0 * d, 2.0 * Mat3::Identity()};
  });
}

Implicit Implicit::ellipsoid(const Vec3& center, const Vec3& semi_axes) {
  const Vec3 inv2 = semi_axes.cwiseProduct(semi_axes).cwiseInverse();
  return Implicit([center, inv2](const Vec3& p) {
    const Vec3 d = p - center;
    FieldSample s;
    s.phi = d.cwiseProduct(d).dot(inv2) - 1.0;
    s.grad = 2.0 * d.cwiseProduct(inv2);
    s.hess = (2.0 * inv2).asDiagonal();
    return s;
  });
}

Implicit Implicit::plane(const Vec3& normal, double offset) {
  return Implicit([normal, offset](const Vec3& p) {
    return FieldSample{normal.dot(p) - offset, normal, Mat3::Zero()};
  });
}

Implicit Implicit::z_cylinder(double cx, double cy, double radius) {
  return Implicit([cx, cy, r2 = radius * radius](const Vec3& p) {
    const double dx = p.x() - cx, dy = p.y() - cy;
    FieldSample s;
    s.phi = dx * dx + dy * dy - r2;
    s.grad = Vec3(2.0 * dx, 2.0 * dy, 0.0);
    s.hess.diagonal() << 2.0, 2.0, 0.0;
    return s;
  });
}

Implicit csg_union(Implicit a, Implicit b) {
  return Implicit([a = std::move(a), b = std::move(b)](const Vec3& p) {
    FieldSample sa = a.sample(p);
    FieldSample sb = b.sample(p);
    return sa.phi <= sb.phi ? sa : sb;
  });
}

Implicit csg_intersect(Implicit a, Implicit b) {
  return Implicit([a = std::move(a), b = std::move(b)](const Vec3& p) {
    FieldSample sa = a.sample(p);
    FieldSample sb = b.sample(p);
    return sa.phi >= sb.phi ? sa : sb;
  });
}

Implicit csg_complement(Implicit a) {
  return Implicit([a = std::move(a)](const Vec3& p) {
    FieldSample s = a.sample(p);
    s.phi = -s.phi;
    s.grad = -s.grad;
    s.hess = -s.hess;
    return s;
  });
}

Implicit csg_subtract(Implicit a, Implicit b) { return csg_intersect(std::move(a), csg_complement(std::move(b))); }

std::string_view to_string(Phantom phantom) {
  switch (phantom) {
    case Phantom::Sphere: return "sphere";
    case Phantom::Ellipsoid: return "ellipsoid";
    case Phantom::FusedSpheres: return "fused";
    case Phantom::Cylinder: return "cylinder";
  }
  return "unknown";
}

std::optional<Phantom> parse_phantom(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "sphere") return Phantom::Sphere;
  if (s == "ellipsoid") return Phantom::Ellipsoid;
  if (s == "fused" || s == "fusedspheres" || s == "fused_spheres") return Phantom::FusedSpheres;
  if (s == "cylinder") return Phantom::Cylinder;
  return std::nullopt;
}

Implicit phantom_implicit(Phantom phantom) {
  switch (phantom) {
    case Phantom::Sphere:
      return Implicit::sphere(Vec3::Zero(), 1.0);
    case Phantom::Ellipsoid:
      return Implicit::ellipsoid(Vec3::Zero(), Vec3(1.0, 2.0, 1.0));
    case Phantom::FusedSpheres:
      return csg_union(Implicit::sphere(Vec3(0.0, 0.0, 0.7), 0.8), Implicit::sphere(Vec3(0.0, 0.0, -0.7), 0.8));
    case Phantom::Cylinder: {
      // z - 1, -(z + 1), x^2 + y^2 - 0.4^2
      Implicit caps = csg_intersect(Implicit::plane(Vec3(0.0, 0.0, 1.0), 1.0), Implicit::plane(Vec3(0.0, 0.0, -1.0), 1.0));
      return csg_intersect(std::move(caps), Implicit::z_cylinder(0.0, 0.0, 0.4));
    }
  }
  return Implicit::sphere(Vec3::Zero(), 1.0);
}

double phantom_field(Phantom phantom, const Vec3& p) {
  // Same evaluators as phantom_implicit, so grids and analytic samples agree bit for bit.
  static const std::array<Implicit, 4> fields{phantom_implicit(Phantom::Sphere), phantom_implicit(Phantom::Ellipsoid),
                                              phantom_implicit(Phantom::FusedSpheres),
                                              phantom_implicit(Phantom::Cylinder)};
  return fields[static_cast<std::size_t>(phantom)](p);
}

ScalarGrid rasterize(const Implicit& field, const GridSpec& spec) {
  ScalarGrid grid(spec);
  for (int k = 0; k < spec.dims[2]; ++k) {
    for (int j = 0; j < spec.dims[1]; ++j) {
      for (int i = 0; i < spec.dims[0]; ++i) grid.at(i, j, k) = field(spec.node(i, j, k));
    }
  }
  return grid;
}

ScalarGrid rasterize(Phantom phantom, const GridSpec& spec) {
  ScalarGrid grid(spec);
  for (int k = 0; k < spec.dims[2]; ++k) {
    for (int j = 0; j < spec.dims[1]; ++j) {
      for (int i = 0; i < spec.dims[0]; ++i) grid.at(i, j, k) = phantom_field(phantom, spec.node(i, j, k));
    }
  }
  return grid;
}

}  // namespace shapeflow
