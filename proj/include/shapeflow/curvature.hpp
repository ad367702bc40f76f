#pragma once

#include "shapeflow/mesh.hpp"

#include <optional>
#include <span>
#include <vector>

namespace shapeflow {

/// Rotation taking a unit normal onto +z.
struct RotationFrame {
  Mat3 R = Mat3::Identity();
  double theta = 0.0;
  /// Rotation axis; unset when the normal is (anti)parallel to z.
  std::optional<Vec3> axis;
};

/// Rodrigues rotation R = I + sin(theta) K + (1 - cos(theta)) K^2 about
/// axis = (n x z) / |n x z|, theta = angle(n, z). When |n x z| < 1e-12 the
/// result is the identity (n . z > 0) or diag(1, -1, -1).
RotationFrame rotation_to_z(const Vec3& n);

/// Least-squares paraboloid z = (A/2) x^2 + B x y + (C/2) y^2 through the origin.
struct PatchFit {
  double A = 0.0, B = 0.0, C = 0.0;
  /// RMS of z_i - z(x_i, y_i).
  double residual = 0.0;
  int neighbor_count = 0;
};

/// Neighbours of v expressed in the tangent frame of v: q_i = R (v_i - v).
/// Throws InsufficientNeighbors when v has fewer than 3 ring neighbours.
std::vector<Vec3> local_patch(const TriMesh& mesh, std::span<const Vec3> normals, int v);

/// Normal-equation solve of the 3x3 paraboloid system. A system with condition
/// number above 1e12 gets a Tikhonov term 1e-12 * trace; a numerically
/// singular one (smallest eigenvalue <= 1e-14 * largest) throws SingularFit, as
/// does a patch of fewer than 3 points.
PatchFit fit_paraboloid(std::span<const Vec3> patch);

struct CurvatureSample {
  double H = 0.0;  ///< mean curvature, -(A + C) / 2
  double G = 0.0;  ///< Gaussian curvature, AC - B^2
  Vec3 normal = Vec3::UnitZ();
};

/// Curvature at v from the one-ring paraboloid fit; retries with the two-ring
/// when the one-ring fit is singular. Positive H on convex outward surfaces.
CurvatureSample curvature(const TriMesh& mesh, std::span<const Vec3> normals, int v);

/// curvature() at every vertex (possibly in parallel). Failures are collected
/// and rethrown as one SingularFit / InsufficientNeighbors listing the vertex ids.
std::vector<CurvatureSample> curvature_field(const TriMesh& mesh, std::span<const Vec3> normals);

/// Like curvature_field but records failures instead of throwing; failed
/// vertices, and vertices whose normal is not unit length, are nullopt.
std::vector<std::optional<CurvatureSample>> curvature_field_partial(const TriMesh& mesh, std::span<const Vec3> normals);

}  // namespace shapeflow
