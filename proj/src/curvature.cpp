#include "shapeflow/curvature.hpp"

#include "shapeflow/errors.hpp"
#include "shapeflow/parallel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace shapeflow {

RotationFrame rotation_to_z(const Vec3& n) {
  const Vec3 z = Vec3::UnitZ();
  const Vec3 cross = n.cross(z);
  const double s = cross.norm();
  RotationFrame frame;
  if (s < 1e-12) {
    if (n.dot(z) > 0.0) return frame;
    frame.R = Vec3(1.0, -1.0, -1.0).asDiagonal();
    frame.theta = std::acos(-1.0);
    return frame;
  }
  const Vec3 axis = cross / s;
  const double theta = std::atan2(s, n.dot(z));
  Mat3 K;
  K << 0.0, -axis.z(), axis.y(),
       axis.z(), 0.0, -axis.x(),
       -axis.y(), axis.x(), 0.0;
  frame.R = Mat3::Identity() + std::sin(theta) * K + (1.0 - std::cos(theta)) * (K * K);
  frame.theta = theta;
  frame.axis = axis;
  return frame;
}

std::vector<Vec3> local_patch(const TriMesh& mesh, std::span<const Vec3> normals, int v) {
  const auto ring = one_ring(mesh, v);
  if (ring.size() < 3) throw InsufficientNeighbors("vertex " + std::to_string(v) + " has fewer than 3 neighbours");
  const Mat3 R = rotation_to_z(normals[v]).R;
  const Vec3& c = mesh.vertex(v);
  std::vector<Vec3> q;
  q.reserve(ring.size());
  for (int u : ring) q.push_back(R * (mesh.vertex(u) - c));
  return q;
}

PatchFit fit_paraboloid(std::span<const Vec3> patch) {
  if (patch.size() < 3) throw SingularFit("paraboloid fit needs at least 3 points");
  Mat3 M = Mat3::Zero();
  Vec3 rhs = Vec3::Zero();
  for (const Vec3& q : patch) {
    const Vec3 row(0.5 * q.x() * q.x(), q.x() * q.y(), 0.5 * q.y() * q.y());
    M += row * row.transpose();
    rhs += q.z() * row;
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(M, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (!(lmax > 0.0) || !(lmin > 1e-14 * lmax)) throw SingularFit("paraboloid system is rank deficient");
  if (lmax > 1e12 * lmin) M.diagonal().array() += 1e-12 * M.trace();

  const Vec3 coef = M.ldlt().solve(rhs);
  if (!coef.allFinite()) throw SingularFit("paraboloid fit produced non-finite coefficients");

  PatchFit fit;
  fit.A = coef[0];
  fit.B = coef[1];
  fit.C = coef[2];
  fit.neighbor_count = static_cast<int>(patch.size());
  double ss = 0.0;
  for (const Vec3& q : patch) {
    const double r = q.z() - (0.5 * fit.A * q.x() * q.x() + fit.B * q.x() * q.y() + 0.5 * fit.C * q.y() * q.y());
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(patch.size()));
  return fit;
}

namespace {

CurvatureSample from_fit(const PatchFit& fit, const Vec3& normal) {
  // Weingarten matrix [[-A, B], [B, -C]]
  CurvatureSample s;
  s.H = -0.5 * (fit.A + fit.C);
  s.G = fit.A * fit.C - fit.B * fit.B;
  s.normal = normal;
  return s;
}

}  // namespace

CurvatureSample curvature(const TriMesh& mesh, std::span<const Vec3> normals, int v) {
  const std::vector<Vec3> patch = local_patch(mesh, normals, v);
  try {
    return from_fit(fit_paraboloid(patch), normals[v]);
  } catch (const SingularFit&) {
    const Mat3 R = rotation_to_z(normals[v]).R;
    std::vector<Vec3> wide;
    for (int u : two_ring(mesh, v)) wide.push_back(R * (mesh.vertex(u) - mesh.vertex(v)));
    return from_fit(fit_paraboloid(wide), normals[v]);
  }
}

std::vector<std::optional<CurvatureSample>> curvature_field_partial(const TriMesh& mesh, std::span<const Vec3> normals) {
  if (normals.size() != mesh.vertex_count()) throw InvalidArgument("curvature_field: one normal per vertex required");
  std::vector<std::optional<CurvatureSample>> out(mesh.vertex_count());
  parallel_for(mesh.vertex_count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      if (std::abs(normals[v].squaredNorm() - 1.0) > 1e-9) continue;
      try {
        out[v] = curvature(mesh, normals, static_cast<int>(v));
      } catch (const Error&) {
        out[v].reset();
      }
    }
  });
  return out;
}

std::vector<CurvatureSample> curvature_field(const TriMesh& mesh, std::span<const Vec3> normals) {
  if (normals.size() != mesh.vertex_count()) throw InvalidArgument("curvature_field: one normal per vertex required");
  std::vector<CurvatureSample> out(mesh.vertex_count());
  std::vector<std::string> failures(mesh.vertex_count());
  parallel_for(mesh.vertex_count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      try {
        out[v] = curvature(mesh, normals, static_cast<int>(v));
      } catch (const Error& e) {
        failures[v] = e.what();
      }
    }
  });
  std::string msg;
  int count = 0;
  for (std::size_t v = 0; v < failures.size(); ++v) {
    if (failures[v].empty()) continue;
    if (++count <= 8) msg += (msg.empty() ? "" : "; ") + std::string("vertex ") + std::to_string(v) + ": " + failures[v];
  }
  if (count > 0) {
    throw SingularFit("curvature failed at " + std::to_string(count) + " vertices (" + msg + ")");
  }
  return out;
}

}  // namespace shapeflow
