#pragma once

#include "shapeflow/curvature.hpp"
#include "shapeflow/field.hpp"
#include "shapeflow/mesh.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shapeflow {

struct FlowConfig {
  double alpha = 5.0;  ///< weight of the phi^2 term
  double beta = 1.0;   ///< weight of the tangential-gradient term
  double dt = 1e-3;
  int max_iters = 100;
  double rel_energy_tol = 1e-6;
  double initial_radius = 2.0;
  int subdiv = 4;
  int export_every = 0;
  /// Optional absolute stop: E < energy_threshold. Off by default.
  std::optional<double> energy_threshold;
  double rel_eps = 1e-12;
  double grad_eps = 1e-9;

  /// Throws InvalidArgument on any out-of-range parameter.
  void validate() const;
};

struct EnergyTerms {
  double total = 0.0;
  double alpha_term = 0.0;  ///< alpha * integral of phi^2
  double beta_term = 0.0;   ///< beta * integral of |grad_Gamma phi|^2
};

/// E = sum_v A_v (alpha phi(v)^2 + beta max(0, |grad phi|^2 - (grad phi . n)^2)),
/// A_v the lumped vertex area. Throws OutOfDomain.
EnergyTerms energy(const TriMesh& mesh, const FieldSource& src, double alpha, double beta);

struct VertexGradient {
  std::vector<double> g;  ///< normal-velocity density per vertex
  std::vector<Vec3> normals;
};

/// Per-vertex shape-gradient density (see kernels::gradient_density) from the
/// given normals and curvatures. Throws OutOfDomain.
VertexGradient shape_gradient(const TriMesh& mesh, std::span<const Vec3> normals,
                              std::span<const CurvatureSample> curvatures, const FieldSource& src, double alpha,
                              double beta);

struct StepResult {
  TriMesh mesh;
  VertexGradient gradient;
  std::vector<CurvatureSample> curvatures;
  double max_abs_g = 0.0;
  double mean_H = 0.0;
};

/// One simultaneous update v' = v - dt g(v) n(v). Normals, curvatures and
/// field samples all come from the input snapshot. Throws OutOfDomain,
/// NonFiniteUpdate, or curvature errors.
StepResult evolve_step(const TriMesh& mesh, const FlowConfig& config, const FieldSource& src);

struct TraceRecord {
  int iter = 0;
  double E_total = 0.0;
  double E_alpha = 0.0;
  double E_beta = 0.0;
  double rel_change = 0.0;
  double mean_abs_phi = 0.0;
  double max_abs_g = 0.0;
  double mean_H = 0.0;
  double runtime_ms = 0.0;
  double signed_volume = 0.0;
};

using FlowTrace = std::vector<TraceRecord>;

enum class Termination { Converged, BelowThreshold, MaxIters, Aborted };
std::string_view to_string(Termination t);

struct FlowResult {
  TriMesh mesh;
  FlowTrace trace;
  EnergyTerms initial_energy;
  Termination termination = Termination::MaxIters;
  /// Set when aborted: what failed and where (iteration, vertex).
  std::string diagnostic;
};

struct FlowHooks {
  /// Called with (iteration, mesh) every export_every iterations when export_every > 0.
  std::function<void(int, const TriMesh&)> snapshot;
  /// Called after every completed iteration.
  std::function<void(const TraceRecord&)> progress;
};

/// Evolves icosphere(initial_radius, subdiv) down the shape gradient.
FlowResult run(const FlowConfig& config, const FieldSource& src, const FlowHooks& hooks = {});
/// Same, from a caller-supplied initial surface.
FlowResult run(const FlowConfig& config, const FieldSource& src, TriMesh initial, const FlowHooks& hooks = {});

struct DistanceStats {
  double mean_dist = 0.0;
  double max_dist = 0.0;
};

/// First-order distance |phi(v)| / max(|grad phi(v)|, grad_eps) averaged and maximized over vertices.
DistanceStats distance_stats(const TriMesh& mesh, const FieldSource& src, double grad_eps = 1e-9);

/// Trace as CSV: iter,E_total,E_alpha,E_beta,rel_change,mean_abs_phi,max_abs_g,mean_H,runtime_ms
void write_trace_csv(const FlowTrace& trace, const std::filesystem::path& path);
std::string trace_csv_header();

}  // namespace shapeflow
