#include "shapeflow/flow.hpp"

#include "shapeflow/errors.hpp"
#include "shapeflow/kernels.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace shapeflow {

void FlowConfig::validate() const {
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(alpha) || !finite_nonneg(beta)) throw InvalidArgument("alpha and beta must be finite and >= 0");
  if (!(alpha + beta > 0.0)) throw InvalidArgument("alpha + beta must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (!(rel_energy_tol > 0.0)) throw InvalidArgument("rel_energy_tol must be positive");
  if (!(initial_radius > 0.0) || !std::isfinite(initial_radius)) throw InvalidArgument("initial_radius must be positive");
  if (subdiv < 0 || subdiv > 7) throw InvalidArgument("subdiv must be in [0, 7]");
  if (export_every < 0) throw InvalidArgument("export_every must be >= 0");
  if (energy_threshold && !(*energy_threshold > 0.0)) throw InvalidArgument("energy_threshold must be positive");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::BelowThreshold: return "below_threshold";
    case Termination::MaxIters: return "max_iters";
    case Termination::Aborted: return "aborted";
  }
  return "unknown";
}

namespace {

struct NormalsSoA {
  std::vector<double> x, y, z;
  explicit NormalsSoA(std::span<const Vec3> n) : x(n.size()), y(n.size()), z(n.size()) {
    for (std::size_t i = 0; i < n.size(); ++i) {
      x[i] = n[i].x();
      y[i] = n[i].y();
      z[i] = n[i].z();
    }
  }
};

kernels::VertexFieldView view_of(const FieldBatch& b, const NormalsSoA& n) {
  return {b.phi, b.gx, b.gy, b.gz, b.hxx, b.hxy, b.hxz, b.hyy, b.hyz, b.hzz, n.x, n.y, n.z};
}

/// Mesh with everything the flow needs to know about it.
struct Snapshot {
  TriMesh mesh;
  std::vector<Vec3> normals;
  FieldBatch field;
  EnergyTerms energy;
};

EnergyTerms integrate(const TriMesh& mesh, const FieldBatch& field, const NormalsSoA& normals, double alpha,
                      double beta) {
  const std::size_t n = mesh.vertex_count();
  std::vector<double> ea(n), eb(n);
  kernels::energy_integrand(view_of(field, normals), ea, eb);
  const std::vector<double> area = lumped_vertex_area(mesh);
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sa += area[i] * ea[i];
    sb += area[i] * eb[i];
  }
  EnergyTerms e;
  e.alpha_term = alpha * sa;
  e.beta_term = beta * sb;
  e.total = e.alpha_term + e.beta_term;
  return e;
}

Snapshot make_snapshot(TriMesh mesh, const FieldSource& src, double alpha, double beta) {
  Snapshot s;
  s.normals = vertex_normals(mesh);
  src.sample_batch(mesh.vertices(), s.field);
  s.energy = integrate(mesh, s.field, NormalsSoA(s.normals), alpha, beta);
  s.mesh = std::move(mesh);
  return s;
}

StepResult step_from(const Snapshot& snap, const FlowConfig& config) {
  const TriMesh& mesh = snap.mesh;
  const std::size_t n = mesh.vertex_count();
  StepResult out;
  out.curvatures = curvature_field(mesh, snap.normals);

  std::vector<double> H(n);
  double sum_h = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    H[i] = out.curvatures[i].H;
    sum_h += H[i];
  }
  out.mean_H = n ? sum_h / static_cast<double>(n) : 0.0;

  out.gradient.normals = snap.normals;
  out.gradient.g.assign(n, 0.0);
  kernels::gradient_density(view_of(snap.field, NormalsSoA(snap.normals)), H, config.alpha, config.beta,
                            out.gradient.g);

  std::vector<Vec3> moved(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = out.gradient.g[i];
    if (!std::isfinite(g)) {
      throw NonFiniteUpdate("non-finite gradient density at vertex " + std::to_string(i));
    }
    out.max_abs_g = std::max(out.max_abs_g, std::abs(g));
    moved[i] = mesh.vertex(i) - (config.dt * g) * snap.normals[i];
  }
  out.mesh = mesh.with_vertices(std::move(moved));
  return out;
}

double mean_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

EnergyTerms energy(const TriMesh& mesh, const FieldSource& src, double alpha, double beta) {
  return make_snapshot(mesh, src, alpha, beta).energy;
}

VertexGradient shape_gradient(const TriMesh& mesh, std::span<const Vec3> normals,
                              std::span<const CurvatureSample> curvatures, const FieldSource& src, double alpha,
                              double beta) {
  const std::size_t n = mesh.vertex_count();
  if (normals.size() != n || curvatures.size() != n) {
    throw InvalidArgument("shape_gradient: normals and curvatures must match the vertex count");
  }
  FieldBatch field;
  src.sample_batch(mesh.vertices(), field);
  std::vector<double> H(n);
  for (std::size_t i = 0; i < n; ++i) H[i] = curvatures[i].H;
  VertexGradient out;
  out.normals.assign(normals.begin(), normals.end());
  out.g.assign(n, 0.0);
  kernels::gradient_density(view_of(field, NormalsSoA(normals)), H, alpha, beta, out.g);
  return out;
}

StepResult evolve_step(const TriMesh& mesh, const FlowConfig& config, const FieldSource& src) {
  return step_from(make_snapshot(mesh, src, config.alpha, config.beta), config);
}

FlowResult run(const FlowConfig& config, const FieldSource& src, const FlowHooks& hooks) {
  config.validate();
  return run(config, src, icosphere(config.initial_radius, config.subdiv), hooks);
}

FlowResult run(const FlowConfig& config, const FieldSource& src, TriMesh initial, const FlowHooks& hooks) {
  config.validate();
  FlowResult result;
  Snapshot snap;
  try {
    snap = make_snapshot(std::move(initial), src, config.alpha, config.beta);
  } catch (const Error& e) {
    result.termination = Termination::Aborted;
    result.diagnostic = std::string("initial surface: ") + e.what();
    return result;
  }
  result.initial_energy = snap.energy;
  if (hooks.snapshot && config.export_every > 0) hooks.snapshot(0, snap.mesh);

  using clock = std::chrono::steady_clock;
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    const auto t0 = clock::now();
    StepResult step;
    Snapshot next;
    try {
      step = step_from(snap, config);
      next = make_snapshot(std::move(step.mesh), src, config.alpha, config.beta);
    } catch (const Error& e) {
      result.termination = Termination::Aborted;
      result.diagnostic = "iteration " + std::to_string(iter) + ": " + e.what();
      break;
    }
    TraceRecord rec;
    rec.iter = iter;
    rec.E_total = next.energy.total;
    rec.E_alpha = next.energy.alpha_term;
    rec.E_beta = next.energy.beta_term;
    rec.rel_change = std::abs(next.energy.total - snap.energy.total) / std::max(snap.energy.total, config.rel_eps);
    rec.mean_abs_phi = mean_abs(next.field.phi);
    rec.max_abs_g = step.max_abs_g;
    rec.mean_H = step.mean_H;
    rec.signed_volume = next.mesh.signed_volume();
    rec.runtime_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    result.trace.push_back(rec);
    snap = std::move(next);

    if (hooks.progress) hooks.progress(rec);
    if (hooks.snapshot && config.export_every > 0 && iter % config.export_every == 0) hooks.snapshot(iter, snap.mesh);

    if (!(rec.signed_volume > 0.0)) {
      result.termination = Termination::Aborted;
      result.diagnostic = "iteration " + std::to_string(iter) + ": surface turned inside out (signed volume " +
                          std::to_string(rec.signed_volume) + ")";
      break;
    }
    if (rec.rel_change <= config.rel_energy_tol) {
      result.termination = Termination::Converged;
      break;
    }
    if (config.energy_threshold && rec.E_total < *config.energy_threshold) {
      result.termination = Termination::BelowThreshold;
      break;
    }
  }
  result.mesh = std::move(snap.mesh);
  return result;
}

DistanceStats distance_stats(const TriMesh& mesh, const FieldSource& src, double grad_eps) {
  FieldBatch field;
  src.sample_batch(mesh.vertices(), field);
  DistanceStats s;
  const std::size_t n = field.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double g = std::sqrt(field.gx[i] * field.gx[i] + field.gy[i] * field.gy[i] + field.gz[i] * field.gz[i]);
    const double d = std::abs(field.phi[i]) / std::max(g, grad_eps);
    s.mean_dist += d;
    s.max_dist = std::max(s.max_dist, d);
  }
  if (n) s.mean_dist /= static_cast<double>(n);
  return s;
}

std::string trace_csv_header() {
  return "iter,E_total,E_alpha,E_beta,rel_change,mean_abs_phi,max_abs_g,mean_H,runtime_ms";
}

void write_trace_csv(const FlowTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << trace_csv_header() << '\n';
  char buf[512];
  for (const TraceRecord& r : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e\n", r.iter, r.E_total, r.E_alpha,
                  r.E_beta, r.rel_change, r.mean_abs_phi, r.max_abs_g, r.mean_H, r.runtime_ms);
    out << buf;
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace shapeflow
