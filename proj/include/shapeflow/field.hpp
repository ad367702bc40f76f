#pragma once

#include "shapeflow/grid.hpp"
#include "shapeflow/implicit.hpp"

#include <array>
#include <memory>
#include <span>
#include <vector>

namespace shapeflow {

/// Structure-of-arrays batch of field samples, one slot per query point.
struct FieldBatch {
  std::vector<double> phi;
  std::vector<double> gx, gy, gz;
  std::vector<double> hxx, hxy, hxz, hyy, hyz, hzz;

  void resize(std::size_t n);
  std::size_t size() const { return phi.size(); }
  FieldSample at(std::size_t i) const;
  void set(std::size_t i, const FieldSample& s);
};

/// Anything that answers phi, grad phi and the Hessian at a point.
/// Implementations are immutable after construction and safe for concurrent reads.
class FieldSource {
 public:
  virtual ~FieldSource() = default;

  virtual FieldSample sample(const Vec3& p) const = 0;
  virtual double value(const Vec3& p) const { return sample(p).phi; }
  /// True when p can be sampled.
  virtual bool admissible(const Vec3& p) const = 0;

  /// Samples every point. Throws OutOfDomain naming the first offending index.
  virtual void sample_batch(std::span<const Vec3> points, FieldBatch& out) const;
};

/// Exact derivatives from an analytic Implicit. Admissible everywhere finite.
class AnalyticField final : public FieldSource {
 public:
  explicit AnalyticField(Implicit field) : field_(std::move(field)) {}
  explicit AnalyticField(Phantom phantom) : field_(phantom_implicit(phantom)) {}

  FieldSample sample(const Vec3& p) const override;
  double value(const Vec3& p) const override { return field_(p); }
  bool admissible(const Vec3& p) const override { return p.allFinite(); }

 private:
  Implicit field_;
};

/// Grid-backed field: trilinear phi; gradient and Hessian from node-wise
/// second-order differences (one-sided at boundary nodes), each component
/// trilinearly interpolated. Points closer than the sampling margin to a face
/// are rejected with OutOfDomain.
class GridField final : public FieldSource {
 public:
  explicit GridField(ScalarGrid grid, double margin_cells = kSamplingMarginCells);

  FieldSample sample(const Vec3& p) const override;
  double value(const Vec3& p) const override;
  bool admissible(const Vec3& p) const override;
  void sample_batch(std::span<const Vec3> points, FieldBatch& out) const override;

  const ScalarGrid& grid() const { return channels_[0]; }

  /// Channel order: phi, gx, gy, gz, hxx, hxy, hxz, hyy, hyz, hzz.
  static constexpr int kChannels = 10;
  const ScalarGrid& channel(int c) const { return channels_[c]; }

 private:
  std::array<ScalarGrid, kChannels> channels_;
  double margin_cells_;
};

/// Node-wise derivative grids of `grid` along `axis`: first derivative (order 1) or second (order 2).
ScalarGrid difference(const ScalarGrid& grid, int axis, int order);

/// Newton-type projection p <- p - phi(p) grad(p) / |grad(p)|^2 until |phi| <= tol.
/// Returns the projected point; `iterations` receives the step count when non-null.
/// Throws DegenerateGradient when |grad| <= grad_eps and NoConvergence after max_iter steps.
Vec3 project_to_zero(const FieldSource& src, const Vec3& p, double tol, int max_iter,
                     int* iterations = nullptr, double grad_eps = 1e-9);

}  // namespace shapeflow
