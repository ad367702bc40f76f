#include "shapeflow/field.hpp"

#include "shapeflow/errors.hpp"
#include "shapeflow/kernels.hpp"
#include "shapeflow/parallel.hpp"

#include "grid_internal.hpp"

#include <cmath>
#include <sstream>

namespace shapeflow {

void FieldBatch::resize(std::size_t n) {
  for (auto* v : {&phi, &gx, &gy, &gz, &hxx, &hxy, &hxz, &hyy, &hyz, &hzz}) v->assign(n, 0.0);
}

FieldSample FieldBatch::at(std::size_t i) const {
  FieldSample s;
  s.phi = phi[i];
  s.grad = Vec3(gx[i], gy[i], gz[i]);
  s.hess << hxx[i], hxy[i], hxz[i], hxy[i], hyy[i], hyz[i], hxz[i], hyz[i], hzz[i];
  return s;
}

void FieldBatch::set(std::size_t i, const FieldSample& s) {
  phi[i] = s.phi;
  gx[i] = s.grad.x();
  gy[i] = s.grad.y();
  gz[i] = s.grad.z();
  hxx[i] = s.hess(0, 0);
  hxy[i] = s.hess(0, 1);
  hxz[i] = s.hess(0, 2);
  hyy[i] = s.hess(1, 1);
  hyz[i] = s.hess(1, 2);
  hzz[i] = s.hess(2, 2);
}

namespace {

[[noreturn]] void throw_out_of_domain(const Vec3& p, std::size_t index, bool batch) {
  std::ostringstream os;
  os << "point (" << p.x() << ", " << p.y() << ", " << p.z() << ")";
  if (batch) os << " [index " << index << "]";
  os << " is outside the sampling domain";
  throw OutOfDomain(os.str());
}

Mat3 symmetrized(const Mat3& h) { return 0.5 * (h + h.transpose()); }

}  // namespace

void FieldSource::sample_batch(std::span<const Vec3> points, FieldBatch& out) const {
  out.resize(points.size());
  parallel_for(points.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (!admissible(points[i])) throw_out_of_domain(points[i], i, true);
      out.set(i, sample(points[i]));
    }
  });
}

FieldSample AnalyticField::sample(const Vec3& p) const {
  if (!admissible(p)) throw_out_of_domain(p, 0, false);
  FieldSample s = field_.sample(p);
  s.hess = symmetrized(s.hess);
  return s;
}

// ---------------------------------------------------------------------------

ScalarGrid difference(const ScalarGrid& grid, int axis, int order) {
  if (axis < 0 || axis > 2 || order < 1 || order > 2) throw InvalidArgument("difference: bad axis or order");
  const GridSpec& spec = grid.spec();
  const int n = spec.dims[axis];
  const double h = spec.spacing[axis];
  const std::int64_t stride = axis == 0 ? 1 : axis == 1 ? spec.dims[0] : std::int64_t{spec.dims[0]} * spec.dims[1];
  std::vector<double> out(grid.size());
  const double* f = grid.values().data();

  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const std::int64_t q = static_cast<std::int64_t>(idx);
    const int i = static_cast<int>((q / stride) % n);
    auto v = [&](int offset) { return f[q + offset * stride]; };
    double d = 0.0;
    if (order == 1) {
      if (i > 0 && i < n - 1) {
        d = (v(1) - v(-1)) / (2.0 * h);
      } else if (n == 2) {
        d = i == 0 ? (v(1) - v(0)) / h : (v(0) - v(-1)) / h;
      } else if (i == 0) {
        d = (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h);
      } else {
        d = (3.0 * v(0) - 4.0 * v(-1) + v(-2)) / (2.0 * h);
      }
    } else {
      if (i > 0 && i < n - 1) {
        d = (v(1) - 2.0 * v(0) + v(-1)) / (h * h);
      } else if (n == 2) {
        d = 0.0;
      } else if (n == 3) {
        d = i == 0 ? (v(0) - 2.0 * v(1) + v(2)) / (h * h) : (v(0) - 2.0 * v(-1) + v(-2)) / (h * h);
      } else if (i == 0) {
        d = (2.0 * v(0) - 5.0 * v(1) + 4.0 * v(2) - v(3)) / (h * h);
      } else {
        d = (2.0 * v(0) - 5.0 * v(-1) + 4.0 * v(-2) - v(-3)) / (h * h);
      }
    }
    out[idx] = d;
  }
  return ScalarGrid(spec, std::move(out));
}

GridField::GridField(ScalarGrid grid, double margin_cells) : margin_cells_(margin_cells) {
  const ScalarGrid gx = difference(grid, 0, 1);
  const ScalarGrid gy = difference(grid, 1, 1);
  const ScalarGrid gz = difference(grid, 2, 1);
  channels_[4] = difference(grid, 0, 2);
  channels_[5] = difference(gx, 1, 1);
  channels_[6] = difference(gx, 2, 1);
  channels_[7] = difference(grid, 1, 2);
  channels_[8] = difference(gy, 2, 1);
  channels_[9] = difference(grid, 2, 2);
  channels_[1] = gx;
  channels_[2] = gy;
  channels_[3] = gz;
  channels_[0] = std::move(grid);
}

bool GridField::admissible(const Vec3& p) const { return inside_margin(grid().spec(), p, margin_cells_); }

double GridField::value(const Vec3& p) const { return sample_trilinear(grid(), p, margin_cells_); }

FieldSample GridField::sample(const Vec3& p) const {
  if (!admissible(p)) throw_out_of_domain(p, 0, false);
  const GridSpec& spec = grid().spec();
  std::int64_t base = 0;
  double fx = 0, fy = 0, fz = 0;
  detail::locate(spec, p, base, fx, fy, fz);
  const kernels::StencilView s{{&base, 1}, {&fx, 1}, {&fy, 1}, {&fz, 1}};
  const std::int64_t sy = spec.dims[0];
  const std::int64_t sz = sy * spec.dims[1];
  std::array<double, kChannels> c{};
  for (int k = 0; k < kChannels; ++k) {
    kernels::detail::trilinear_blend_scalar(channels_[k].values().data(), sy, sz, s, &c[k], 1);
  }
  FieldSample out;
  out.phi = c[0];
  out.grad = Vec3(c[1], c[2], c[3]);
  out.hess << c[4], c[5], c[6], c[5], c[7], c[8], c[6], c[8], c[9];
  return out;
}

void GridField::sample_batch(std::span<const Vec3> points, FieldBatch& out) const {
  const std::size_t n = points.size();
  const GridSpec& spec = grid().spec();
  std::vector<std::int64_t> base(n);
  std::vector<double> fx(n), fy(n), fz(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!admissible(points[i])) throw_out_of_domain(points[i], i, true);
    detail::locate(spec, points[i], base[i], fx[i], fy[i], fz[i]);
  }
  out.resize(n);
  const kernels::StencilView s{base, fx, fy, fz};
  const std::int64_t sy = spec.dims[0];
  const std::int64_t sz = sy * spec.dims[1];
  std::vector<double>* dest[kChannels] = {&out.phi, &out.gx,  &out.gy,  &out.gz,  &out.hxx,
                                          &out.hxy, &out.hxz, &out.hyy, &out.hyz, &out.hzz};
  for (int k = 0; k < kChannels; ++k) kernels::trilinear_blend(channels_[k].values(), sy, sz, s, *dest[k]);
}

// ---------------------------------------------------------------------------

Vec3 project_to_zero(const FieldSource& src, const Vec3& p, double tol, int max_iter, int* iterations,
                     double grad_eps) {
  Vec3 x = p;
  for (int it = 0;; ++it) {
    const FieldSample s = src.sample(x);
    if (std::abs(s.phi) <= tol) {
      if (iterations) *iterations = it;
      return x;
    }
    if (it == max_iter) {
      throw NoConvergence("projection did not reach |phi| <= tol within " + std::to_string(max_iter) + " iterations");
    }
    const double g2 = s.grad.squaredNorm();
    if (std::sqrt(g2) <= grad_eps) throw DegenerateGradient("vanishing gradient during projection");
    x -= (s.phi / g2) * s.grad;
  }
}

}  // namespace shapeflow
