#include "shapeflow/kernels.hpp"

#include <algorithm>

namespace shapeflow::kernels::detail {

void trilinear_blend_scalar(const double* values, std::int64_t sy, std::int64_t sz,
                            const StencilView& s, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* v = values + s.base[i];
    const double fx = s.fx[i], fy = s.fy[i], fz = s.fz[i];
    const double ux = 1.0 - fx, uy = 1.0 - fy, uz = 1.0 - fz;
    const double c00 = v[0] * ux + v[1] * fx;
    const double c10 = v[sy] * ux + v[sy + 1] * fx;
    const double c01 = v[sz] * ux + v[sz + 1] * fx;
    const double c11 = v[sy + sz] * ux + v[sy + sz + 1] * fx;
    const double c0 = c00 * uy + c10 * fy;
    const double c1 = c01 * uy + c11 * fy;
    out[i] = c0 * uz + c1 * fz;
  }
}

void gradient_density_scalar(const VertexFieldView& f, const double* h, double alpha, double beta,
                             double* g, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double nx = f.nx[i], ny = f.ny[i], nz = f.nz[i];
    const double gx = f.gx[i], gy = f.gy[i], gz = f.gz[i];
    const double phi = f.phi[i];
    const double dn = gx * nx + gy * ny + gz * nz;
    const double hnx = f.hxx[i] * nx + f.hxy[i] * ny + f.hxz[i] * nz;
    const double hny = f.hxy[i] * nx + f.hyy[i] * ny + f.hyz[i] * nz;
    const double hnz = f.hxz[i] * nx + f.hyz[i] * ny + f.hzz[i] * nz;
    const double nhn = hnx * nx + hny * ny + hnz * nz;
    // (D2phi grad).n == grad.(D2phi n) for symmetric D2phi
    const double ghn = gx * hnx + gy * hny + gz * hnz;
    const double g2 = gx * gx + gy * gy + gz * gz;
    const double tang = g2 - dn * dn;
    const double a = (2.0 * phi) * dn + h[i] * (phi * phi);
    const double b = (2.0 * ghn + h[i] * tang) - (2.0 * dn) * nhn;
    g[i] = alpha * a + beta * b;
  }
}

void energy_integrand_scalar(const VertexFieldView& f, double* ea, double* eb, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double gx = f.gx[i], gy = f.gy[i], gz = f.gz[i];
    const double dn = gx * f.nx[i] + gy * f.ny[i] + gz * f.nz[i];
    const double g2 = gx * gx + gy * gy + gz * gz;
    ea[i] = f.phi[i] * f.phi[i];
    eb[i] = std::max(0.0, g2 - dn * dn);
  }
}

}  // namespace shapeflow::kernels::detail
