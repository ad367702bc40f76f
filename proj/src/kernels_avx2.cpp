#include "shapeflow/kernels.hpp"

#include <immintrin.h>

namespace shapeflow::kernels::detail {

namespace {

inline __m256d load(std::span<const double> s, std::size_t i) { return _mm256_loadu_pd(s.data() + i); }

}  // namespace

void trilinear_blend_avx2(const double* values, std::int64_t sy, std::int64_t sz,
                          const StencilView& s, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256i oy = _mm256_set1_epi64x(sy);
  const __m256i oz = _mm256_set1_epi64x(sz);
  const __m256i o1 = _mm256_set1_epi64x(1);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i b000 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(s.base.data() + i));
    const __m256i b010 = _mm256_add_epi64(b000, oy);
    const __m256i b001 = _mm256_add_epi64(b000, oz);
    const __m256i b011 = _mm256_add_epi64(b010, oz);
    const __m256d v000 = _mm256_i64gather_pd(values, b000, 8);
    const __m256d v100 = _mm256_i64gather_pd(values, _mm256_add_epi64(b000, o1), 8);
    const __m256d v010 = _mm256_i64gather_pd(values, b010, 8);
    const __m256d v110 = _mm256_i64gather_pd(values, _mm256_add_epi64(b010, o1), 8);
    const __m256d v001 = _mm256_i64gather_pd(values, b001, 8);
    const __m256d v101 = _mm256_i64gather_pd(values, _mm256_add_epi64(b001, o1), 8);
    const __m256d v011 = _mm256_i64gather_pd(values, b011, 8);
    const __m256d v111 = _mm256_i64gather_pd(values, _mm256_add_epi64(b011, o1), 8);

    const __m256d fx = load(s.fx, i), fy = load(s.fy, i), fz = load(s.fz, i);
    const __m256d ux = _mm256_sub_pd(one, fx);
    const __m256d uy = _mm256_sub_pd(one, fy);
    const __m256d uz = _mm256_sub_pd(one, fz);

    const __m256d c00 = _mm256_add_pd(_mm256_mul_pd(v000, ux), _mm256_mul_pd(v100, fx));
    const __m256d c10 = _mm256_add_pd(_mm256_mul_pd(v010, ux), _mm256_mul_pd(v110, fx));
    const __m256d c01 = _mm256_add_pd(_mm256_mul_pd(v001, ux), _mm256_mul_pd(v101, fx));
    const __m256d c11 = _mm256_add_pd(_mm256_mul_pd(v011, ux), _mm256_mul_pd(v111, fx));
    const __m256d c0 = _mm256_add_pd(_mm256_mul_pd(c00, uy), _mm256_mul_pd(c10, fy));
    const __m256d c1 = _mm256_add_pd(_mm256_mul_pd(c01, uy), _mm256_mul_pd(c11, fy));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(c0, uz), _mm256_mul_pd(c1, fz)));
  }
  if (i < n) {
    const StencilView tail{s.base.subspan(i), s.fx.subspan(i), s.fy.subspan(i), s.fz.subspan(i)};
    trilinear_blend_scalar(values, sy, sz, tail, out + i, n - i);
  }
}

namespace {

// (a.b) summed left to right, matching the scalar path.
inline __m256d dot3(__m256d ax, __m256d ay, __m256d az, __m256d bx, __m256d by, __m256d bz) {
  return _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(ax, bx), _mm256_mul_pd(ay, by)), _mm256_mul_pd(az, bz));
}

VertexFieldView advance(const VertexFieldView& f, std::size_t i) {
  return {f.phi.subspan(i), f.gx.subspan(i),  f.gy.subspan(i),  f.gz.subspan(i),  f.hxx.subspan(i),
          f.hxy.subspan(i), f.hxz.subspan(i), f.hyy.subspan(i), f.hyz.subspan(i), f.hzz.subspan(i),
          f.nx.subspan(i),  f.ny.subspan(i),  f.nz.subspan(i)};
}

}  // namespace

void gradient_density_avx2(const VertexFieldView& f, const double* h, double alpha, double beta,
                           double* g, std::size_t n) {
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d nx = load(f.nx, i), ny = load(f.ny, i), nz = load(f.nz, i);
    const __m256d gx = load(f.gx, i), gy = load(f.gy, i), gz = load(f.gz, i);
    const __m256d phi = load(f.phi, i);
    const __m256d hxx = load(f.hxx, i), hxy = load(f.hxy, i), hxz = load(f.hxz, i);
    const __m256d hyy = load(f.hyy, i), hyz = load(f.hyz, i), hzz = load(f.hzz, i);
    const __m256d hv = _mm256_loadu_pd(h + i);

    const __m256d dn = dot3(gx, gy, gz, nx, ny, nz);
    const __m256d hnx = dot3(hxx, hxy, hxz, nx, ny, nz);
    const __m256d hny = dot3(hxy, hyy, hyz, nx, ny, nz);
    const __m256d hnz = dot3(hxz, hyz, hzz, nx, ny, nz);
    const __m256d nhn = dot3(hnx, hny, hnz, nx, ny, nz);
    const __m256d ghn = dot3(gx, gy, gz, hnx, hny, hnz);
    const __m256d g2 = dot3(gx, gy, gz, gx, gy, gz);
    const __m256d tang = _mm256_sub_pd(g2, _mm256_mul_pd(dn, dn));

    const __m256d a = _mm256_add_pd(_mm256_mul_pd(_mm256_mul_pd(two, phi), dn),
                                    _mm256_mul_pd(hv, _mm256_mul_pd(phi, phi)));
    const __m256d b = _mm256_sub_pd(_mm256_add_pd(_mm256_mul_pd(two, ghn), _mm256_mul_pd(hv, tang)),
                                    _mm256_mul_pd(_mm256_mul_pd(two, dn), nhn));
    _mm256_storeu_pd(g + i, _mm256_add_pd(_mm256_mul_pd(va, a), _mm256_mul_pd(vb, b)));
  }
  if (i < n) gradient_density_scalar(advance(f, i), h + i, alpha, beta, g + i, n - i);
}

void energy_integrand_avx2(const VertexFieldView& f, double* ea, double* eb, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gx = load(f.gx, i), gy = load(f.gy, i), gz = load(f.gz, i);
    const __m256d dn = dot3(gx, gy, gz, load(f.nx, i), load(f.ny, i), load(f.nz, i));
    const __m256d g2 = dot3(gx, gy, gz, gx, gy, gz);
    const __m256d phi = load(f.phi, i);
    _mm256_storeu_pd(ea + i, _mm256_mul_pd(phi, phi));
    _mm256_storeu_pd(eb + i, _mm256_max_pd(_mm256_sub_pd(g2, _mm256_mul_pd(dn, dn)), zero));
  }
  if (i < n) energy_integrand_scalar(advance(f, i), ea + i, eb + i, n - i);
}

}  // namespace shapeflow::kernels::detail
