#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2 variant picked
// at runtime. Every variant performs the same IEEE operations in the same
// order (the project builds with -ffp-contract=off), so results are
// bit-identical across variants.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace shapeflow::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

/// Best variant the running CPU supports.
Isa detected_isa();
/// Variant currently used by the dispatchers. Defaults to detected_isa(),
/// or to the value of SHAPEFLOW_SIMD ("scalar" / "avx2") when set.
Isa active_isa();
/// Forces a variant; throws InvalidArgument if the CPU cannot run it.
void set_active_isa(Isa isa);
bool isa_supported(Isa isa);

/// Per-point trilinear stencil: flat index of the lower corner node and the
/// fractional offsets inside the cell.
struct StencilView {
  std::span<const std::int64_t> base;
  std::span<const double> fx, fy, fz;
};

/// out[i] = trilinear blend of `values` around stencil i. Node strides are
/// 1, sy, sz (x-fastest layout).
void trilinear_blend(std::span<const double> values, std::int64_t sy, std::int64_t sz,
                     const StencilView& stencil, std::span<double> out);

/// SoA view of field samples and unit normals at mesh vertices.
struct VertexFieldView {
  std::span<const double> phi;
  std::span<const double> gx, gy, gz;
  std::span<const double> hxx, hxy, hxz, hyy, hyz, hzz;
  std::span<const double> nx, ny, nz;
  std::size_t size() const { return phi.size(); }
};

/// Normal-velocity density of the reconstruction energy:
///   g = alpha * (2 phi dn + H phi^2)
///     + beta  * (2 (D2phi grad).n + H (|grad|^2 - dn^2) - 2 dn (D2phi n).n),  dn = grad.n
void gradient_density(const VertexFieldView& f, std::span<const double> mean_curvature,
                      double alpha, double beta, std::span<double> g);

/// e_alpha = phi^2 and e_beta = max(0, |grad|^2 - (grad.n)^2) per vertex.
void energy_integrand(const VertexFieldView& f, std::span<double> e_alpha, std::span<double> e_beta);

namespace detail {
// Variant entry points; the dispatchers above validate sizes and route here.
void trilinear_blend_scalar(const double* values, std::int64_t sy, std::int64_t sz,
                            const StencilView& s, double* out, std::size_t n);
void gradient_density_scalar(const VertexFieldView& f, const double* h, double alpha, double beta,
                             double* g, std::size_t n);
void energy_integrand_scalar(const VertexFieldView& f, double* ea, double* eb, std::size_t n);

#if defined(SHAPEFLOW_HAVE_AVX2)
void trilinear_blend_avx2(const double* values, std::int64_t sy, std::int64_t sz,
                          const StencilView& s, double* out, std::size_t n);
void gradient_density_avx2(const VertexFieldView& f, const double* h, double alpha, double beta,
                           double* g, std::size_t n);
void energy_integrand_avx2(const VertexFieldView& f, double* ea, double* eb, std::size_t n);
#endif
}  // namespace detail

}  // namespace shapeflow::kernels
