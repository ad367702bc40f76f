#include "shapeflow/kernels.hpp"

#include "shapeflow/errors.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace shapeflow::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(SHAPEFLOW_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* env = std::getenv("SHAPEFLOW_SIMD")) {
    if (auto isa = parse_isa(env); isa && isa_supported(*isa)) return *isa;
  }
  return detected_isa();
}

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{initial_isa()};
  return slot;
}

void require_same_size(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw InvalidArgument(std::string("kernel input '") + what + "' has size " + std::to_string(got) +
                          ", expected " + std::to_string(expected));
  }
}

void check_view(const VertexFieldView& f) {
  const std::size_t n = f.size();
  require_same_size(n, f.gx.size(), "gx");
  require_same_size(n, f.gy.size(), "gy");
  require_same_size(n, f.gz.size(), "gz");
  require_same_size(n, f.hxx.size(), "hxx");
  require_same_size(n, f.hxy.size(), "hxy");
  require_same_size(n, f.hxz.size(), "hxz");
  require_same_size(n, f.hyy.size(), "hyy");
  require_same_size(n, f.hyz.size(), "hyz");
  require_same_size(n, f.hzz.size(), "hzz");
  require_same_size(n, f.nx.size(), "nx");
  require_same_size(n, f.ny.size(), "ny");
  require_same_size(n, f.nz.size(), "nz");
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::Scalar;
  if (name == "avx2") return Isa::Avx2;
  return std::nullopt;
}

bool isa_supported(Isa isa) { return isa == Isa::Scalar || (isa == Isa::Avx2 && cpu_has_avx2()); }

Isa detected_isa() { return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() { return active_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw InvalidArgument("SIMD variant '" + std::string(to_string(isa)) + "' is not supported on this CPU");
  }
  active_slot().store(isa, std::memory_order_relaxed);
}

void trilinear_blend(std::span<const double> values, std::int64_t sy, std::int64_t sz,
                     const StencilView& stencil, std::span<double> out) {
  const std::size_t n = stencil.base.size();
  require_same_size(n, stencil.fx.size(), "fx");
  require_same_size(n, stencil.fy.size(), "fy");
  require_same_size(n, stencil.fz.size(), "fz");
  require_same_size(n, out.size(), "out");
#if defined(SHAPEFLOW_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return detail::trilinear_blend_avx2(values.data(), sy, sz, stencil, out.data(), n);
#endif
  detail::trilinear_blend_scalar(values.data(), sy, sz, stencil, out.data(), n);
}

void gradient_density(const VertexFieldView& f, std::span<const double> mean_curvature, double alpha,
                      double beta, std::span<double> g) {
  check_view(f);
  require_same_size(f.size(), mean_curvature.size(), "mean_curvature");
  require_same_size(f.size(), g.size(), "g");
#if defined(SHAPEFLOW_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) {
    return detail::gradient_density_avx2(f, mean_curvature.data(), alpha, beta, g.data(), f.size());
  }
#endif
  detail::gradient_density_scalar(f, mean_curvature.data(), alpha, beta, g.data(), f.size());
}

void energy_integrand(const VertexFieldView& f, std::span<double> e_alpha, std::span<double> e_beta) {
  check_view(f);
  require_same_size(f.size(), e_alpha.size(), "e_alpha");
  require_same_size(f.size(), e_beta.size(), "e_beta");
#if defined(SHAPEFLOW_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return detail::energy_integrand_avx2(f, e_alpha.data(), e_beta.data(), f.size());
#endif
  detail::energy_integrand_scalar(f, e_alpha.data(), e_beta.data(), f.size());
}

}  // namespace shapeflow::kernels
