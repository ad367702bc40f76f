#include "shapeflow/noise.hpp"

#include "shapeflow/errors.hpp"

#include <cmath>
#include <random>

namespace shapeflow {

std::string_view to_string(NoiseModel model) {
  return model == NoiseModel::Gaussian ? "gaussian" : "uniform";
}

std::optional<NoiseModel> parse_noise_model(std::string_view name) {
  if (name == "gaussian") return NoiseModel::Gaussian;
  if (name == "uniform") return NoiseModel::Uniform;
  return std::nullopt;
}

namespace {

double mean_square(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

}  // namespace

ScalarGrid add_noise(const ScalarGrid& grid, const NoiseSpec& spec) {
  if (!std::isfinite(spec.snr_db)) throw InvalidArgument("snr_db must be finite");
  const double p_signal = mean_square(grid.values());
  const double sigma = std::sqrt(p_signal * std::pow(10.0, -spec.snr_db / 10.0));

  std::vector<double> out(grid.values().begin(), grid.values().end());
  if (!(sigma > 0.0)) return ScalarGrid(grid.spec(), std::move(out));
  std::mt19937_64 rng(spec.seed);
  if (spec.model == NoiseModel::Gaussian) {
    std::normal_distribution<double> dist(0.0, sigma);
    for (double& v : out) v += dist(rng);
  } else {
    const double a = sigma * std::sqrt(3.0);
    std::uniform_real_distribution<double> dist(-a, a);
    for (double& v : out) v += dist(rng);
  }
  return ScalarGrid(grid.spec(), std::move(out));
}

double empirical_snr_db(const ScalarGrid& clean, const ScalarGrid& noisy) {
  if (!(clean.spec() == noisy.spec())) throw InvalidArgument("SNR needs grids on the same lattice");
  double ps = 0.0, pn = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double s = clean.values()[i];
    const double n = noisy.values()[i] - s;
    ps += s * s;
    pn += n * n;
  }
  return 10.0 * std::log10(ps / pn);
}

}  // namespace shapeflow
