#pragma once

#include "shapeflow/grid.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace shapeflow {

enum class NoiseModel { Gaussian, Uniform };

std::string_view to_string(NoiseModel model);
std::optional<NoiseModel> parse_noise_model(std::string_view name);

struct NoiseSpec {
  NoiseModel model = NoiseModel::Gaussian;
  double snr_db = 44.5;
  std::uint64_t seed = 0;
};

/// Returns grid + noise calibrated so that mean(values^2) / noise power = 10^(snr_db/10).
/// Gaussian noise has sigma = sqrt(P_noise); uniform noise is U(-a, a) with a = sigma*sqrt(3).
/// Samples come from std::mt19937_64 seeded with spec.seed, one draw per node in storage order.
/// Throws InvalidArgument on non-finite snr_db.
ScalarGrid add_noise(const ScalarGrid& grid, const NoiseSpec& spec);

/// 10*log10(mean(clean^2) / mean((noisy - clean)^2)) over all nodes.
double empirical_snr_db(const ScalarGrid& clean, const ScalarGrid& noisy);

}  // namespace shapeflow
