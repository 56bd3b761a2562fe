#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ragscale/laws.hpp"
#include "ragscale/records.hpp"

namespace ragscale {

/// Planted-parameter surface over an (N, D, R) grid with multiplicative
/// lognormal noise.
struct SynthSpec {
  Params3D planted;
  std::vector<std::int64_t> n_values;
  std::vector<std::int64_t> d_values;
  std::vector<std::int64_t> r_values;  // must contain 0
  double noise_sigma = 0.0;
  std::uint64_t seed = 42;
  std::string benchmark_label = "synthetic";
  std::string seed_label;  // written to every record's seed column

  /// Throws InvalidArgument on empty grids, a missing R = 0, or negative noise.
  void validate() const;
};

/// One record per grid point, N-major then D then R. Noise for point i comes
/// from its own counter-derived stream, so values do not depend on evaluation
/// order. Throws NonPositivePrediction if the planted law is <= 0 on the grid.
Dataset generate(const SynthSpec& spec);

/// Model sizes 30M..3B, six log-spaced D in [3e7, 1e11], R in {0, 1, 5, 10, 20}e9,
/// and planted log_gain parameters well inside the default fit bounds:
/// A=2.5, alpha=0.35, B=1.8, beta=0.28, L0=1.1, C=0.3, eta=0.9.
SynthSpec default_grid();

/// Model family label used by generate for a model size, e.g. 30000000 -> "30M".
std::string family_label(std::int64_t model_params);

}  // namespace ragscale
