#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ragscale/laws.hpp"
#include "ragscale/records.hpp"

namespace ragscale {

enum class LawFamily { two_d, log_gain, power_gain };
enum class ResidualSpace { relative, log };
enum class FitStage { stage1_baseline, stage2_retrieval, joint };
/// two_stage freezes the stage-1 baseline and fits only (C, rate); joint frees all 7.
enum class FitMode { two_stage, joint };

std::string_view to_string(LawFamily family) noexcept;
std::string_view to_string(ResidualSpace space) noexcept;
std::string_view to_string(FitStage stage) noexcept;
std::string_view to_string(FitMode mode) noexcept;
LawFamily parse_law_family(std::string_view text);
ResidualSpace parse_residual_space(std::string_view text);
FitMode parse_fit_mode(std::string_view text);

struct ParamBound {
  double lo = 0.0;
  double hi = 1.0;
};

struct FitBounds {
  ParamBound A{1e-8, 1e4};
  ParamBound alpha{1e-3, 2.0};
  ParamBound B{1e-8, 1e4};
  ParamBound beta{1e-3, 2.0};
  /// Upper bound defaults to the smallest observed loss when unset.
  double L0_lo = 0.0;
  std::optional<double> L0_hi;
  ParamBound C{1e-8, 1e4};
  ParamBound eta{1e-6, 10.0};
  ParamBound gamma{1e-4, 10.0};
};

struct FitConfig {
  LawFamily family = LawFamily::log_gain;
  ResidualSpace residual_space = ResidualSpace::relative;
  FitMode mode = FitMode::two_stage;
  int n_starts = 64;
  int max_iters = 2000;
  std::uint64_t seed = 42;
  FitBounds bounds;

  /// Throws InvalidArgument unless every lo < hi and n_starts, max_iters >= 1.
  void validate() const;
};

/// A fitted law of any family. For two_d, C and rate are unused (C = 0).
struct LawParams {
  LawFamily family = LawFamily::two_d;
  Params2D base;
  double C = 0.0;
  double rate = 0.0;

  Params3D as_3d() const;
  /// Prediction without the positivity check.
  double predict(double n, double d, double r) const noexcept;

  bool operator==(const LawParams&) const = default;
};

struct FitResult {
  LawParams params;
  double objective = 0.0;  // sum of squared residuals
  std::vector<double> residuals;
  std::vector<std::string> saturated_bounds;
  FitStage stage = FitStage::stage1_baseline;
  FitConfig config;
  std::size_t n_points = 0;
  int starts_converged = 0;

  bool saturated(std::string_view name) const;
};

struct TwoStageFit {
  FitResult stage1;
  FitResult stage2;  // equals stage1 for two_d
  const FitResult& final_fit() const { return stage2; }
};

/// Stage 1: (A, alpha, B, beta, L0) from the R = 0 rows of `data`.
/// Throws InsufficientData (< 6 points) or NoConvergence.
FitResult fit_2d(const Dataset& data, const FitConfig& cfg);

/// Stage 2: (C, rate) with the baseline frozen at `base`.
FitResult fit_3d(const Dataset& data, const Params2D& base, const FitConfig& cfg);

/// All seven parameters free.
FitResult fit_joint_3d(const Dataset& data, const FitConfig& cfg);

/// Runs the configured pipeline: fit_2d for two_d, fit_2d + fit_3d for
/// two_stage, fit_joint_3d for joint (stage1 then holds the warm-start fit
/// when available).
TwoStageFit fit_law(const Dataset& data, const FitConfig& cfg);

/// Residual for one point in the configured space.
double residual(ResidualSpace space, double predicted, double observed) noexcept;

/// Saturation rule: |x - bound| <= 1e-6 * max(1, |bound|).
bool near_bound(double value, double bound) noexcept;

}  // namespace ragscale
