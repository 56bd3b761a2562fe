#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace ragscale {

/// Token and parameter counts enter every law divided by this unit.
inline constexpr double kScaleUnit = 1e9;

/// L(N, D) = A (N/1e9)^-alpha + B (D/1e9)^-beta + L0
struct Params2D {
  double A = 1.0;
  double alpha = 0.3;
  double B = 1.0;
  double beta = 0.3;
  double L0 = 0.0;

  bool operator==(const Params2D&) const = default;
};

enum class GainFamily { log_gain, power_gain };

std::string_view to_string(GainFamily family) noexcept;

/// Adds a retrieval term to Params2D.
///   log_gain:   - C log(1 + rate R/1e9)        (rate is eta)
///   power_gain: + C (1 + R/1e9)^-rate          (rate is gamma)
/// The power form contributes exactly C at R = 0, so its baseline sits C above
/// the plain 2D law.
struct Params3D {
  Params2D base;
  double C = 0.0;
  double rate = 1.0;
  GainFamily family = GainFamily::log_gain;

  bool operator==(const Params3D&) const = default;
};

double eval_2d(const Params2D& p, double n, double d) noexcept;

/// Throws NonPositivePrediction when a log_gain evaluation is <= 0.
double eval_3d(const Params3D& p, double n, double d, double r);

/// Same as eval_3d but never throws; may return a non-positive value.
double eval_3d_unchecked(const Params3D& p, double n, double d, double r) noexcept;

struct Partials {
  double dn = 0.0;
  double dd = 0.0;
  double dr = 0.0;
};

/// Closed-form partial derivatives per raw parameter/token.
Partials partials_3d(const Params3D& p, double n, double d, double r) noexcept;

/// Inverts the 2D law in D at fixed N. Returns nullopt when loss_rag is at or
/// below L0 + A (N/1e9)^-alpha, where no finite D reaches it.
std::optional<double> effective_pretrain_tokens(const Params2D& p, double n, double loss_rag);

struct RagConfiguration {
  double n = 0.0;
  double d = 0.0;
  double r_opt = 0.0;
  double loss_rag = 0.0;
};

/// Pretraining tokens saved per retrieval token, (D_eff - D) / R_opt.
/// nullopt means infinite (loss below the 2D floor). Throws ZeroRetrieval.
std::optional<double> substitutability(const Params2D& p, const RagConfiguration& cfg);

/// Loss reduction per billion retrieval tokens. Throws ZeroRetrieval.
double marginal_benefit(double loss_baseline, double loss_rag, double r);

/// exp(mean(ln sigma)). Throws EmptyInput / NonPositiveInput.
double aggregate_sigma_gm(std::span<const double> sigmas);

/// Median; even counts average the two central values. Throws EmptyInput.
double aggregate_kappa_med(std::span<const double> kappas);

enum class Regime { x1, x10, x100, other };

std::string_view to_string(Regime regime) noexcept;

/// Half-decade bands around D/N = 1, 10, 100; a ratio exactly on a band edge
/// belongs to the lower regime.
Regime regime_of(double n, double d) noexcept;

}  // namespace ragscale
