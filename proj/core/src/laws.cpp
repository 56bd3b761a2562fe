#include "ragscale/laws.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ragscale/error.hpp"

namespace ragscale {

std::string_view to_string(GainFamily family) noexcept {
  return family == GainFamily::log_gain ? "log_gain" : "power_gain";
}

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::x1: return "1x";
    case Regime::x10: return "10x";
    case Regime::x100: return "100x";
    case Regime::other: return "other";
  }
  return "other";
}

double eval_2d(const Params2D& p, double n, double d) noexcept {
  return p.A * std::pow(n / kScaleUnit, -p.alpha) + p.B * std::pow(d / kScaleUnit, -p.beta) + p.L0;
}

double eval_3d_unchecked(const Params3D& p, double n, double d, double r) noexcept {
  const double base = eval_2d(p.base, n, d);
  if (p.family == GainFamily::log_gain) return base - p.C * std::log1p(p.rate * r / kScaleUnit);
  return base + p.C * std::pow(1.0 + r / kScaleUnit, -p.rate);
}

double eval_3d(const Params3D& p, double n, double d, double r) {
  const double value = eval_3d_unchecked(p, n, d, r);
  if (p.family == GainFamily::log_gain && !(value > 0.0)) {
    throw Error(ErrorCode::non_positive_prediction,
                "log_gain law predicts " + std::to_string(value) + " at (N=" + std::to_string(n) +
                    ", D=" + std::to_string(d) + ", R=" + std::to_string(r) + ")");
  }
  return value;
}

Partials partials_3d(const Params3D& p, double n, double d, double r) noexcept {
  Partials out;
  const auto& b = p.base;
  out.dn = -b.alpha * b.A * std::pow(n / kScaleUnit, -b.alpha - 1.0) / kScaleUnit;
  out.dd = -b.beta * b.B * std::pow(d / kScaleUnit, -b.beta - 1.0) / kScaleUnit;
  if (p.family == GainFamily::log_gain) {
    out.dr = -p.C * p.rate / kScaleUnit / (1.0 + p.rate * r / kScaleUnit);
  } else {
    out.dr = -p.rate * p.C * std::pow(1.0 + r / kScaleUnit, -p.rate - 1.0) / kScaleUnit;
  }
  return out;
}

std::optional<double> effective_pretrain_tokens(const Params2D& p, double n, double loss_rag) {
  if (!(loss_rag > 0.0)) throw Error(ErrorCode::domain_error, "loss_rag must be positive");
  const double residual = loss_rag - p.L0 - p.A * std::pow(n / kScaleUnit, -p.alpha);
  if (!(residual > 0.0)) return std::nullopt;
  return kScaleUnit * std::pow(residual / p.B, -1.0 / p.beta);
}

std::optional<double> substitutability(const Params2D& p, const RagConfiguration& cfg) {
  if (cfg.r_opt == 0.0) throw Error(ErrorCode::zero_retrieval, "substitutability needs r_opt > 0");
  const auto d_eff = effective_pretrain_tokens(p, cfg.n, cfg.loss_rag);
  if (!d_eff) return std::nullopt;
  return (*d_eff - cfg.d) / cfg.r_opt;
}

double marginal_benefit(double loss_baseline, double loss_rag, double r) {
  if (r == 0.0) throw Error(ErrorCode::zero_retrieval, "marginal benefit needs r > 0");
  return (loss_baseline - loss_rag) / (r / kScaleUnit);
}

double aggregate_sigma_gm(std::span<const double> sigmas) {
  if (sigmas.empty()) throw Error(ErrorCode::empty_input, "no sigma values to aggregate");
  double sum = 0.0;
  for (double s : sigmas) {
    if (!(s > 0.0)) throw Error(ErrorCode::non_positive_input, "geometric mean needs sigma > 0");
    sum += std::log(s);
  }
  return std::exp(sum / static_cast<double>(sigmas.size()));
}

double aggregate_kappa_med(std::span<const double> kappas) {
  if (kappas.empty()) throw Error(ErrorCode::empty_input, "no kappa values to aggregate");
  std::vector<double> v(kappas.begin(), kappas.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

Regime regime_of(double n, double d) noexcept {
  // Slack absorbs the rounding in log10 of ratios that sit exactly on an edge.
  constexpr double slack = 1e-12;
  const double x = std::log10(d / n);
  if (!std::isfinite(x) || x < -0.5 - slack) return Regime::other;
  if (x <= 0.5 + slack) return Regime::x1;
  if (x <= 1.5 + slack) return Regime::x10;
  if (x <= 2.5 + slack) return Regime::x100;
  return Regime::other;
}

}  // namespace ragscale
