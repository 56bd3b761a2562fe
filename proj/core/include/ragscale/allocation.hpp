#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ragscale/laws.hpp"
#include "ragscale/records.hpp"

namespace ragscale {

struct FrontierSample {
  double d = 0.0;
  double r = 0.0;
  double loss = 0.0;
};

/// Best split of a fixed token budget T = D + R for one model size.
struct AllocationPlan {
  double n = 0.0;
  std::int64_t total_budget = 0;
  std::int64_t d_star = 0;
  std::int64_t r_star = 0;
  double predicted_loss = 0.0;
  std::vector<FrontierSample> frontier;
  int resolution = 0;
  /// Coarse bracket handed to the golden-section refinement.
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// `resolution` log-spaced samples of d in [d_min, total_budget] with r = T - d.
/// Throws BudgetTooSmall unless total_budget > d_min.
std::vector<FrontierSample> frontier_curve(const Params3D& p, double n, std::int64_t total_budget,
                                           int resolution = 512, std::int64_t d_min = 1'000'000);

/// Frontier scan, then golden-section refinement of the best bracket to a
/// relative width of 1e-6. Equal losses prefer the smaller r.
AllocationPlan optimize_split(const Params3D& p, double n, std::int64_t total_budget,
                              std::int64_t d_min = 1'000'000, int resolution = 512);

/// Golden-section minimization of a unimodal f on [lo, hi]; stops once the
/// bracket is narrower than `tol`. Returns the best point evaluated.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol);

struct CrossoverPoint {
  double d_over_n = 0.0;
  double sigma = 0.0;
};

enum class CrossoverSpace { log_log, linear };

struct CrossoverEstimate {
  double threshold_ratio = 0.0;  // D/N where the fitted sigma is 1
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t n_points_used = 0;
  std::size_t excluded_nonpositive = 0;
  CrossoverSpace space = CrossoverSpace::log_log;
};

/// OLS of log10(sigma) on log10(D/N) over positive-sigma points (or sigma on
/// D/N in linear space). Throws InsufficientPoints / ZeroSlope.
CrossoverEstimate crossover(std::span<const CrossoverPoint> points, CrossoverSpace space = CrossoverSpace::log_log);

enum class Pairing { measured, fitted };

struct TradeoffPoint {
  std::string benchmark;
  std::string seed;
  double n = 0.0;
  double d = 0.0;
  double r_opt = 0.0;
  double loss_rag = 0.0;
  double loss_baseline = 0.0;
  std::optional<double> d_eff;  // nullopt: undefined_floor
  std::optional<double> sigma;  // nullopt: infinite
  double delta_loss = 0.0;
  double kappa = 0.0;
  Regime regime = Regime::other;
};

struct RegimeSummary {
  Regime regime = Regime::other;
  std::size_t count = 0;
  std::optional<double> sigma_gm;  // over positive finite sigma only
  std::size_t sigma_used = 0;
  std::size_t sigma_nonpositive = 0;
  std::size_t sigma_infinite = 0;
  std::optional<double> kappa_med;
};

struct TradeoffTable {
  std::vector<TradeoffPoint> rows;     // grouped by regime (1x, 10x, 100x, other)
  std::vector<RegimeSummary> regimes;  // one per regime present
};

/// Substitutability, marginal benefit and D_eff for every (benchmark, N, D,
/// seed) configuration in `data`. Measured pairing uses the data's losses and
/// needs an R = 0 partner per configuration (MissingBaseline otherwise);
/// fitted pairing evaluates p3.
TradeoffTable tradeoff_table(const Dataset& data, const Params2D& p2, const Params3D& p3, Pairing pairing);

struct IsoGridPoint {
  double n = 0.0;
  double d = 0.0;
  double loss = 0.0;
};

struct ComputeFrontierPoint {
  double compute = 0.0;  // flops_per_param_token * N * D
  double n = 0.0;
  double d = 0.0;
  double loss = 0.0;
};

struct IsoSurfaces {
  std::vector<IsoGridPoint> grid;  // n-major, grid x grid
  std::vector<ComputeFrontierPoint> frontier;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Log-spaced loss grid and the compute-efficient frontier: for `grid`
/// iso-compute budgets k*N*D = c, the N minimizing the 2D law along the curve.
IsoSurfaces iso_surfaces(const Params2D& p2, Range n_range, Range d_range, int grid,
                         double flops_per_param_token = 6.0);

}  // namespace ragscale
