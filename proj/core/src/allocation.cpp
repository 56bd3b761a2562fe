#include "ragscale/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "ragscale/error.hpp"

namespace ragscale {
namespace {

double frontier_loss(const Params3D& p, double n, double d, std::int64_t total) {
  const double r = static_cast<double>(total) - d;
  return eval_3d_unchecked(p, n, d, r);
}

/// Candidate a is better than b: lower loss, or equal loss with larger d (smaller r).
bool better(double loss_a, double d_a, double loss_b, double d_b) {
  return loss_a < loss_b || (loss_a == loss_b && d_a > d_b);
}

}  // namespace

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  double best_x = fc <= fd ? c : d, best_f = std::min(fc, fd);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      if (fc < best_f) best_f = fc, best_x = c;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      if (fd < best_f) best_f = fd, best_x = d;
    }
  }
  return best_x;
}

std::vector<FrontierSample> frontier_curve(const Params3D& p, double n, std::int64_t total_budget, int resolution,
                                           std::int64_t d_min) {
  if (!(total_budget > d_min) || d_min < 1) {
    throw Error(ErrorCode::budget_too_small, "total budget " + std::to_string(total_budget) +
                                                 " must exceed d_min " + std::to_string(d_min));
  }
  if (resolution < 2) throw Error(ErrorCode::invalid_argument, "resolution must be >= 2");
  const double lo = std::log(static_cast<double>(d_min)), hi = std::log(static_cast<double>(total_budget));
  std::vector<FrontierSample> out;
  out.reserve(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) {
    double d;
    if (i == 0) d = static_cast<double>(d_min);
    else if (i == resolution - 1) d = static_cast<double>(total_budget);
    else d = std::round(std::exp(lo + (hi - lo) * i / (resolution - 1)));
    const double r = static_cast<double>(total_budget) - d;
    out.push_back(FrontierSample{d, r, eval_3d_unchecked(p, n, d, r)});
  }
  return out;
}

AllocationPlan optimize_split(const Params3D& p, double n, std::int64_t total_budget, std::int64_t d_min,
                              int resolution) {
  AllocationPlan plan;
  plan.n = n;
  plan.total_budget = total_budget;
  plan.resolution = resolution;
  plan.frontier = frontier_curve(p, n, total_budget, resolution, d_min);

  const auto& fr = plan.frontier;
  std::size_t best = 0;
  for (std::size_t i = 1; i < fr.size(); ++i)
    if (better(fr[i].loss, fr[i].d, fr[best].loss, fr[best].d)) best = i;

  const std::size_t lo_i = best == 0 ? 0 : best - 1;
  const std::size_t hi_i = std::min(best + 1, fr.size() - 1);
  plan.bracket_lo = fr[lo_i].d;
  plan.bracket_hi = fr[hi_i].d;

  double best_d = fr[best].d, best_loss = fr[best].loss;
  if (plan.bracket_hi > plan.bracket_lo) {
    auto along_log_d = [&](double x) { return frontier_loss(p, n, std::exp(x), total_budget); };
    const double x = golden_section_minimize(along_log_d, std::log(plan.bracket_lo), std::log(plan.bracket_hi), 1e-6);
    const double d = std::clamp(std::round(std::exp(x)), static_cast<double>(d_min), static_cast<double>(total_budget));
    const double loss = frontier_loss(p, n, d, total_budget);
    if (better(loss, d, best_loss, best_d)) {
      best_d = d;
      best_loss = loss;
    }
  }
  plan.d_star = static_cast<std::int64_t>(best_d);
  plan.r_star = total_budget - plan.d_star;
  plan.predicted_loss = eval_3d_unchecked(p, n, static_cast<double>(plan.d_star), static_cast<double>(plan.r_star));
  return plan;
}

CrossoverEstimate crossover(std::span<const CrossoverPoint> points, CrossoverSpace space) {
  CrossoverEstimate est;
  est.space = space;
  std::vector<double> xs, ys;
  for (const auto& pt : points) {
    if (!(pt.sigma > 0.0) || !std::isfinite(pt.sigma)) {
      ++est.excluded_nonpositive;
      continue;
    }
    if (!(pt.d_over_n > 0.0)) throw Error(ErrorCode::domain_error, "d_over_n must be positive");
    xs.push_back(space == CrossoverSpace::log_log ? std::log10(pt.d_over_n) : pt.d_over_n);
    ys.push_back(space == CrossoverSpace::log_log ? std::log10(pt.sigma) : pt.sigma);
  }
  est.n_points_used = xs.size();
  const bool distinct = !xs.empty() && std::any_of(xs.begin(), xs.end(), [&](double x) { return x != xs[0]; });
  if (xs.size() < 2 || !distinct)
    throw Error(ErrorCode::insufficient_points, "crossover needs >= 2 positive-sigma points with distinct D/N");

  const double m = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= m;
  my /= m;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  if (std::fabs(est.slope) < 1e-12) throw Error(ErrorCode::zero_slope, "fitted line is flat; threshold undefined");
  if (space == CrossoverSpace::log_log) {
    est.threshold_ratio = std::pow(10.0, -est.intercept / est.slope);
  } else {
    est.threshold_ratio = (1.0 - est.intercept) / est.slope;
  }
  return est;
}

TradeoffTable tradeoff_table(const Dataset& data, const Params2D& p2, const Params3D& p3, Pairing pairing) {
  using Key = std::tuple<std::string, std::int64_t, std::int64_t, std::string>;
  struct Config {
    std::optional<double> baseline;
    std::optional<std::pair<double, double>> rag;  // (r, loss)
    std::size_t first_row = 0;
  };
  std::map<Key, Config> configs;
  std::vector<Key> order;
  std::vector<double> r_values;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& rec = data[i];
    Key key{rec.benchmark, rec.model_params, rec.pretrain_tokens, rec.seed};
    auto [it, inserted] = configs.emplace(key, Config{});
    if (inserted) {
      order.push_back(key);
      it->second.first_row = rec.row;
    }
    auto& cfg = it->second;
    const double r = static_cast<double>(rec.retrieval_tokens);
    if (rec.retrieval_tokens == 0) {
      cfg.baseline = rec.loss;
    } else {
      if (std::find(r_values.begin(), r_values.end(), r) == r_values.end()) r_values.push_back(r);
      if (!cfg.rag || rec.loss < cfg.rag->second || (rec.loss == cfg.rag->second && r < cfg.rag->first))
        cfg.rag = std::make_pair(r, rec.loss);
    }
  }
  std::sort(r_values.begin(), r_values.end());
  if (pairing == Pairing::fitted && r_values.empty())
    throw Error(ErrorCode::insufficient_data, "fitted pairing needs at least one R > 0 value in the data");

  std::vector<TradeoffPoint> rows;
  for (const auto& key : order) {
    const auto& cfg = configs.at(key);
    const auto& [bench, n_i, d_i, seed] = key;
    const double n = static_cast<double>(n_i), d = static_cast<double>(d_i);
    TradeoffPoint pt;
    pt.benchmark = bench;
    pt.seed = seed;
    pt.n = n;
    pt.d = d;
    if (pairing == Pairing::measured) {
      if (!cfg.rag) continue;  // baseline-only configuration
      if (!cfg.baseline) {
        throw Error(ErrorCode::missing_baseline, "no R=0 record for benchmark '" + bench + "', N=" +
                                                     std::to_string(n_i) + ", D=" + std::to_string(d_i) +
                                                     (seed.empty() ? "" : ", seed '" + seed + "'"));
      }
      pt.loss_baseline = *cfg.baseline;
      pt.r_opt = cfg.rag->first;
      pt.loss_rag = cfg.rag->second;
    } else {
      pt.loss_baseline = eval_3d(p3, n, d, 0.0);
      pt.r_opt = r_values.front();
      pt.loss_rag = eval_3d(p3, n, d, pt.r_opt);
      for (double r : r_values) {
        const double loss = eval_3d(p3, n, d, r);
        if (loss < pt.loss_rag) pt.loss_rag = loss, pt.r_opt = r;
      }
    }
    pt.d_eff = effective_pretrain_tokens(p2, n, pt.loss_rag);
    pt.sigma = substitutability(p2, RagConfiguration{n, d, pt.r_opt, pt.loss_rag});
    pt.delta_loss = pt.loss_baseline - pt.loss_rag;
    pt.kappa = marginal_benefit(pt.loss_baseline, pt.loss_rag, pt.r_opt);
    pt.regime = regime_of(n, d);
    rows.push_back(std::move(pt));
  }

  TradeoffTable table;
  for (Regime regime : {Regime::x1, Regime::x10, Regime::x100, Regime::other}) {
    RegimeSummary summary;
    summary.regime = regime;
    std::vector<double> sigmas, kappas;
    for (const auto& row : rows) {
      if (row.regime != regime) continue;
      table.rows.push_back(row);
      ++summary.count;
      kappas.push_back(row.kappa);
      if (!row.sigma) ++summary.sigma_infinite;
      else if (*row.sigma > 0.0) sigmas.push_back(*row.sigma);
      else ++summary.sigma_nonpositive;
    }
    if (summary.count == 0) continue;
    summary.sigma_used = sigmas.size();
    if (!sigmas.empty()) summary.sigma_gm = aggregate_sigma_gm(sigmas);
    summary.kappa_med = aggregate_kappa_med(kappas);
    table.regimes.push_back(summary);
  }
  return table;
}

IsoSurfaces iso_surfaces(const Params2D& p2, Range n_range, Range d_range, int grid, double k) {
  if (!(n_range.lo > 0 && n_range.hi > n_range.lo && d_range.lo > 0 && d_range.hi > d_range.lo))
    throw Error(ErrorCode::invalid_argument, "iso ranges must be positive with lo < hi");
  if (grid < 2) throw Error(ErrorCode::invalid_argument, "grid must be >= 2");
  if (!(k > 0)) throw Error(ErrorCode::invalid_argument, "flops per parameter-token must be positive");

  auto log_space = [](Range r, int count, int i) {
    if (i == 0) return r.lo;
    if (i == count - 1) return r.hi;
    return std::exp(std::log(r.lo) + (std::log(r.hi) - std::log(r.lo)) * i / (count - 1));
  };

  IsoSurfaces out;
  out.grid.reserve(static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) {
    const double n = log_space(n_range, grid, i);
    for (int j = 0; j < grid; ++j) {
      const double d = log_space(d_range, grid, j);
      out.grid.push_back(IsoGridPoint{n, d, eval_2d(p2, n, d)});
    }
  }

  const Range compute{k * n_range.lo * d_range.lo, k * n_range.hi * d_range.hi};
  for (int i = 1; i <= grid; ++i) {
    const double c = std::exp(std::log(compute.lo) + (std::log(compute.hi) - std::log(compute.lo)) * i / (grid + 1));
    const double n_lo = std::max(n_range.lo, c / (k * d_range.hi));
    const double n_hi = std::min(n_range.hi, c / (k * d_range.lo));
    if (!(n_hi > n_lo)) continue;
    auto along = [&](double x) {
      const double n = std::exp(x);
      return eval_2d(p2, n, c / (k * n));
    };
    const double x = golden_section_minimize(along, std::log(n_lo), std::log(n_hi), 1e-9);
    double n = std::exp(x);
    // Endpoints win when the minimum sits on the range boundary.
    for (double cand : {n_lo, n_hi})
      if (along(std::log(cand)) < along(std::log(n))) n = cand;
    const double d = c / (k * n);
    out.frontier.push_back(ComputeFrontierPoint{c, n, d, eval_2d(p2, n, d)});
  }
  return out;
}

}  // namespace ragscale
