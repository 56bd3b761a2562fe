#include "ragscale/fitter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "ragscale/error.hpp"
#include "ragscale/parallel.hpp"
#include "ragscale/simplex.hpp"

namespace ragscale {

std::string_view to_string(LawFamily family) noexcept {
  switch (family) {
    case LawFamily::two_d: return "two_d";
    case LawFamily::log_gain: return "log_gain";
    case LawFamily::power_gain: return "power_gain";
  }
  return "two_d";
}

std::string_view to_string(ResidualSpace space) noexcept {
  return space == ResidualSpace::relative ? "relative" : "log";
}

std::string_view to_string(FitStage stage) noexcept {
  switch (stage) {
    case FitStage::stage1_baseline: return "stage1_baseline";
    case FitStage::stage2_retrieval: return "stage2_retrieval";
    case FitStage::joint: return "joint";
  }
  return "stage1_baseline";
}

std::string_view to_string(FitMode mode) noexcept { return mode == FitMode::two_stage ? "two_stage" : "joint"; }

LawFamily parse_law_family(std::string_view text) {
  if (text == "two_d" || text == "2d") return LawFamily::two_d;
  if (text == "log_gain" || text == "log") return LawFamily::log_gain;
  if (text == "power_gain" || text == "power") return LawFamily::power_gain;
  throw Error(ErrorCode::invalid_argument, "unknown law family '" + std::string(text) + "'");
}

ResidualSpace parse_residual_space(std::string_view text) {
  if (text == "relative") return ResidualSpace::relative;
  if (text == "log") return ResidualSpace::log;
  throw Error(ErrorCode::invalid_argument, "unknown residual space '" + std::string(text) + "'");
}

FitMode parse_fit_mode(std::string_view text) {
  if (text == "two_stage") return FitMode::two_stage;
  if (text == "joint") return FitMode::joint;
  throw Error(ErrorCode::invalid_argument, "unknown fit mode '" + std::string(text) + "'");
}

void FitConfig::validate() const {
  auto check = [](const char* name, double lo, double hi) {
    if (!(lo < hi)) throw Error(ErrorCode::invalid_argument, std::string("bound for ") + name + " needs lo < hi");
  };
  check("A", bounds.A.lo, bounds.A.hi);
  check("alpha", bounds.alpha.lo, bounds.alpha.hi);
  check("B", bounds.B.lo, bounds.B.hi);
  check("beta", bounds.beta.lo, bounds.beta.hi);
  if (bounds.L0_hi) check("L0", bounds.L0_lo, *bounds.L0_hi);
  check("C", bounds.C.lo, bounds.C.hi);
  check("eta", bounds.eta.lo, bounds.eta.hi);
  check("gamma", bounds.gamma.lo, bounds.gamma.hi);
  if (bounds.A.lo <= 0 || bounds.B.lo <= 0 || bounds.C.lo <= 0 || bounds.eta.lo <= 0 || bounds.gamma.lo <= 0)
    throw Error(ErrorCode::invalid_argument, "log-spaced bounds must be positive");
  if (n_starts < 1) throw Error(ErrorCode::invalid_argument, "n_starts must be >= 1");
  if (max_iters < 1) throw Error(ErrorCode::invalid_argument, "max_iters must be >= 1");
}

Params3D LawParams::as_3d() const {
  return Params3D{base, C, rate, family == LawFamily::power_gain ? GainFamily::power_gain : GainFamily::log_gain};
}

double LawParams::predict(double n, double d, double r) const noexcept {
  if (family == LawFamily::two_d) return eval_2d(base, n, d);
  return eval_3d_unchecked(as_3d(), n, d, r);
}

bool FitResult::saturated(std::string_view name) const {
  return std::find(saturated_bounds.begin(), saturated_bounds.end(), name) != saturated_bounds.end();
}

double residual(ResidualSpace space, double predicted, double observed) noexcept {
  if (space == ResidualSpace::relative) return (predicted - observed) / observed;
  return std::log(predicted) - std::log(observed);
}

bool near_bound(double value, double bound) noexcept {
  return std::fabs(value - bound) <= 1e-6 * std::max(1.0, std::fabs(bound));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ParamSpec {
  std::string name;
  double lo;
  double hi;
  bool log_scale;

  double value(double u) const {
    if (u <= 0.0) return lo;
    if (u >= 1.0) return hi;
    if (log_scale) return std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
    return lo + u * (hi - lo);
  }
  double coordinate(double v) const {
    if (v <= lo) return 0.0;
    if (v >= hi) return 1.0;
    if (log_scale) return (std::log(v) - std::log(lo)) / (std::log(hi) - std::log(lo));
    return (v - lo) / (hi - lo);
  }
};

struct Point {
  double log_n;  // ln(N / 1e9)
  double log_d;
  double r_scaled;  // R / 1e9
  double observed;
  double frozen = 0.0;  // stage-2 baseline prediction
};

std::vector<Point> make_points(const Dataset& data) {
  std::vector<Point> pts;
  pts.reserve(data.size());
  for (const auto& rec : data) {
    pts.push_back(Point{std::log(static_cast<double>(rec.model_params) / kScaleUnit),
                        std::log(static_cast<double>(rec.pretrain_tokens) / kScaleUnit),
                        static_cast<double>(rec.retrieval_tokens) / kScaleUnit, rec.loss});
  }
  return pts;
}

double gain_term(LawFamily family, double C, double rate, double r_scaled) {
  if (family == LawFamily::log_gain) return -C * std::log1p(rate * r_scaled);
  if (family == LawFamily::power_gain) return C * std::exp(-rate * std::log1p(r_scaled));
  return 0.0;
}

double accumulate(ResidualSpace space, double predicted, double observed, double& sse) {
  if (!(predicted > 0.0) || !std::isfinite(predicted)) return kInf;
  const double e = residual(space, predicted, observed);
  sse += e * e;
  return sse;
}

struct StartOutcome {
  std::vector<double> values;
  double objective = kInf;
  bool converged = false;
};

struct MultiStartResult {
  std::vector<double> values;
  double objective = kInf;
  int converged = 0;
};

/// Best converged start; equal objectives resolve to the lexicographically
/// smallest parameter vector so the choice does not depend on start order.
MultiStartResult multi_start(const std::vector<ParamSpec>& specs,
                             const std::function<double(const std::vector<double>&)>& sse,
                             const FitConfig& cfg, const std::vector<std::vector<double>>& extra_starts,
                             std::string_view what) {
  const std::size_t k = specs.size();
  auto starts = low_discrepancy_points(static_cast<std::size_t>(cfg.n_starts), k, cfg.seed);
  for (const auto& values : extra_starts) {
    std::vector<double> u(k);
    for (std::size_t i = 0; i < k; ++i) u[i] = specs[i].coordinate(values[i]);
    starts.push_back(std::move(u));
  }

  auto to_values = [&](const std::vector<double>& u) {
    std::vector<double> v(k);
    for (std::size_t i = 0; i < k; ++i) v[i] = specs[i].value(u[i]);
    return v;
  };
  auto objective = [&](const std::vector<double>& u) { return sse(to_values(u)); };

  SimplexOptions opt;
  opt.max_iters = cfg.max_iters;
  std::vector<StartOutcome> outcomes(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    const SimplexResult res = minimize_in_unit_cube(objective, starts[i], opt);
    outcomes[i] = StartOutcome{to_values(res.x), res.value, res.converged};
  });

  MultiStartResult best;
  for (const auto& o : outcomes) {
    if (!o.converged || !std::isfinite(o.objective)) continue;
    ++best.converged;
    if (o.objective < best.objective || (o.objective == best.objective && o.values < best.values)) {
      best.values = o.values;
      best.objective = o.objective;
    }
  }
  if (best.converged == 0) {
    throw Error(ErrorCode::no_convergence, std::string(what) + ": no start met the convergence criterion within " +
                                               std::to_string(cfg.max_iters) + " iterations");
  }
  return best;
}

std::vector<std::string> saturated_names(const std::vector<ParamSpec>& specs, const std::vector<double>& values) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < specs.size(); ++i)
    if (near_bound(values[i], specs[i].lo) || near_bound(values[i], specs[i].hi)) out.push_back(specs[i].name);
  return out;
}

double min_loss(const Dataset& data) {
  double m = kInf;
  for (const auto& r : data) m = std::min(m, r.loss);
  return m;
}

double l0_upper(const FitConfig& cfg, double observed_min) {
  return cfg.bounds.L0_hi ? *cfg.bounds.L0_hi : observed_min;
}

std::vector<ParamSpec> base_specs(const FitConfig& cfg, double l0_hi) {
  const auto& b = cfg.bounds;
  if (!(b.L0_lo < l0_hi)) throw Error(ErrorCode::invalid_argument, "L0 bounds need lo < hi");
  return {{"A", b.A.lo, b.A.hi, true},
          {"alpha", b.alpha.lo, b.alpha.hi, false},
          {"B", b.B.lo, b.B.hi, true},
          {"beta", b.beta.lo, b.beta.hi, false},
          {"L0", b.L0_lo, l0_hi, false}};
}

std::vector<ParamSpec> gain_specs(const FitConfig& cfg) {
  const auto& b = cfg.bounds;
  if (cfg.family == LawFamily::power_gain) return {{"C", b.C.lo, b.C.hi, true}, {"gamma", b.gamma.lo, b.gamma.hi, true}};
  return {{"C", b.C.lo, b.C.hi, true}, {"eta", b.eta.lo, b.eta.hi, true}};
}

void fill_residuals(FitResult& fit, const Dataset& data) {
  fit.residuals.clear();
  fit.residuals.reserve(data.size());
  for (const auto& rec : data) {
    const double pred = fit.params.predict(static_cast<double>(rec.model_params),
                                           static_cast<double>(rec.pretrain_tokens),
                                           static_cast<double>(rec.retrieval_tokens));
    fit.residuals.push_back(residual(fit.config.residual_space, pred, rec.loss));
  }
  fit.n_points = data.size();
}

void check_positive_on_hull(const LawParams& p, const Dataset& data) {
  if (p.family != LawFamily::log_gain) return;
  double n = 0, d = 0, r = 0;
  for (const auto& rec : data) {
    n = std::max(n, static_cast<double>(rec.model_params));
    d = std::max(d, static_cast<double>(rec.pretrain_tokens));
    r = std::max(r, static_cast<double>(rec.retrieval_tokens));
  }
  // Decreasing in every coordinate, so this corner bounds the hull from below.
  eval_3d(p.as_3d(), n, d, r);
}

std::size_t distinct_count(const Dataset& data, std::int64_t RunRecord::*field) {
  std::set<std::int64_t> s;
  for (const auto& rec : data) s.insert(rec.*field);
  return s.size();
}

}  // namespace

FitResult fit_2d(const Dataset& data, const FitConfig& cfg) {
  cfg.validate();
  const Dataset baseline = filter(data, RecordFilter{.r_equals_zero = true});
  if (baseline.size() < 6) {
    throw Error(ErrorCode::insufficient_data,
                "2D fit needs at least 6 R=0 points, got " + std::to_string(baseline.size()));
  }
  const auto specs = base_specs(cfg, l0_upper(cfg, min_loss(baseline)));
  const auto pts = make_points(baseline);
  const ResidualSpace space = cfg.residual_space;
  auto sse = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (const auto& p : pts) {
      const double pred = v[0] * std::exp(-v[1] * p.log_n) + v[2] * std::exp(-v[3] * p.log_d) + v[4];
      if (accumulate(space, pred, p.observed, s) == kInf) return kInf;
    }
    return s;
  };
  const auto best = multi_start(specs, sse, cfg, {}, "fit_2d");

  FitResult fit;
  fit.params.family = LawFamily::two_d;
  fit.params.base = Params2D{best.values[0], best.values[1], best.values[2], best.values[3], best.values[4]};
  fit.objective = best.objective;
  fit.saturated_bounds = saturated_names(specs, best.values);
  fit.stage = FitStage::stage1_baseline;
  fit.config = cfg;
  fit.config.bounds.L0_hi = specs[4].hi;
  fit.starts_converged = best.converged;
  fill_residuals(fit, baseline);
  return fit;
}

FitResult fit_3d(const Dataset& data, const Params2D& base, const FitConfig& cfg) {
  cfg.validate();
  if (cfg.family == LawFamily::two_d)
    throw Error(ErrorCode::invalid_argument, "fit_3d needs a retrieval family (log_gain or power_gain)");
  std::size_t with_retrieval = 0;
  for (const auto& rec : data) with_retrieval += rec.retrieval_tokens > 0 ? 1 : 0;
  if (with_retrieval < 3) {
    throw Error(ErrorCode::insufficient_data,
                "retrieval fit needs at least 3 points with R > 0, got " + std::to_string(with_retrieval));
  }
  const auto specs = gain_specs(cfg);
  auto pts = make_points(data);
  for (auto& p : pts) p.frozen = base.A * std::exp(-base.alpha * p.log_n) + base.B * std::exp(-base.beta * p.log_d) + base.L0;
  const ResidualSpace space = cfg.residual_space;
  const LawFamily family = cfg.family;
  auto sse = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (const auto& p : pts) {
      const double pred = p.frozen + gain_term(family, v[0], v[1], p.r_scaled);
      if (accumulate(space, pred, p.observed, s) == kInf) return kInf;
    }
    return s;
  };
  const auto best = multi_start(specs, sse, cfg, {}, "fit_3d");

  FitResult fit;
  fit.params = LawParams{family, base, best.values[0], best.values[1]};
  fit.objective = best.objective;
  fit.saturated_bounds = saturated_names(specs, best.values);
  fit.stage = FitStage::stage2_retrieval;
  fit.config = cfg;
  fit.starts_converged = best.converged;
  check_positive_on_hull(fit.params, data);
  fill_residuals(fit, data);
  return fit;
}

namespace {

FitResult fit_joint_impl(const Dataset& data, const FitConfig& cfg, const std::optional<LawParams>& warm) {
  auto specs = base_specs(cfg, l0_upper(cfg, [&] {
                            const Dataset baseline = filter(data, RecordFilter{.r_equals_zero = true});
                            return min_loss(baseline.empty() ? data : baseline);
                          }()));
  for (auto& s : gain_specs(cfg)) specs.push_back(s);

  std::vector<std::vector<double>> extra;
  if (warm) {
    extra.push_back({warm->base.A, warm->base.alpha, warm->base.B, warm->base.beta, warm->base.L0, warm->C, warm->rate});
  }

  const auto pts = make_points(data);
  const ResidualSpace space = cfg.residual_space;
  const LawFamily family = cfg.family;
  auto sse = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (const auto& p : pts) {
      const double pred = v[0] * std::exp(-v[1] * p.log_n) + v[2] * std::exp(-v[3] * p.log_d) + v[4] +
                          gain_term(family, v[5], v[6], p.r_scaled);
      if (accumulate(space, pred, p.observed, s) == kInf) return kInf;
    }
    return s;
  };
  const auto best = multi_start(specs, sse, cfg, extra, "fit_joint_3d");

  FitResult fit;
  const auto& v = best.values;
  fit.params = LawParams{family, Params2D{v[0], v[1], v[2], v[3], v[4]}, v[5], v[6]};
  fit.objective = best.objective;
  fit.saturated_bounds = saturated_names(specs, v);
  fit.stage = FitStage::joint;
  fit.config = cfg;
  fit.config.bounds.L0_hi = specs[4].hi;
  fit.starts_converged = best.converged;
  check_positive_on_hull(fit.params, data);
  fill_residuals(fit, data);
  return fit;
}

void check_joint_design(const Dataset& data, const FitConfig& cfg) {
  cfg.validate();
  if (cfg.family == LawFamily::two_d)
    throw Error(ErrorCode::invalid_argument, "joint fit needs a retrieval family (log_gain or power_gain)");
  if (data.size() < 8)
    throw Error(ErrorCode::insufficient_data, "joint fit needs at least 8 points, got " + std::to_string(data.size()));
  if (distinct_count(data, &RunRecord::model_params) < 2 || distinct_count(data, &RunRecord::pretrain_tokens) < 2)
    throw Error(ErrorCode::insufficient_data, "joint fit needs at least two distinct values of N and of D");
  if (distinct_count(data, &RunRecord::retrieval_tokens) < 2)
    throw Error(ErrorCode::no_convergence, "C and the retrieval rate are unidentifiable from a single R value");
}

}  // namespace

FitResult fit_joint_3d(const Dataset& data, const FitConfig& cfg) {
  check_joint_design(data, cfg);
  std::optional<LawParams> warm;
  try {
    FitConfig staged = cfg;
    staged.mode = FitMode::two_stage;
    const FitResult s1 = fit_2d(data, staged);
    warm = fit_3d(data, s1.params.base, staged).params;
  } catch (const Error&) {
    // The warm start is optional; the low-discrepancy starts still run.
  }
  return fit_joint_impl(data, cfg, warm);
}

TwoStageFit fit_law(const Dataset& data, const FitConfig& cfg) {
  if (cfg.family == LawFamily::two_d) {
    FitResult s1 = fit_2d(data, cfg);
    return TwoStageFit{s1, s1};
  }
  if (cfg.mode == FitMode::joint) {
    check_joint_design(data, cfg);
    TwoStageFit out;
    std::optional<LawParams> warm;
    try {
      FitConfig staged = cfg;
      staged.mode = FitMode::two_stage;
      out.stage1 = fit_2d(data, staged);
      warm = fit_3d(data, out.stage1.params.base, staged).params;
    } catch (const Error&) {
    }
    out.stage2 = fit_joint_impl(data, cfg, warm);
    if (!warm) out.stage1 = out.stage2;
    return out;
  }
  TwoStageFit out;
  out.stage1 = fit_2d(data, cfg);
  out.stage2 = fit_3d(data, out.stage1.params.base, cfg);
  return out;
}

}  // namespace ragscale
