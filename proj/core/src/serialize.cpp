#include "ragscale/serialize.hpp"

#include "ragscale/error.hpp"

namespace ragscale {
namespace {

ordered_json bound(const ParamBound& b) { return ordered_json::array({b.lo, b.hi}); }

ordered_json optional_number(const std::optional<double>& v, std::string_view flag) {
  if (v) return *v;
  return std::string(flag);
}

std::string csv_number(const std::optional<double>& v, std::string_view flag) {
  return v ? format_real(*v) : std::string(flag);
}

}  // namespace

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json to_json(const FitConfig& cfg) {
  ordered_json j;
  j["family"] = to_string(cfg.family);
  j["residual_space"] = to_string(cfg.residual_space);
  j["mode"] = to_string(cfg.mode);
  j["n_starts"] = cfg.n_starts;
  j["max_iters"] = cfg.max_iters;
  j["seed"] = cfg.seed;
  ordered_json b;
  b["A"] = bound(cfg.bounds.A);
  b["alpha"] = bound(cfg.bounds.alpha);
  b["B"] = bound(cfg.bounds.B);
  b["beta"] = bound(cfg.bounds.beta);
  b["L0"] = cfg.bounds.L0_hi ? ordered_json::array({cfg.bounds.L0_lo, *cfg.bounds.L0_hi})
                             : ordered_json::array({cfg.bounds.L0_lo, "min_observed_loss"});
  b["C"] = bound(cfg.bounds.C);
  b["eta"] = bound(cfg.bounds.eta);
  b["gamma"] = bound(cfg.bounds.gamma);
  j["bounds"] = std::move(b);
  return j;
}

ordered_json to_json(const LawParams& p) {
  ordered_json j;
  j["family"] = to_string(p.family);
  j["A"] = p.base.A;
  j["alpha"] = p.base.alpha;
  j["B"] = p.base.B;
  j["beta"] = p.base.beta;
  j["L0"] = p.base.L0;
  if (p.family != LawFamily::two_d) {
    j["C"] = p.C;
    j[p.family == LawFamily::log_gain ? "eta" : "gamma"] = p.rate;
  }
  return j;
}

ordered_json to_json(const FitResult& fit) {
  ordered_json j;
  j["stage"] = to_string(fit.stage);
  j["params"] = to_json(fit.params);
  j["objective"] = fit.objective;
  j["n_points"] = fit.n_points;
  j["starts_converged"] = fit.starts_converged;
  j["saturated_bounds"] = fit.saturated_bounds;
  j["residuals"] = fit.residuals;
  j["config"] = to_json(fit.config);
  return j;
}

ordered_json to_json(const ValidationReport& r) {
  ordered_json j;
  j["protocol"] = to_string(r.protocol);
  j["are_percent"] = r.are_percent;
  j["r_squared"] = r.r_squared;
  j["r_squared_mode"] = "pooled";
  j["seed"] = r.seed;
  j["folds"] = r.folds;
  j["repeats"] = r.repeats;
  ordered_json folds = ordered_json::array();
  for (const auto& f : r.per_fold) {
    folds.push_back(ordered_json{{"held_out_label", f.held_out_label}, {"n_points", f.n_points},
                                 {"are_percent", f.are_percent}});
  }
  j["per_fold"] = std::move(folds);
  j["notes"] = r.notes;
  return j;
}

ordered_json to_json(const StabilityReport& r) {
  ordered_json j;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back(ordered_json{{"subset_id", row.subset_id}, {"benchmark", row.benchmark},
                                {"cv_are", row.cv_are}, {"lomo_are", row.lomo_are}});
  }
  ordered_json summary = ordered_json::array();
  for (const auto& s : r.summary) {
    summary.push_back(ordered_json{{"benchmark", s.benchmark}, {"subsets", s.subsets},
                                   {"cv_are_mean", s.cv_mean}, {"cv_are_std", s.cv_std},
                                   {"lomo_are_mean", s.lomo_mean}, {"lomo_are_std", s.lomo_std}});
  }
  j["subsets"] = std::move(rows);
  j["summary"] = std::move(summary);
  return j;
}

ordered_json to_json(const AllocationPlan& plan) {
  ordered_json j;
  j["n"] = plan.n;
  j["total_budget"] = plan.total_budget;
  j["d_star"] = plan.d_star;
  j["r_star"] = plan.r_star;
  j["predicted_loss"] = plan.predicted_loss;
  j["resolution"] = plan.resolution;
  j["bracket"] = ordered_json::array({plan.bracket_lo, plan.bracket_hi});
  return j;
}

ordered_json to_json(const CrossoverEstimate& e) {
  ordered_json j;
  j["threshold_ratio"] = e.threshold_ratio;
  j["slope"] = e.slope;
  j["intercept"] = e.intercept;
  j["space"] = e.space == CrossoverSpace::log_log ? "log_log" : "linear";
  j["n_points_used"] = e.n_points_used;
  j["excluded_nonpositive"] = e.excluded_nonpositive;
  return j;
}

ordered_json to_json(const TradeoffTable& t) {
  ordered_json j;
  ordered_json rows = ordered_json::array();
  for (const auto& r : t.rows) {
    ordered_json o;
    o["benchmark"] = r.benchmark;
    o["seed"] = r.seed;
    o["n"] = r.n;
    o["d"] = r.d;
    o["r_opt"] = r.r_opt;
    o["loss_baseline"] = r.loss_baseline;
    o["loss_rag"] = r.loss_rag;
    o["d_eff"] = optional_number(r.d_eff, "undefined_floor");
    o["sigma"] = optional_number(r.sigma, "infinite");
    o["delta_loss"] = r.delta_loss;
    o["kappa"] = r.kappa;
    o["regime"] = to_string(r.regime);
    rows.push_back(std::move(o));
  }
  ordered_json regimes = ordered_json::array();
  for (const auto& s : t.regimes) {
    ordered_json o;
    o["regime"] = to_string(s.regime);
    o["count"] = s.count;
    o["sigma_gm"] = s.sigma_gm ? ordered_json(*s.sigma_gm) : ordered_json(nullptr);
    o["sigma_used"] = s.sigma_used;
    o["sigma_excluded_nonpositive"] = s.sigma_nonpositive;
    o["sigma_excluded_infinite"] = s.sigma_infinite;
    o["kappa_med"] = s.kappa_med ? ordered_json(*s.kappa_med) : ordered_json(nullptr);
    regimes.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  j["regimes"] = std::move(regimes);
  return j;
}

ordered_json to_json(const IsoSurfaces& iso) {
  ordered_json j;
  ordered_json grid = ordered_json::array();
  for (const auto& g : iso.grid) grid.push_back(ordered_json::array({g.n, g.d, g.loss}));
  ordered_json frontier = ordered_json::array();
  for (const auto& f : iso.frontier)
    frontier.push_back(ordered_json{{"compute", f.compute}, {"n", f.n}, {"d", f.d}, {"loss", f.loss}});
  j["grid_columns"] = ordered_json::array({"n", "d", "loss"});
  j["grid"] = std::move(grid);
  j["compute_frontier"] = std::move(frontier);
  return j;
}

ordered_json to_json(const SynthSpec& s) {
  ordered_json j;
  LawParams lp{s.planted.family == GainFamily::log_gain ? LawFamily::log_gain : LawFamily::power_gain,
               s.planted.base, s.planted.C, s.planted.rate};
  j["planted"] = to_json(lp);
  j["n_values"] = s.n_values;
  j["d_values"] = s.d_values;
  j["r_values"] = s.r_values;
  j["noise_sigma"] = s.noise_sigma;
  j["seed"] = s.seed;
  j["benchmark_label"] = s.benchmark_label;
  j["seed_label"] = s.seed_label;
  return j;
}

LawParams law_params_from_json(const nlohmann::json& j) {
  try {
    LawParams p;
    p.family = parse_law_family(j.value("family", std::string("two_d")));
    p.base = Params2D{j.at("A").get<double>(), j.at("alpha").get<double>(), j.at("B").get<double>(),
                      j.at("beta").get<double>(), j.at("L0").get<double>()};
    if (p.family != LawFamily::two_d) {
      p.C = j.at("C").get<double>();
      const char* rate_key = p.family == LawFamily::log_gain ? "eta" : "gamma";
      p.rate = j.contains(rate_key) ? j.at(rate_key).get<double>() : j.at("rate").get<double>();
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::schema_error, std::string("params: ") + e.what());
  }
}

SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  SynthSpec s = default_grid();
  try {
    if (j.contains("planted")) {
      const LawParams p = law_params_from_json(j.at("planted"));
      if (p.family == LawFamily::two_d)
        throw Error(ErrorCode::schema_error, "synth planted params need a retrieval family");
      s.planted = p.as_3d();
    }
    if (j.contains("n_values")) s.n_values = j.at("n_values").get<std::vector<std::int64_t>>();
    if (j.contains("d_values")) s.d_values = j.at("d_values").get<std::vector<std::int64_t>>();
    if (j.contains("r_values")) s.r_values = j.at("r_values").get<std::vector<std::int64_t>>();
    s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
    s.seed = j.value("seed", s.seed);
    s.benchmark_label = j.value("benchmark_label", s.benchmark_label);
    s.seed_label = j.value("seed_label", s.seed_label);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::schema_error, std::string("synth spec: ") + e.what());
  }
  s.validate();
  return s;
}

std::map<std::string, LawParams> load_params(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("params: ") + e.what());
  }
  std::map<std::string, LawParams> out;
  if (j.is_object() && j.contains("results")) {
    for (const auto& entry : j.at("results")) {
      const std::string bench = entry.value("benchmark", std::string());
      const auto& fit = entry.contains("stage2") ? entry.at("stage2") : entry.at("stage1");
      out[bench] = law_params_from_json(fit.at("params"));
    }
    if (out.empty()) throw Error(ErrorCode::schema_error, "params: fit report has no results");
    return out;
  }
  if (j.is_object() && j.contains("params")) {
    out[""] = law_params_from_json(j.at("params"));
    return out;
  }
  out[""] = law_params_from_json(j);
  return out;
}

const LawParams& params_for(const std::map<std::string, LawParams>& params, const std::string& benchmark) {
  if (auto it = params.find(benchmark); it != params.end()) return it->second;
  if (auto it = params.find(""); it != params.end()) return it->second;
  if (params.size() == 1) return params.begin()->second;
  throw Error(ErrorCode::missing_group, "no parameters for benchmark '" + benchmark + "'");
}

std::string frontier_csv(const std::vector<FrontierSample>& frontier) {
  std::string out = "d,r,loss\n";
  for (const auto& s : frontier) out += format_real(s.d) + "," + format_real(s.r) + "," + format_real(s.loss) + "\n";
  return out;
}

std::string tradeoff_csv(const TradeoffTable& t) {
  std::string out = "n,d,r,loss_baseline,loss_rag,d_eff,sigma,kappa,regime\n";
  for (const auto& r : t.rows) {
    out += format_real(r.n) + "," + format_real(r.d) + "," + format_real(r.r_opt) + "," +
           format_real(r.loss_baseline) + "," + format_real(r.loss_rag) + "," +
           csv_number(r.d_eff, "undefined_floor") + "," + csv_number(r.sigma, "infinite") + "," +
           format_real(r.kappa) + "," + std::string(to_string(r.regime)) + "\n";
  }
  return out;
}

std::string iso_grid_csv(const IsoSurfaces& iso) {
  std::string out = "n,d,loss\n";
  for (const auto& g : iso.grid) out += format_real(g.n) + "," + format_real(g.d) + "," + format_real(g.loss) + "\n";
  return out;
}

std::string compute_frontier_csv(const IsoSurfaces& iso) {
  std::string out = "compute,n,d,loss\n";
  for (const auto& f : iso.frontier)
    out += format_real(f.compute) + "," + format_real(f.n) + "," + format_real(f.d) + "," + format_real(f.loss) + "\n";
  return out;
}

}  // namespace ragscale
