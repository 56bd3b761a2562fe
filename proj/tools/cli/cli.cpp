#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "ragscale/ragscale.hpp"

namespace ragscale::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Files a command wants to write; flushed only after the command succeeds.
class Outputs {
 public:
  void add(fs::path path, std::string contents) { files_.emplace_back(std::move(path), std::move(contents)); }
  void flush() const {
    for (const auto& [path, contents] : files_) write_file(path, contents);
  }
  const fs::path& primary() const { return files_.front().first; }
  bool empty() const { return files_.empty(); }

 private:
  std::vector<std::pair<fs::path, std::string>> files_;
};

fs::path with_ext(const fs::path& base, const std::string& ext) {
  fs::path p = base;
  p.replace_extension(ext);
  return p;
}

std::int64_t token_flag(const std::string& text, const char* flag) {
  try {
    return parse_token_count(text);
  } catch (const Error&) {
    throw UsageError(std::string(flag) + ": expected an integer token count, got '" + text + "'");
  }
}

double real_flag(const std::string& text, const char* flag) {
  try {
    return parse_real(text);
  } catch (const Error&) {
    throw UsageError(std::string(flag) + ": expected a number, got '" + text + "'");
  }
}

template <typename F>
auto usage_guard(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::invalid_argument) throw UsageError(e.detail());
    throw;
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

ordered_json data_info(const Dataset& d) {
  ordered_json j;
  j["file"] = fs::path(d.source_path()).filename().string();
  j["checksum"] = d.checksum();
  j["canonical_checksum"] = canonical_checksum(d);
  j["n_records"] = d.size();
  return j;
}

ordered_json report_header(const std::string& command) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  return j;
}

struct FitFlags {
  std::string family = "log_gain";
  std::string residual_space = "relative";
  std::string mode = "two_stage";
  std::uint64_t seed = 42;
  int starts = 64;
  int max_iters = 2000;

  void attach(CLI::App* app) {
    app->add_option("--family", family, "two_d | log_gain | power_gain")->capture_default_str();
    app->add_option("--residual-space", residual_space, "relative | log")->capture_default_str();
    app->add_option("--mode", mode, "two_stage | joint")->capture_default_str();
    app->add_option("--seed", seed, "Seed for multi-start and splits")->capture_default_str();
    app->add_option("--starts", starts, "Multi-start count")->capture_default_str();
    app->add_option("--max-iters", max_iters, "Simplex iteration cap per start")->capture_default_str();
  }

  FitConfig config() const {
    return usage_guard([&] {
      FitConfig cfg;
      cfg.family = parse_law_family(family);
      cfg.residual_space = parse_residual_space(residual_space);
      cfg.mode = parse_fit_mode(mode);
      cfg.seed = seed;
      cfg.n_starts = starts;
      cfg.max_iters = max_iters;
      cfg.validate();
      return cfg;
    });
  }
};

Dataset load_data(const std::string& path) { return load_dataset(path); }

std::map<std::string, LawParams> load_params_file(const std::string& path) { return load_params(read_file(path)); }

std::string fit_summary_csv(const ordered_json& results) {
  std::string out = "benchmark,A,alpha,B,beta,L0,C,rate,objective,n_points,saturated\n";
  for (const auto& r : results) {
    const auto& fit = r.contains("stage2") ? r["stage2"] : r["stage1"];
    const auto& p = fit["params"];
    auto num = [&](const char* key) { return p.contains(key) ? format_real(p[key].get<double>()) : std::string(); };
    std::string rate = p.contains("eta") ? num("eta") : num("gamma");
    std::string sat;
    for (const auto& s : fit["saturated_bounds"]) sat += (sat.empty() ? "" : ";") + s.get<std::string>();
    out += csv_escape(r["benchmark"].get<std::string>()) + "," + num("A") + "," + num("alpha") + "," + num("B") + "," +
           num("beta") + "," + num("L0") + "," + num("C") + "," + rate + "," +
           format_real(fit["objective"].get<double>()) + "," + std::to_string(fit["n_points"].get<std::size_t>()) +
           "," + csv_escape(sat) + "\n";
  }
  return out;
}

// --- fit -------------------------------------------------------------------

Outputs cmd_fit(const std::string& data_path, const FitFlags& flags, const std::string& out) {
  const FitConfig cfg = flags.config();
  const Dataset data = load_data(data_path);
  ordered_json report = report_header("fit");
  report["data"] = data_info(data);
  report["config"] = to_json(cfg);
  ordered_json results = ordered_json::array();
  for (const auto& bench : distinct_benchmarks(data)) {
    TwoStageFit fit;
    try {
      fit = fit_law(filter(data, RecordFilter{.benchmark = bench}), cfg);
    } catch (const Error& e) {
      throw Error(e.code(), "benchmark '" + bench + "': " + e.detail());
    }
    ordered_json entry;
    entry["benchmark"] = bench;
    entry["stage1"] = to_json(fit.stage1);
    if (cfg.family != LawFamily::two_d) entry["stage2"] = to_json(fit.stage2);
    results.push_back(std::move(entry));
  }
  report["results"] = results;
  Outputs o;
  o.add(with_ext(out, ".json"), dump(report));
  o.add(with_ext(out, ".csv"), fit_summary_csv(results));
  return o;
}

// --- validate --------------------------------------------------------------

struct ValidateFlags {
  std::string data;
  std::string params;
  std::string protocol = "cv";
  int folds = 5;
  int repeats = 5;
  std::string families;
  std::string seeds;
  std::string out;
};

std::vector<std::string> labels_in(const Dataset& d, std::string RunRecord::*field) {
  std::vector<std::string> out;
  for (const auto& r : d)
    if (std::find(out.begin(), out.end(), r.*field) == out.end()) out.push_back(r.*field);
  return out;
}

Outputs cmd_validate(const ValidateFlags& v, const FitFlags& flags) {
  const FitConfig cfg = flags.config();
  const Protocol protocol = usage_guard([&] { return parse_protocol(v.protocol); });
  const Dataset data = load_data(v.data);
  std::optional<std::map<std::string, LawParams>> given;
  if (!v.params.empty()) given = load_params_file(v.params);

  ordered_json report = report_header("validate");
  report["protocol"] = to_string(protocol);
  report["data"] = data_info(data);
  report["config"] = to_json(cfg);
  report["folds"] = v.folds;
  report["repeats"] = v.repeats;
  report["seed"] = flags.seed;

  const auto benchmarks = distinct_benchmarks(data);
  std::map<std::string, ordered_json> rows;  // CSV columns per benchmark
  std::map<std::string, std::map<std::string, std::string>> csv;

  ordered_json results = ordered_json::array();
  if (protocol == Protocol::stability) {
    const auto fams = v.families.empty() ? labels_in(data, &RunRecord::model_family) : split_list(v.families);
    const auto seeds = v.seeds.empty() ? labels_in(data, &RunRecord::seed) : split_list(v.seeds);
    const StabilityReport st = stability_report(data, cfg, fams, seeds, StabilityOptions{v.folds, v.repeats, flags.seed});
    report["families"] = fams;
    report["seeds"] = seeds;
    report["stability"] = to_json(st);
    for (const auto& s : st.summary) {
      csv[s.benchmark]["cv_are"] = format_real(s.cv_mean);
      csv[s.benchmark]["lomo_are"] = format_real(s.lomo_mean);
    }
  } else if (protocol == Protocol::lodo) {
    const ValidationReport r = leave_one_group_out(data, cfg, GroupBy::benchmark);
    report["lodo"] = to_json(r);
    for (const auto& f : r.per_fold) csv[f.held_out_label]["lodo_are"] = format_real(f.are_percent);
  } else {
    for (const auto& bench : benchmarks) {
      const Dataset slice = filter(data, RecordFilter{.benchmark = bench});
      ValidationReport r;
      try {
        r = protocol == Protocol::cv ? cross_validate(slice, cfg, v.folds, v.repeats, flags.seed)
                                     : leave_one_group_out(slice, cfg, GroupBy::model_size);
      } catch (const Error& e) {
        throw Error(e.code(), "benchmark '" + bench + "': " + e.detail());
      }
      csv[bench][protocol == Protocol::cv ? "cv_are" : "lomo_are"] = format_real(r.are_percent);
      results.push_back(ordered_json{{"benchmark", bench}, {"report", to_json(r)}});
    }
  }

  // Full-data parameters for the summary columns.
  ordered_json fits = ordered_json::array();
  for (const auto& bench : benchmarks) {
    const Dataset slice = filter(data, RecordFilter{.benchmark = bench});
    ordered_json entry{{"benchmark", bench}};
    try {
      const LawParams p = fit_law(slice, cfg).final_fit().params;
      entry["params"] = to_json(p);
      csv[bench]["alpha"] = format_real(p.base.alpha);
      csv[bench]["beta"] = format_real(p.base.beta);
      csv[bench]["L0"] = format_real(p.base.L0);
      if (p.family != LawFamily::two_d) csv[bench]["rate"] = format_real(p.rate);
    } catch (const Error& e) {
      entry["params_error"] = e.what();
    }
    if (given) {
      const LawParams& p = params_for(*given, bench);
      std::vector<double> pred, obs;
      for (const auto& rec : slice) {
        pred.push_back(p.predict(static_cast<double>(rec.model_params), static_cast<double>(rec.pretrain_tokens),
                                 static_cast<double>(rec.retrieval_tokens)));
        obs.push_back(rec.loss);
      }
      ordered_json in_sample{{"are_percent", are(pred, obs)}};
      try {
        in_sample["r_squared"] = r_squared(pred, obs);
      } catch (const Error&) {
        in_sample["r_squared"] = nullptr;
      }
      entry["given_params"] = to_json(p);
      entry["given_params_in_sample"] = in_sample;
    }
    fits.push_back(std::move(entry));
  }
  if (!results.empty()) report["results"] = results;
  report["full_data_fits"] = fits;

  std::string table = "benchmark,cv_are,lomo_are,lodo_are,alpha,beta,rate,L0\n";
  for (const auto& bench : benchmarks) {
    auto& c = csv[bench];
    table += csv_escape(bench) + "," + c["cv_are"] + "," + c["lomo_are"] + "," + c["lodo_are"] + "," + c["alpha"] +
             "," + c["beta"] + "," + c["rate"] + "," + c["L0"] + "\n";
  }
  Outputs o;
  o.add(with_ext(v.out, ".json"), dump(report));
  o.add(with_ext(v.out, ".csv"), table);
  return o;
}

// --- tradeoff / allocate / crossover / iso -----------------------------------

std::string single_benchmark(const Dataset& data, const std::string& requested) {
  if (!requested.empty()) return requested;
  const auto benches = distinct_benchmarks(data);
  if (benches.size() != 1)
    throw Error(ErrorCode::invalid_argument, "data holds several benchmarks; pass --benchmark");
  return benches.front();
}

Outputs cmd_tradeoff(const std::string& data_path, const std::string& params_path, const std::string& pairing_text,
                     const std::string& benchmark, const std::string& out) {
  Pairing pairing;
  if (pairing_text == "measured") pairing = Pairing::measured;
  else if (pairing_text == "fitted") pairing = Pairing::fitted;
  else throw UsageError("--pairing must be measured or fitted");
  const Dataset all = load_data(data_path);
  const std::string bench = usage_guard([&] { return single_benchmark(all, benchmark); });
  const Dataset data = filter(all, RecordFilter{.benchmark = bench});
  if (data.empty()) throw Error(ErrorCode::missing_group, "no records for benchmark '" + bench + "'");
  const LawParams p = params_for(load_params_file(params_path), bench);
  const TradeoffTable table = tradeoff_table(data, p.base, p.as_3d(), pairing);

  ordered_json report = report_header("tradeoff");
  report["data"] = data_info(data);
  report["benchmark"] = bench;
  report["pairing"] = pairing_text;
  report["params"] = to_json(p);
  report["table"] = to_json(table);
  Outputs o;
  o.add(with_ext(out, ".json"), dump(report));
  o.add(with_ext(out, ".csv"), tradeoff_csv(table));
  return o;
}

Outputs cmd_allocate(const std::string& params_path, const std::string& benchmark, const std::string& n_text,
                     const std::string& budget_text, const std::string& d_min_text, int resolution,
                     const std::string& out) {
  const double n = real_flag(n_text, "--n");
  const std::int64_t budget = token_flag(budget_text, "--budget");
  const std::int64_t d_min = token_flag(d_min_text, "--d-min");
  if (resolution < 2) throw UsageError("--resolution must be >= 2");
  const LawParams p = params_for(load_params_file(params_path), benchmark);
  const AllocationPlan plan = optimize_split(p.as_3d(), n, budget, d_min, resolution);
  ordered_json report = report_header("allocate");
  report["params"] = to_json(p);
  report["plan"] = to_json(plan);
  Outputs o;
  o.add(with_ext(out, ".json"), dump(report));
  o.add(with_ext(out, ".csv"), frontier_csv(plan.frontier));
  return o;
}

Outputs cmd_crossover(const std::string& points_path, bool linear, const std::string& out) {
  const CsvTable table = parse_csv(read_file(points_path));
  const auto cx = table.column("d_over_n"), cs = table.column("sigma");
  if (!cx || !cs) throw Error(ErrorCode::schema_error, "points file needs columns d_over_n, sigma");
  std::vector<CrossoverPoint> pts;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.size() != table.header.size())
      throw Error(ErrorCode::parse_error, "points row " + std::to_string(i + 1) + ": wrong field count");
    pts.push_back(CrossoverPoint{parse_real(row[*cx]), parse_real(row[*cs])});
  }
  const CrossoverEstimate est = crossover(pts, linear ? CrossoverSpace::linear : CrossoverSpace::log_log);
  ordered_json report = report_header("crossover");
  report["points_file"] = fs::path(points_path).filename().string();
  report["estimate"] = to_json(est);
  std::string csv = "threshold_ratio,slope,intercept,space,n_points_used,excluded_nonpositive\n";
  csv += format_real(est.threshold_ratio) + "," + format_real(est.slope) + "," + format_real(est.intercept) + "," +
         (linear ? "linear" : "log_log") + "," + std::to_string(est.n_points_used) + "," +
         std::to_string(est.excluded_nonpositive) + "\n";
  Outputs o;
  o.add(with_ext(out, ".json"), dump(report));
  o.add(with_ext(out, ".csv"), csv);
  return o;
}

struct IsoFlags {
  std::string params;
  std::string benchmark;
  std::string n_min = "3e7", n_max = "3e9", d_min = "3e7", d_max = "1e11";
  int grid = 32;
  double flops = 6.0;
  std::string out;
};

Outputs cmd_iso(const IsoFlags& f) {
  if (f.grid < 2) throw UsageError("--grid must be >= 2");
  const LawParams p = params_for(load_params_file(f.params), f.benchmark);
  const Range nr{real_flag(f.n_min, "--n-min"), real_flag(f.n_max, "--n-max")};
  const Range dr{real_flag(f.d_min, "--d-min"), real_flag(f.d_max, "--d-max")};
  const IsoSurfaces iso = usage_guard([&] { return iso_surfaces(p.base, nr, dr, f.grid, f.flops); });
  ordered_json report = report_header("iso");
  report["params"] = to_json(p);
  report["flops_per_param_token"] = f.flops;
  report["iso"] = to_json(iso);
  Outputs o;
  o.add(with_ext(f.out, ".json"), dump(report));
  o.add(with_ext(f.out, ".csv"), iso_grid_csv(iso));
  o.add(with_ext(f.out, ".frontier.csv"), compute_frontier_csv(iso));
  return o;
}

// --- budget-select / synth / calibrate -----------------------------------------

Outputs cmd_budget_select(const std::string& catalog_path, std::uint64_t seed, const std::string& budgets_text,
                          const std::string& filter_label, const std::string& out_dir) {
  std::vector<std::int64_t> budgets;
  for (const auto& item : split_list(budgets_text)) budgets.push_back(token_flag(item, "--budgets"));
  if (budgets.empty()) throw UsageError("--budgets needs at least one value");
  const ChunkCatalog catalog = load_catalog(catalog_path);
  const auto manifests = select_budgets(catalog, seed, budgets, filter_label);

  Outputs o;
  ordered_json summary = report_header("budget-select");
  summary["catalog"] = fs::path(catalog_path).filename().string();
  summary["seed"] = seed;
  summary["filter_label"] = filter_label;
  ordered_json entries = ordered_json::array();
  for (const auto& m : manifests) {
    const std::string stem = "manifest_" + std::to_string(m.budget);
    o.add(fs::path(out_dir) / (stem + ".json"), manifest_to_json(m));
    o.add(fs::path(out_dir) / (stem + ".txt"), manifest_to_text(m));
    entries.push_back(ordered_json{{"budget", m.budget}, {"n_selected", m.selected.size()},
                                   {"cumulative_tokens", m.cumulative_tokens}, {"manifest", stem + ".json"}});
  }
  summary["permutation_digest"] = manifests.front().permutation_digest;
  summary["manifests"] = entries;

  std::vector<std::size_t> order(manifests.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return manifests[a].budget < manifests[b].budget; });
  ordered_json checks = ordered_json::array();
  bool all_nested = true;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& small = manifests[order[k - 1]];
    const auto& large = manifests[order[k]];
    const NestingCheck c = verify_nesting(small, large);
    all_nested = all_nested && c.nested;
    checks.push_back(ordered_json{{"small_budget", small.budget}, {"large_budget", large.budget},
                                  {"nested", c.nested}, {"diagnostic", c.diagnostic}});
  }
  summary["nesting"] = checks;
  summary["all_nested"] = all_nested;
  o.add(fs::path(out_dir) / "nesting.json", dump(summary));
  return o;
}

struct SynthFlags {
  std::string spec;
  std::optional<double> noise;
  std::optional<std::uint64_t> seed;
  std::string benchmark;
  std::string seed_label;
  std::string params_out;
  std::string out;
};

Outputs cmd_synth(const SynthFlags& f) {
  SynthSpec spec = f.spec.empty() ? default_grid() : [&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(f.spec));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::parse_error, std::string("synth spec: ") + e.what());
    }
    return synth_spec_from_json(j);
  }();
  if (f.noise) spec.noise_sigma = *f.noise;
  if (f.seed) spec.seed = *f.seed;
  if (!f.benchmark.empty()) spec.benchmark_label = f.benchmark;
  if (!f.seed_label.empty()) spec.seed_label = f.seed_label;
  usage_guard([&] {
    spec.validate();
    return 0;
  });
  const Dataset data = generate(spec);
  Outputs o;
  const fs::path out(f.out);
  o.add(out, format_from_path(out) == DataFormat::json ? to_json(data) : to_csv(data));
  if (!f.params_out.empty()) {
    LawParams planted{spec.planted.family == GainFamily::log_gain ? LawFamily::log_gain : LawFamily::power_gain,
                      spec.planted.base, spec.planted.C, spec.planted.rate};
    ordered_json j = to_json(planted);
    o.add(f.params_out, dump(j));
  }
  return o;
}

Outputs cmd_calibrate(const std::string& data_path, const std::string& params_path, const std::string& out) {
  const Dataset data = load_data(data_path);
  const auto params = load_params_file(params_path);
  std::string csv = "benchmark,n_params,d_tokens,r_tokens,loss,predicted,seed,family\n";
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per_bench;
  std::vector<std::string> order;
  for (const auto& rec : data) {
    const LawParams& p = params_for(params, rec.benchmark);
    const double pred = p.predict(static_cast<double>(rec.model_params), static_cast<double>(rec.pretrain_tokens),
                                  static_cast<double>(rec.retrieval_tokens));
    csv += csv_escape(rec.benchmark) + "," + std::to_string(rec.model_params) + "," +
           std::to_string(rec.pretrain_tokens) + "," + std::to_string(rec.retrieval_tokens) + "," +
           format_real(rec.loss) + "," + format_real(pred) + "," + csv_escape(rec.seed) + "," +
           csv_escape(rec.model_family) + "\n";
    if (!per_bench.count(rec.benchmark)) order.push_back(rec.benchmark);
    per_bench[rec.benchmark].first.push_back(pred);
    per_bench[rec.benchmark].second.push_back(rec.loss);
  }
  ordered_json report = report_header("calibrate");
  report["data"] = data_info(data);
  ordered_json summary = ordered_json::array();
  for (const auto& bench : order) {
    const auto& [pred, obs] = per_bench[bench];
    ordered_json s{{"benchmark", bench}, {"n_points", obs.size()}, {"are_percent", are(pred, obs)}};
    try {
      s["r_squared"] = r_squared(pred, obs);
    } catch (const Error&) {
      s["r_squared"] = nullptr;
    }
    summary.push_back(std::move(s));
  }
  report["summary"] = summary;
  Outputs o;
  o.add(with_ext(out, ".csv"), csv);
  o.add(with_ext(out, ".json"), dump(report));
  return o;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ragscale: scaling laws for pretraining vs. retrieval data budgets"};
  app.name(args.empty() ? "ragscale" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);

  std::function<Outputs()> action;
  std::string command;

  // fit
  auto* fit = app.add_subcommand("fit", "Fit scaling laws per benchmark");
  std::string fit_data, fit_out;
  FitFlags fit_flags;
  fit->add_option("--data", fit_data, "Dataset (csv or json)")->required();
  fit->add_option("--out", fit_out, "Report path (.json and .csv written)")->required();
  fit_flags.attach(fit);
  fit->callback([&] { action = [&] { return cmd_fit(fit_data, fit_flags, fit_out); }; });

  // validate
  auto* val = app.add_subcommand("validate", "Cross-validation, LOMO, LODO and stability reports");
  ValidateFlags vf;
  FitFlags val_flags;
  val->add_option("--data", vf.data, "Dataset (csv or json)")->required();
  val->add_option("--params", vf.params, "Optional params JSON; adds in-sample fit quality");
  val->add_option("--protocol", vf.protocol, "cv | lomo | lodo | stability")->capture_default_str();
  val->add_option("--folds", vf.folds, "CV folds")->capture_default_str();
  val->add_option("--repeats", vf.repeats, "CV repeats")->capture_default_str();
  val->add_option("--families", vf.families, "Stability: comma-separated family labels (default: all)");
  val->add_option("--seeds", vf.seeds, "Stability: comma-separated seed labels (default: all)");
  val->add_option("--out", vf.out, "Report path (.json and .csv written)")->required();
  val_flags.attach(val);
  val->callback([&] { action = [&] { return cmd_validate(vf, val_flags); }; });

  // tradeoff
  auto* tr = app.add_subcommand("tradeoff", "Substitutability and marginal benefit table");
  std::string tr_data, tr_params, tr_pairing = "measured", tr_bench, tr_out;
  tr->add_option("--data", tr_data, "Dataset (csv or json)")->required();
  tr->add_option("--params", tr_params, "Params JSON or fit report")->required();
  tr->add_option("--pairing", tr_pairing, "measured | fitted")->capture_default_str();
  tr->add_option("--benchmark", tr_bench, "Benchmark to tabulate (required when several are present)");
  tr->add_option("--out", tr_out, "Report path (.json and .csv written)")->required();
  tr->callback([&] { action = [&] { return cmd_tradeoff(tr_data, tr_params, tr_pairing, tr_bench, tr_out); }; });

  // allocate
  auto* al = app.add_subcommand("allocate", "Optimal pretraining/retrieval split of a token budget");
  std::string al_params, al_bench, al_n, al_budget, al_dmin = "1000000", al_out;
  int al_res = 512;
  al->add_option("--params", al_params, "Params JSON or fit report")->required();
  al->add_option("--benchmark", al_bench, "Benchmark entry in a fit report");
  al->add_option("--n", al_n, "Model parameters")->required();
  al->add_option("--budget", al_budget, "Total tokens D + R")->required();
  al->add_option("--d-min", al_dmin, "Smallest pretraining budget considered")->capture_default_str();
  al->add_option("--resolution", al_res, "Frontier samples")->capture_default_str();
  al->add_option("--out", al_out, "Report path (.json and frontier .csv written)")->required();
  al->callback([&] {
    action = [&] { return cmd_allocate(al_params, al_bench, al_n, al_budget, al_dmin, al_res, al_out); };
  });

  // crossover
  auto* cx = app.add_subcommand("crossover", "D/N threshold where substitutability reaches 1");
  std::string cx_points, cx_out;
  bool cx_linear = false;
  cx->add_option("--points", cx_points, "CSV with columns d_over_n, sigma")->required();
  cx->add_flag("--linear", cx_linear, "Regress in linear space instead of log-log");
  cx->add_option("--out", cx_out, "Report path (.json and .csv written)")->required();
  cx->callback([&] { action = [&] { return cmd_crossover(cx_points, cx_linear, cx_out); }; });

  // iso
  auto* iso = app.add_subcommand("iso", "Iso-loss grid and compute-efficient frontier");
  IsoFlags isf;
  iso->add_option("--params", isf.params, "Params JSON or fit report")->required();
  iso->add_option("--benchmark", isf.benchmark, "Benchmark entry in a fit report");
  iso->add_option("--n-min", isf.n_min)->capture_default_str();
  iso->add_option("--n-max", isf.n_max)->capture_default_str();
  iso->add_option("--d-min", isf.d_min)->capture_default_str();
  iso->add_option("--d-max", isf.d_max)->capture_default_str();
  iso->add_option("--grid", isf.grid, "Samples per axis and iso-compute budgets")->capture_default_str();
  iso->add_option("--flops-per-param-token", isf.flops, "Compute constant k in k*N*D")->capture_default_str();
  iso->add_option("--out", isf.out, "Report path (.json, .csv, .frontier.csv written)")->required();
  iso->callback([&] { action = [&] { return cmd_iso(isf); }; });

  // budget-select
  auto* bs = app.add_subcommand("budget-select", "Nested-prefix datastore selection for token budgets");
  std::string bs_catalog, bs_budgets, bs_label, bs_dir;
  std::uint64_t bs_seed = 42;
  bs->add_option("--catalog", bs_catalog, "Chunk catalog (csv or json)")->required();
  bs->add_option("--seed", bs_seed, "Permutation seed")->capture_default_str();
  bs->add_option("--budgets", bs_budgets, "Comma-separated token budgets, e.g. 30e6,60e6")->required();
  bs->add_option("--filter-label", bs_label, "Opaque filtering-config label recorded in manifests");
  bs->add_option("--out-dir", bs_dir, "Directory for manifests")->required();
  bs->callback([&] { action = [&] { return cmd_budget_select(bs_catalog, bs_seed, bs_budgets, bs_label, bs_dir); }; });

  // synth
  auto* sy = app.add_subcommand("synth", "Planted-parameter synthetic dataset");
  SynthFlags sf;
  sy->add_option("--spec", sf.spec, "Synth spec JSON (default grid when omitted)");
  sy->add_option("--noise", sf.noise, "Lognormal noise sigma");
  sy->add_option("--seed", sf.seed, "Noise seed");
  sy->add_option("--benchmark", sf.benchmark, "Benchmark label");
  sy->add_option("--seed-label", sf.seed_label, "Seed label written to records");
  sy->add_option("--params-out", sf.params_out, "Also write the planted params JSON here");
  sy->add_option("--out", sf.out, "Dataset path (.csv or .json)")->required();
  sy->callback([&] { action = [&] { return cmd_synth(sf); }; });

  // calibrate
  auto* ca = app.add_subcommand("calibrate", "Observed vs. predicted pairs");
  std::string ca_data, ca_params, ca_out;
  ca->add_option("--data", ca_data, "Dataset (csv or json)")->required();
  ca->add_option("--params", ca_params, "Params JSON or fit report")->required();
  ca->add_option("--out", ca_out, "Report path (.csv and .json written)")->required();
  ca->callback([&] { action = [&] { return cmd_calibrate(ca_data, ca_params, ca_out); }; });

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  for (auto* sub : app.get_subcommands()) command = sub->get_name();
  try {
    const Outputs outputs = action();
    outputs.flush();
    if (!outputs.empty()) out << command << ": wrote " << outputs.primary().string() << "\n";
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << command << ": " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << command << ": " << e.what() << "\n";
    return kExitDomain;
  }
}

}  // namespace ragscale::cli
