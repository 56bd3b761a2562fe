#include "ragscale/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ragscale/error.hpp"
#include "ragscale/rng.hpp"

namespace ragscale {

std::string_view to_string(Protocol protocol) noexcept {
  switch (protocol) {
    case Protocol::cv: return "cv";
    case Protocol::lomo: return "lomo";
    case Protocol::lodo: return "lodo";
    case Protocol::stability: return "stability";
  }
  return "cv";
}

Protocol parse_protocol(std::string_view text) {
  if (text == "cv") return Protocol::cv;
  if (text == "lomo") return Protocol::lomo;
  if (text == "lodo") return Protocol::lodo;
  if (text == "stability") return Protocol::stability;
  throw Error(ErrorCode::invalid_argument, "unknown protocol '" + std::string(text) + "'");
}

namespace {

void check_pair(std::span<const double> pred, std::span<const double> obs) {
  if (pred.size() != obs.size())
    throw Error(ErrorCode::length_mismatch,
                std::to_string(pred.size()) + " predictions vs " + std::to_string(obs.size()) + " observations");
  if (obs.empty()) throw Error(ErrorCode::empty_input, "no observations");
}

}  // namespace

double are(std::span<const double> pred, std::span<const double> obs) {
  check_pair(pred, obs);
  double sum = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (!(obs[i] > 0.0)) throw Error(ErrorCode::domain_error, "observations must be positive");
    sum += std::fabs((pred[i] - obs[i]) / obs[i]);
  }
  return 100.0 * sum / static_cast<double>(obs.size());
}

double r_squared(std::span<const double> pred, std::span<const double> obs) {
  check_pair(pred, obs);
  const double mean = std::accumulate(obs.begin(), obs.end(), 0.0) / static_cast<double>(obs.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    ss_res += (obs[i] - pred[i]) * (obs[i] - pred[i]);
    ss_tot += (obs[i] - mean) * (obs[i] - mean);
  }
  if (ss_tot == 0.0) throw Error(ErrorCode::zero_variance, "observations have zero variance");
  return 1.0 - ss_res / ss_tot;
}

std::vector<int> assign_folds(std::size_t n, int folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorCode::invalid_argument, "need at least 2 folds");
  if (n < static_cast<std::size_t>(folds))
    throw Error(ErrorCode::insufficient_data, std::to_string(n) + " rows cannot fill " + std::to_string(folds) + " folds");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(seed);
  shuffle_indices(order, rng);
  std::vector<int> fold_of(n);
  const auto k = static_cast<std::size_t>(folds);
  for (std::size_t f = 0; f < k; ++f) {
    // Contiguous slices of the shuffled order: sizes floor(n/k) or ceil(n/k).
    const std::size_t begin = f * n / k, end = (f + 1) * n / k;
    for (std::size_t i = begin; i < end; ++i) fold_of[order[i]] = static_cast<int>(f);
  }
  return fold_of;
}

namespace {

struct HeldOut {
  std::vector<double> pred;
  std::vector<double> obs;
};

HeldOut predict_rows(const LawParams& params, const Dataset& rows) {
  HeldOut h;
  for (const auto& rec : rows) {
    h.pred.push_back(params.predict(static_cast<double>(rec.model_params), static_cast<double>(rec.pretrain_tokens),
                                    static_cast<double>(rec.retrieval_tokens)));
    h.obs.push_back(rec.loss);
  }
  return h;
}

/// Fits on `train`, predicts `test`; fold failures name the fold.
HeldOut run_fold(const Dataset& train, const Dataset& test, const FitConfig& cfg, const std::string& label) {
  try {
    const TwoStageFit fit = fit_law(train, cfg);
    return predict_rows(fit.final_fit().params, test);
  } catch (const Error& e) {
    throw Error(e.code(), "fold '" + label + "': " + e.detail());
  }
}

double pooled_r_squared(const HeldOut& all) {
  try {
    return r_squared(all.pred, all.obs);
  } catch (const Error&) {
    return 0.0;
  }
}

Dataset restrict_for_family(const Dataset& data, const FitConfig& cfg) {
  return cfg.family == LawFamily::two_d ? filter(data, RecordFilter{.r_equals_zero = true}) : data;
}

}  // namespace

ValidationReport cross_validate(const Dataset& source, const FitConfig& cfg, int folds, int repeats,
                                std::uint64_t seed) {
  if (repeats < 1) throw Error(ErrorCode::invalid_argument, "repeats must be >= 1");
  const Dataset data = restrict_for_family(source, cfg);
  ValidationReport report;
  report.protocol = Protocol::cv;
  report.seed = seed;
  report.folds = folds;
  report.repeats = repeats;
  report.notes.push_back("r_squared pooled over all held-out predictions");

  HeldOut pooled;
  for (int rep = 0; rep < repeats; ++rep) {
    const auto fold_of = assign_folds(data.size(), folds, derive_seed(seed, static_cast<std::uint64_t>(rep)));
    for (int f = 0; f < folds; ++f) {
      std::vector<std::size_t> train_idx, test_idx;
      for (std::size_t i = 0; i < data.size(); ++i) (fold_of[i] == f ? test_idx : train_idx).push_back(i);
      const std::string label = "repeat " + std::to_string(rep) + " fold " + std::to_string(f);
      const HeldOut h = run_fold(data.subset(train_idx), data.subset(test_idx), cfg, label);
      report.per_fold.push_back(FoldResult{label, test_idx.size(), are(h.pred, h.obs)});
      pooled.pred.insert(pooled.pred.end(), h.pred.begin(), h.pred.end());
      pooled.obs.insert(pooled.obs.end(), h.obs.begin(), h.obs.end());
    }
  }
  double sum = 0.0;
  for (const auto& f : report.per_fold) sum += f.are_percent;
  report.are_percent = sum / static_cast<double>(report.per_fold.size());
  report.r_squared = pooled_r_squared(pooled);
  return report;
}

ValidationReport leave_one_group_out(const Dataset& source, const FitConfig& cfg, GroupBy group_by) {
  const Dataset data = restrict_for_family(source, cfg);
  ValidationReport report;
  report.protocol = group_by == GroupBy::model_size ? Protocol::lomo : Protocol::lodo;
  report.seed = cfg.seed;
  report.repeats = 1;
  report.notes.push_back("r_squared pooled over all held-out predictions");
  if (group_by == GroupBy::benchmark)
    report.notes.push_back("lodo refits one shared law on the remaining benchmarks pooled together");

  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> members;
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& rec = data[i];
    const std::string label =
        group_by == GroupBy::model_size ? std::to_string(rec.model_params) : rec.benchmark;
    auto [it, inserted] = slot.emplace(label, labels.size());
    if (inserted) {
      labels.push_back(label);
      members.emplace_back();
    }
    members[it->second].push_back(i);
  }
  if (labels.size() < 2) {
    throw Error(ErrorCode::single_group, std::string("need at least two distinct ") +
                                             (group_by == GroupBy::model_size ? "model sizes" : "benchmarks") +
                                             ", found " + std::to_string(labels.size()));
  }
  report.folds = static_cast<int>(labels.size());

  HeldOut pooled;
  for (std::size_t g = 0; g < labels.size(); ++g) {
    std::vector<std::size_t> train_idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& rec = data[i];
      const std::string label = group_by == GroupBy::model_size ? std::to_string(rec.model_params) : rec.benchmark;
      if (label != labels[g]) train_idx.push_back(i);
    }
    const HeldOut h = run_fold(data.subset(train_idx), data.subset(members[g]), cfg, labels[g]);
    report.per_fold.push_back(FoldResult{labels[g], members[g].size(), are(h.pred, h.obs)});
    pooled.pred.insert(pooled.pred.end(), h.pred.begin(), h.pred.end());
    pooled.obs.insert(pooled.obs.end(), h.obs.begin(), h.obs.end());
  }
  double sum = 0.0;
  for (const auto& f : report.per_fold) sum += f.are_percent;
  report.are_percent = sum / static_cast<double>(report.per_fold.size());
  report.r_squared = pooled_r_squared(pooled);
  return report;
}

namespace {

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
  mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() < 2) {
    sd = 0.0;
    return;
  }
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

StabilityReport stability_report(const Dataset& data, const FitConfig& cfg, const std::vector<std::string>& families,
                                 const std::vector<std::string>& seeds, const StabilityOptions& options) {
  if (families.empty() || seeds.empty()) throw Error(ErrorCode::missing_group, "need at least one family and one seed");
  for (const auto& fam : families) {
    for (const auto& s : seeds) {
      if (filter(data, RecordFilter{.family = fam, .seed = s}).empty())
        throw Error(ErrorCode::missing_group, "no records for family '" + fam + "' with seed '" + s + "'");
    }
  }

  StabilityReport report;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per_benchmark;
  std::vector<std::string> benchmark_order;

  // Odometer over one seed index per family.
  std::vector<std::size_t> pick(families.size(), 0);
  for (;;) {
    std::string subset_id;
    for (std::size_t f = 0; f < families.size(); ++f) {
      if (f) subset_id += ';';
      subset_id += families[f] + "=" + seeds[pick[f]];
    }
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
      for (std::size_t f = 0; f < families.size(); ++f) {
        if (data[i].model_family == families[f] && data[i].seed == seeds[pick[f]]) {
          idx.push_back(i);
          break;
        }
      }
    }
    const Dataset subset = data.subset(idx);
    for (const auto& bench : distinct_benchmarks(subset)) {
      const Dataset slice = filter(subset, RecordFilter{.benchmark = bench});
      const double cv = cross_validate(slice, cfg, options.folds, options.repeats, options.seed).are_percent;
      const double lomo = leave_one_group_out(slice, cfg, GroupBy::model_size).are_percent;
      report.rows.push_back(StabilityRow{subset_id, bench, cv, lomo});
      if (!per_benchmark.count(bench)) benchmark_order.push_back(bench);
      per_benchmark[bench].first.push_back(cv);
      per_benchmark[bench].second.push_back(lomo);
    }

    std::size_t f = 0;
    while (f < pick.size() && ++pick[f] == seeds.size()) pick[f++] = 0;
    if (f == pick.size()) break;
  }

  for (const auto& bench : benchmark_order) {
    const auto& [cvs, lomos] = per_benchmark[bench];
    StabilitySummary s;
    s.benchmark = bench;
    s.subsets = cvs.size();
    mean_std(cvs, s.cv_mean, s.cv_std);
    mean_std(lomos, s.lomo_mean, s.lomo_std);
    report.summary.push_back(s);
  }
  return report;
}

}  // namespace ragscale
