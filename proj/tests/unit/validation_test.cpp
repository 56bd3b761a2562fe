#include <map>
#include <set>

#include "../support.hpp"

namespace ragscale {
namespace {

FitConfig quick_config() {
  FitConfig cfg;
  cfg.n_starts = 8;
  return cfg;
}

TEST(Validation, AreHandCases) {
  EXPECT_EQ(are(std::vector<double>{1, 2}, std::vector<double>{1, 2}), 0.0);
  EXPECT_DOUBLE_EQ(are(std::vector<double>{2.0}, std::vector<double>{1.0}), 100.0);
  EXPECT_NEAR(are(std::vector<double>{1.1, 0.9}, std::vector<double>{1.0, 1.0}), 10.0, 1e-12);
  EXPECT_THROW_CODE(are(std::vector<double>{}, std::vector<double>{}), ErrorCode::empty_input);
  EXPECT_THROW_CODE(are(std::vector<double>{1}, std::vector<double>{1, 2}), ErrorCode::length_mismatch);
}

TEST(Validation, AreScaleInvariant) {
  SplitMix64 rng(1);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> p(10), o(10), cp, co;
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = testing::log_uniform(rng, 0.5, 5);
      o[i] = testing::log_uniform(rng, 0.5, 5);
    }
    const double c = testing::log_uniform(rng, 1e-3, 1e3);
    for (std::size_t i = 0; i < p.size(); ++i) {
      cp.push_back(c * p[i]);
      co.push_back(c * o[i]);
    }
    EXPECT_LE(testing::rel_err(are(cp, co), are(p, o)), 1e-12);
  }
}

TEST(Validation, RSquaredHandCases) {
  const std::vector<double> obs{1, 2, 3};
  EXPECT_EQ(r_squared(obs, obs), 1.0);
  EXPECT_EQ(r_squared(std::vector<double>{2, 2, 2}, obs), 0.0);
  EXPECT_DOUBLE_EQ(r_squared(std::vector<double>{1, 2, 4}, obs), 0.5);
  EXPECT_THROW_CODE(r_squared(std::vector<double>{1, 2}, std::vector<double>{3, 3}), ErrorCode::zero_variance);
}

TEST(Validation, FoldAssignmentBalancedAndSeeded) {
  for (std::size_t n : {5u, 7u, 36u, 180u, 181u}) {
    const auto folds = assign_folds(n, 5, 42);
    ASSERT_EQ(folds.size(), n);
    std::vector<int> sizes(5, 0);
    for (int f : folds) {
      ASSERT_GE(f, 0);
      ASSERT_LT(f, 5);
      ++sizes[f];
    }
    EXPECT_LE(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()), 1);
    EXPECT_EQ(assign_folds(n, 5, 42), folds);
  }
  EXPECT_NE(assign_folds(180, 5, 42), assign_folds(180, 5, 43));
  EXPECT_THROW_CODE(assign_folds(3, 5, 1), ErrorCode::insufficient_data);
}

TEST(Validation, CrossValidateNoiseless) {
  const Dataset d = generate(testing::small_grid());
  const ValidationReport r = cross_validate(d, quick_config(), 5, 2, 42);
  EXPECT_LT(r.are_percent, 0.5);
  EXPECT_GT(r.r_squared, 0.999);
  EXPECT_EQ(r.per_fold.size(), 10u);
  std::size_t held = 0;
  for (const auto& f : r.per_fold) held += f.n_points;
  EXPECT_EQ(held, 2 * d.size());
  EXPECT_EQ(r.protocol, Protocol::cv);
  EXPECT_EQ(r.seed, 42u);
}

TEST(Validation, CrossValidateDeterministic) {
  SynthSpec s = testing::small_grid();
  s.noise_sigma = 0.02;
  const Dataset d = generate(s);
  const auto a = dump(to_json(cross_validate(d, quick_config(), 5, 2, 7)));
  const auto b = dump(to_json(cross_validate(d, quick_config(), 5, 2, 7)));
  EXPECT_EQ(a, b);
}

TEST(Validation, LomoFoldsPerModelSize) {
  const Dataset d = generate(testing::small_grid());
  const ValidationReport r = leave_one_group_out(d, quick_config(), GroupBy::model_size);
  ASSERT_EQ(r.per_fold.size(), 4u);
  EXPECT_EQ(r.per_fold[0].held_out_label, "30000000");
  EXPECT_EQ(r.per_fold[3].held_out_label, "3000000000");
  EXPECT_LT(r.are_percent, 1.0);
  EXPECT_EQ(r.protocol, Protocol::lomo);
}

TEST(Validation, LomoSingleGroup) {
  SynthSpec s = testing::small_grid();
  s.n_values = {1'000'000'000};
  EXPECT_THROW_CODE(leave_one_group_out(generate(s), quick_config(), GroupBy::model_size),
                    ErrorCode::single_group);
}

TEST(Validation, LodoPoolsOtherBenchmarks) {
  std::vector<RunRecord> recs;
  for (const char* bench : {"arc", "sciq", "piqa"}) {
    SynthSpec s = testing::small_grid();
    s.benchmark_label = bench;
    for (const auto& r : generate(s)) recs.push_back(r);
  }
  const ValidationReport r = leave_one_group_out(Dataset::create(recs), quick_config(), GroupBy::benchmark);
  ASSERT_EQ(r.per_fold.size(), 3u);
  EXPECT_EQ(r.per_fold[1].held_out_label, "sciq");
  EXPECT_LT(r.are_percent, 0.5);
  EXPECT_EQ(r.protocol, Protocol::lodo);
  EXPECT_FALSE(r.notes.empty());
}

Dataset seeded_families(double noise_for_seed2) {
  std::vector<RunRecord> recs;
  const std::vector<std::pair<std::string, std::vector<std::int64_t>>> fams = {
      {"small", {30'000'000, 136'000'000}}, {"mid", {233'000'000, 728'000'000}}, {"large", {1'000'000'000, 3'000'000'000}}};
  for (const auto& [fam, sizes] : fams)
    for (const char* seed : {"s1", "s2"}) {
      SynthSpec s = testing::small_grid();
      s.n_values = sizes;
      s.seed_label = seed;
      s.noise_sigma = std::string(seed) == "s2" ? noise_for_seed2 : 0.0;
      for (auto r : generate(s)) {
        r.model_family = fam;
        recs.push_back(r);
      }
    }
  return Dataset::create(recs);
}

TEST(Validation, StabilityEnumeratesSubsets) {
  const Dataset d = seeded_families(0.0);
  const StabilityReport r =
      stability_report(d, quick_config(), {"small", "mid", "large"}, {"s1", "s2"}, StabilityOptions{5, 1, 42});
  ASSERT_EQ(r.rows.size(), 8u);
  std::set<std::string> ids;
  for (const auto& row : r.rows) ids.insert(row.subset_id);
  EXPECT_EQ(ids.size(), 8u);
  ASSERT_EQ(r.summary.size(), 1u);
  EXPECT_EQ(r.summary[0].subsets, 8u);
  // Identical data under both seed labels.
  EXPECT_LT(r.summary[0].cv_std, 1e-6);
  EXPECT_LT(r.summary[0].lomo_std, 1e-6);
}

TEST(Validation, StabilitySpreadWithNoisySeed) {
  const Dataset d = seeded_families(0.02);
  const StabilityReport r =
      stability_report(d, quick_config(), {"small", "mid", "large"}, {"s1", "s2"}, StabilityOptions{5, 1, 42});
  EXPECT_GT(r.summary[0].cv_std, 0.0);
  EXPECT_GT(r.summary[0].cv_mean, 0.0);
  EXPECT_LT(r.summary[0].cv_mean, 4.0);
}

TEST(Validation, StabilityMissingGroup) {
  const Dataset d = seeded_families(0.0);
  EXPECT_THROW_CODE(stability_report(d, quick_config(), {"small", "huge"}, {"s1"}), ErrorCode::missing_group);
  EXPECT_THROW_CODE(stability_report(d, quick_config(), {"small"}, {"s9"}), ErrorCode::missing_group);
}

TEST(Validation, StabilitySubsetCountIsProduct) {
  // 3 families x 3 seeds: one seed per family gives 27 subsets.
  std::vector<RunRecord> recs;
  const std::vector<std::pair<std::string, std::vector<std::int64_t>>> fams = {
      {"a", {30'000'000, 233'000'000}}, {"b", {1'000'000'000}}, {"c", {3'000'000'000}}};
  for (const auto& [fam, sizes] : fams)
    for (const char* seed : {"1", "2", "3"}) {
      SynthSpec s = testing::small_grid();
      s.n_values = sizes;
      s.seed_label = seed;
      s.r_values = {0, 20'000'000'000};
      for (auto r : generate(s)) {
        r.model_family = fam;
        recs.push_back(r);
      }
    }
  FitConfig cfg = quick_config();
  cfg.n_starts = 2;
  const auto r = stability_report(Dataset::create(recs), cfg, {"a", "b", "c"}, {"1", "2", "3"},
                                  StabilityOptions{3, 1, 42});
  EXPECT_EQ(r.rows.size(), 27u);
}

}  // namespace
}  // namespace ragscale
