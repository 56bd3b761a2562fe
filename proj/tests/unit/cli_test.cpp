#include <sstream>

#include "../support.hpp"
#include "cli.hpp"

namespace ragscale {
namespace {

namespace fs = std::filesystem;

struct Invocation {
  int code = 0;
  std::string out;
  std::string err;
};

Invocation run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ragscale");
  std::ostringstream out, err;
  Invocation r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string synth(const std::string& name, double noise = 0.0) {
    const auto r = run_cli({"synth", "--noise", format_real(noise), "--out", path(name), "--params-out",
                            path("planted.json")});
    EXPECT_EQ(r.code, 0) << r.err;
    return path(name);
  }
  fs::path dir_;
};

TEST_F(Cli, MissingDataIsUsageError) {
  const auto r = run_cli({"fit", "--out", path("x")});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("--data"), std::string::npos);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
}

TEST_F(Cli, BadNumericFlagIsUsageError) {
  const auto r = run_cli({"allocate", "--params", path("p.json"), "--n", "1e9", "--budget", "lots", "--out", path("a")});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"fit", "--data", path("d.csv"), "--family", "cubic", "--out", path("f")}).code, cli::kExitUsage);
}

TEST_F(Cli, FitRecoversPlanted) {
  const std::string data = synth("d.csv");
  const auto r = run_cli({"fit", "--data", data, "--out", path("fit"), "--starts", "16"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(read_file(path("fit.json")));
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_EQ(j["config"]["n_starts"], 16);
  const auto& p = j["results"][0]["stage2"]["params"];
  EXPECT_NEAR(p["A"].get<double>(), 2.5, 0.025);
  EXPECT_NEAR(p["C"].get<double>(), 0.3, 0.003);
  EXPECT_NEAR(p["eta"].get<double>(), 0.9, 0.02);
  EXPECT_TRUE(fs::exists(path("fit.csv")));
  EXPECT_EQ(j["data"]["file"], "d.csv");
}

TEST_F(Cli, RetrievalFamilyOnBaselineOnlyData) {
  SynthSpec s = default_grid();
  s.r_values = {0};
  write_file(path("base.csv"), to_csv(generate(s)));
  const auto r = run_cli({"fit", "--data", path("base.csv"), "--out", path("fit")});
  EXPECT_EQ(r.code, cli::kExitDomain);
  EXPECT_NE(r.err.find("InsufficientData"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("synthetic"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("fit.json")));
  EXPECT_FALSE(fs::exists(path("fit.csv")));
}

TEST_F(Cli, ValidateCvAndDeterminism) {
  const std::string data = synth("d.csv");
  const std::vector<std::string> args = {"validate", "--data", data, "--protocol", "cv", "--repeats", "1",
                                         "--starts", "8"};
  auto a = args, b = args;
  a.insert(a.end(), {"--out", path("v1")});
  b.insert(b.end(), {"--out", path("v2")});
  ASSERT_EQ(run_cli(a).code, 0);
  ASSERT_EQ(run_cli(b).code, 0);
  EXPECT_EQ(read_file(path("v1.json")), read_file(path("v2.json")));
  EXPECT_EQ(read_file(path("v1.csv")), read_file(path("v2.csv")));
  const auto j = nlohmann::json::parse(read_file(path("v1.json")));
  EXPECT_LT(j["results"][0]["report"]["are_percent"].get<double>(), 0.5);
}

TEST_F(Cli, LomoWithOneModelSize) {
  SynthSpec s = default_grid();
  s.n_values = {1'000'000'000};
  write_file(path("one.csv"), to_csv(generate(s)));
  const auto r = run_cli({"validate", "--data", path("one.csv"), "--protocol", "lomo", "--out", path("v")});
  EXPECT_EQ(r.code, cli::kExitDomain);
  EXPECT_NE(r.err.find("SingleGroup"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("v.json")));
}

TEST_F(Cli, AllocateWithoutRetrievalGain) {
  write_file(path("p.json"), R"({"family":"log_gain","A":2.5,"alpha":0.35,"B":1.8,"beta":0.28,"L0":1.1,"C":0,"eta":0.9})");
  const auto r = run_cli({"allocate", "--params", path("p.json"), "--n", "1e9", "--budget", "2e10", "--out", path("a")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(read_file(path("a.json")));
  EXPECT_EQ(j["plan"]["r_star"], 0);
  EXPECT_EQ(j["plan"]["d_star"], 20'000'000'000LL);
  const CsvTable frontier = parse_csv(read_file(path("a.csv")));
  EXPECT_EQ(frontier.header, (std::vector<std::string>{"d", "r", "loss"}));
  EXPECT_EQ(frontier.rows.size(), 512u);
}

TEST_F(Cli, CrossoverOnPlantedPoints) {
  std::string text = "d_over_n,sigma\n";
  for (double x : {1.0, 2.0, 5.0, 10.0, 30.0, 100.0})
    text += format_real(x) + "," + format_real(std::pow(x / 4.14, 1.2)) + "\n";
  write_file(path("pts.csv"), text);
  const auto r = run_cli({"crossover", "--points", path("pts.csv"), "--out", path("c")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(read_file(path("c.json")));
  EXPECT_NEAR(j["estimate"]["threshold_ratio"].get<double>(), 4.14, 4.14e-3);
}

TEST_F(Cli, IsoCornersOnUnitParams) {
  write_file(path("u.json"), R"({"family":"two_d","A":1,"alpha":1,"B":1,"beta":1,"L0":1})");
  const auto r = run_cli({"iso", "--params", path("u.json"), "--n-min", "1e8", "--n-max", "1e10", "--d-min", "1e9",
                          "--d-max", "1e11", "--grid", "5", "--out", path("iso")});
  ASSERT_EQ(r.code, 0) << r.err;
  const CsvTable grid = parse_csv(read_file(path("iso.csv")));
  EXPECT_EQ(grid.header, (std::vector<std::string>{"n", "d", "loss"}));
  ASSERT_EQ(grid.rows.size(), 25u);
  EXPECT_NEAR(parse_real(grid.rows.front()[2]), 10 + 1 + 1, 1e-12);
  EXPECT_NEAR(parse_real(grid.rows[4][2]), 10 + 0.01 + 1, 1e-12);
  EXPECT_NEAR(parse_real(grid.rows.back()[2]), 0.1 + 0.01 + 1, 1e-12);
  EXPECT_TRUE(fs::exists(path("iso.frontier.csv")));
}

TEST_F(Cli, TradeoffTable) {
  const std::string data = synth("d.csv");
  const auto r = run_cli({"tradeoff", "--data", data, "--params", path("planted.json"), "--out", path("t")});
  ASSERT_EQ(r.code, 0) << r.err;
  const CsvTable t = parse_csv(read_file(path("t.csv")));
  EXPECT_EQ(t.header, (std::vector<std::string>{"n", "d", "r", "loss_baseline", "loss_rag", "d_eff", "sigma", "kappa",
                                                "regime"}));
  EXPECT_EQ(t.rows.size(), 36u);
}

TEST_F(Cli, BudgetSelectNested) {
  std::string cat = "chunk_id,token_count\n";
  for (int i = 0; i < 1500; ++i) cat += "doc" + std::to_string(i) + "," + std::to_string(40'000 + (i * 37) % 30'000) + "\n";
  write_file(path("cat.csv"), cat);
  const auto r = run_cli({"budget-select", "--catalog", path("cat.csv"), "--budgets", "30e6,60e6", "--out-dir",
                          path("m")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(read_file(path("m/nesting.json")));
  EXPECT_TRUE(j["all_nested"].get<bool>());
  const SelectionManifest small = manifest_from_json(read_file(path("m/manifest_30000000.json")));
  const SelectionManifest large = manifest_from_json(read_file(path("m/manifest_60000000.json")));
  EXPECT_TRUE(verify_nesting(small, large).nested);
  EXPECT_EQ(read_file(path("m/manifest_30000000.txt")), manifest_to_text(small));

  const auto too_big = run_cli({"budget-select", "--catalog", path("cat.csv"), "--budgets", "1e12", "--out-dir",
                                path("m2")});
  EXPECT_EQ(too_big.code, cli::kExitDomain);
  EXPECT_NE(too_big.err.find("BudgetExceedsCorpus"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("m2")));
}

TEST_F(Cli, CalibrateRoundTrip) {
  const std::string data = synth("d.csv");
  const auto r = run_cli({"calibrate", "--data", data, "--params", path("planted.json"), "--out", path("cal")});
  ASSERT_EQ(r.code, 0) << r.err;
  const CsvTable t = parse_csv(read_file(path("cal.csv")));
  ASSERT_EQ(t.rows.size(), 180u);
  const auto loss = *t.column("loss"), pred = *t.column("predicted");
  for (const auto& row : t.rows) EXPECT_EQ(row[loss], row[pred]);
  EXPECT_EQ(load_dataset(path("cal.csv")), load_dataset(data));
}

TEST_F(Cli, SynthJsonAndSpec) {
  SynthSpec s = default_grid();
  s.n_values = {30'000'000, 1'000'000'000};
  write_file(path("spec.json"), dump(to_json(s)));
  ASSERT_EQ(run_cli({"synth", "--spec", path("spec.json"), "--out", path("d.json")}).code, 0);
  EXPECT_EQ(load_dataset(path("d.json")), generate(s));
}

}  // namespace
}  // namespace ragscale
