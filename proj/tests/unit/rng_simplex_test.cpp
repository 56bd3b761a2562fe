#include <map>
#include <numeric>

#include "../support.hpp"
#include "ragscale/parallel.hpp"
#include "ragscale/simplex.hpp"

namespace ragscale {
namespace {

TEST(Rng, SplitMixReferenceValues) {
  // Reference outputs of the published splitmix64 for seed 1234567.
  SplitMix64 rng(1234567);
  EXPECT_EQ(rng.next(), 6457827717110365317ULL);
  EXPECT_EQ(rng.next(), 3203168211198807973ULL);
  EXPECT_EQ(rng.next(), 9817491932198370423ULL);
}

TEST(Rng, UniformAndBelowRanges) {
  SplitMix64 rng(5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ++counts[rng.below(7)];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(Rng, NormalMoments) {
  SplitMix64 rng(6);
  double s = 0, s2 = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.02);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(42, 0), derive_seed(42, 1));
  EXPECT_NE(derive_seed(42, 0), derive_seed(43, 0));
  EXPECT_EQ(derive_seed(42, 3), derive_seed(42, 3));
}

TEST(Rng, ShuffleIsPermutation) {
  SplitMix64 rng(1);
  std::vector<std::size_t> idx(100);
  std::iota(idx.begin(), idx.end(), 0);
  shuffle_indices(idx, rng);
  auto sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
}

TEST(Rng, ContentDigestIsFnv1a) {
  EXPECT_EQ(content_digest(""), "fnv1a64:cbf29ce484222325");
  EXPECT_EQ(content_digest("a"), "fnv1a64:af63dc4c8601ec8c");
  EXPECT_EQ(content_digest("foobar"), "fnv1a64:85944171f73967e8");
}

TEST(Parallel, ResultsIndependentOfOrder) {
  std::vector<double> out(1000);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = std::sqrt(static_cast<double>(i)); });
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], std::sqrt(static_cast<double>(i)));
}

TEST(Parallel, LowestIndexErrorWins) {
  try {
    parallel_for(100, [](std::size_t i) {
      if (i % 10 == 3) throw std::runtime_error("fail " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "fail 3");
  }
}

TEST(Simplex, FindsInteriorQuadraticMinimum) {
  auto f = [](const std::vector<double>& x) {
    return (x[0] - 0.3) * (x[0] - 0.3) + 2 * (x[1] - 0.7) * (x[1] - 0.7) + (x[2] - 0.5) * (x[2] - 0.5);
  };
  const auto r = minimize_in_unit_cube(f, {0.9, 0.1, 0.1}, SimplexOptions{});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 0.3, 1e-5);
  EXPECT_NEAR(r.x[1], 0.7, 1e-5);
  EXPECT_NEAR(r.x[2], 0.5, 1e-5);
}

TEST(Simplex, ClampsToFaces) {
  auto f = [](const std::vector<double>& x) { return (x[0] + 1) * (x[0] + 1) + (x[1] - 2) * (x[1] - 2); };
  const auto r = minimize_in_unit_cube(f, {0.5, 0.5}, SimplexOptions{});
  EXPECT_EQ(r.x[0], 0.0);
  EXPECT_EQ(r.x[1], 1.0);
}

TEST(Simplex, IncumbentNeverIncreases) {
  auto rosen = [](const std::vector<double>& x) {
    const double a = 4 * x[0] - 2, b = 4 * x[1] - 2;
    return 100 * (b - a * a) * (b - a * a) + (1 - a) * (1 - a);
  };
  double last = std::numeric_limits<double>::infinity();
  int calls = 0;
  const auto r = minimize_in_unit_cube(rosen, {0.1, 0.9}, SimplexOptions{}, [&](int, double v) {
    EXPECT_LE(v, last);
    last = v;
    ++calls;
  });
  EXPECT_GT(calls, 0);
  EXPECT_NEAR(r.x[0], 0.75, 1e-3);
  EXPECT_NEAR(r.x[1], 0.75, 1e-3);
}

TEST(Simplex, HaltonPointsInCubeAndSeeded) {
  const auto a = low_discrepancy_points(64, 5, 42);
  const auto b = low_discrepancy_points(64, 5, 42);
  const auto c = low_discrepancy_points(64, 5, 43);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (const auto& p : a) {
    ASSERT_EQ(p.size(), 5u);
    for (double x : p) {
      EXPECT_GE(x, 0.0);
      EXPECT_LT(x, 1.0);
    }
  }
}

}  // namespace
}  // namespace ragscale
