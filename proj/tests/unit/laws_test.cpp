#include <algorithm>
#include <numbers>

#include "../support.hpp"

namespace ragscale {
namespace {

using testing::rel_err;

const Params2D kUnit{1, 1, 1, 1, 1};
const Params2D kHand{2, 0.5, 3, 0.25, 0.5};

TEST(Laws, Eval2dHandCases) {
  EXPECT_LE(rel_err(eval_2d(kUnit, 1e9, 1e9), 3.0), 1e-12);
  EXPECT_LE(rel_err(eval_2d(kHand, 4e9, 16e9), 3.0), 1e-12);
}

TEST(Laws, Eval2dFloorAtInfinity) {
  SplitMix64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    Params2D p = testing::random_params2d(rng);
    p.alpha = testing::uniform(rng, 0.2, 1.5);
    p.beta = testing::uniform(rng, 0.2, 1.5);
    const double excess = p.A * std::pow(1e9, -p.alpha) + p.B * std::pow(1e9, -p.beta);
    EXPECT_LE(rel_err(eval_2d(p, 1e18, 1e18), p.L0 + excess), 1e-14);
    p.A = p.B = 1.0;
    p.alpha = p.beta = testing::uniform(rng, 0.7, 1.5);
    EXPECT_NEAR(eval_2d(p, 1e18, 1e18), p.L0, 1e-6);
  }
}

TEST(Laws, Eval3dHandCases) {
  const Params3D lg{kHand, 0.5, 1.0, GainFamily::log_gain};
  EXPECT_LE(rel_err(eval_3d(lg, 4e9, 16e9, (std::numbers::e - 1) * 1e9), 2.5), 1e-12);
  const Params3D pg{kHand, 0.0, 2.0, GainFamily::power_gain};
  for (double r : {0.0, 1e6, 1e9, 3e10}) EXPECT_EQ(eval_3d(pg, 4e9, 16e9, r), eval_2d(kHand, 4e9, 16e9));
  const Params3D pg2{kUnit, 0.5, 1.0, GainFamily::power_gain};
  EXPECT_LE(rel_err(eval_3d(pg2, 1e9, 1e9, 1e9), 3.25), 1e-12);
  EXPECT_LE(rel_err(eval_3d(pg2, 1e9, 1e9, 0.0), 3.5), 1e-12);
}

TEST(Laws, LogGainAtZeroRetrievalIsExactly2d) {
  SplitMix64 rng(2);
  for (int i = 0; i < 10000; ++i) {
    const Params3D p = testing::random_params3d(rng, GainFamily::log_gain);
    const double n = testing::log_uniform(rng, 1e6, 1e11), d = testing::log_uniform(rng, 1e6, 1e12);
    ASSERT_EQ(eval_3d(p, n, d, 0.0), eval_2d(p.base, n, d));
  }
}

TEST(Laws, NonPositivePredictionThrows) {
  const Params3D p{Params2D{1, 1, 1, 1, 0}, 10.0, 10.0, GainFamily::log_gain};
  EXPECT_THROW_CODE(eval_3d(p, 1e9, 1e9, 1e12), ErrorCode::non_positive_prediction);
  EXPECT_LT(eval_3d_unchecked(p, 1e9, 1e9, 1e12), 0.0);
}

TEST(Laws, Monotonicity) {
  SplitMix64 rng(3);
  for (auto fam : {GainFamily::log_gain, GainFamily::power_gain}) {
    for (int i = 0; i < 1000; ++i) {
      const Params3D p = testing::random_params3d(rng, fam);
      const double n = testing::log_uniform(rng, 1e7, 1e10), d = testing::log_uniform(rng, 1e7, 1e11);
      const double r = testing::log_uniform(rng, 1e6, 1e11);
      EXPECT_GE(eval_3d_unchecked(p, n, d, r), eval_3d_unchecked(p, n, d, r * 1.5));
      EXPECT_GT(eval_2d(p.base, n, d), eval_2d(p.base, n * 1.01, d));
      EXPECT_GT(eval_2d(p.base, n, d), eval_2d(p.base, n, d * 1.01));
    }
  }
}

TEST(Laws, PartialsHandCases) {
  const Params3D unit{kUnit, 0.0, 1.0, GainFamily::log_gain};
  EXPECT_LE(rel_err(partials_3d(unit, 1e9, 1e9, 0).dd, -1e-9), 1e-12);
  EXPECT_EQ(partials_3d(unit, 1e9, 1e9, 5e9).dr, 0.0);
  const Params3D lg{kUnit, 0.3, 0.9, GainFamily::log_gain};
  const double r = 4e9;
  EXPECT_LE(rel_err(partials_3d(lg, 1e9, 1e9, r).dr, -0.3 * 0.9 / 1e9 / (1 + 0.9 * r / 1e9)), 1e-12);
}

// Independent long-double evaluation of the 3D law for the difference oracle.
long double oracle_loss(const Params3D& p, long double n, long double d, long double r) {
  const long double u = 1e9L;
  long double v = p.base.A * std::pow(n / u, -(long double)p.base.alpha) +
                  p.base.B * std::pow(d / u, -(long double)p.base.beta) + p.base.L0;
  if (p.family == GainFamily::log_gain) return v - p.C * std::log1p(p.rate * r / u);
  return v + p.C * std::pow(1.0L + r / u, -(long double)p.rate);
}

// Central differences with relative step 1e-6.
double max_fd_error(GainFamily family, int draws, std::uint64_t seed) {
  SplitMix64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < draws; ++i) {
    Params3D p = testing::random_params3d(rng, family);
    p.rate = testing::log_uniform(rng, 0.05, 3.0);
    const double x[3] = {testing::log_uniform(rng, 1e7, 1e10), testing::log_uniform(rng, 1e7, 1e11),
                         testing::log_uniform(rng, 1e8, 2e10)};
    const Partials g = partials_3d(p, x[0], x[1], x[2]);
    const double got[3] = {g.dn, g.dd, g.dr};
    for (int axis = 0; axis < 3; ++axis) {
      long double hi[3] = {x[0], x[1], x[2]}, lo[3] = {x[0], x[1], x[2]};
      const long double h = x[axis] * 1e-6L;
      hi[axis] += h;
      lo[axis] -= h;
      const long double fd =
          (oracle_loss(p, hi[0], hi[1], hi[2]) - oracle_loss(p, lo[0], lo[1], lo[2])) / (hi[axis] - lo[axis]);
      worst = std::max(worst, rel_err(got[axis], static_cast<double>(fd)));
    }
  }
  return worst;
}

TEST(Laws, PartialsMatchFiniteDifferences) {
  EXPECT_LE(max_fd_error(GainFamily::log_gain, 1000, 4), 1e-5);
  EXPECT_LE(max_fd_error(GainFamily::power_gain, 1000, 5), 1e-5);
}

TEST(Laws, EffectiveTokensHandCase) {
  const auto d = effective_pretrain_tokens(kUnit, 1e9, 2.5);
  ASSERT_TRUE(d);
  EXPECT_LE(rel_err(*d, 2e9), 1e-12);
  EXPECT_FALSE(effective_pretrain_tokens(kUnit, 1e9, 2.0));
  EXPECT_FALSE(effective_pretrain_tokens(kUnit, 1e9, 1.5));
}

TEST(Laws, EffectiveTokensInvertsEval2d) {
  SplitMix64 rng(5);
  for (int i = 0; i < 10000; ++i) {
    const Params2D p = testing::random_params2d(rng);
    const double n = testing::log_uniform(rng, 1e7, 1e10), d = testing::log_uniform(rng, 1e6, 1e11);
    const auto inv = effective_pretrain_tokens(p, n, eval_2d(p, n, d));
    ASSERT_TRUE(inv);
    ASSERT_LE(rel_err(*inv, d), 1e-9) << i;
  }
}

TEST(Laws, Substitutability) {
  EXPECT_LE(rel_err(*substitutability(kUnit, {1e9, 1e9, 0.5e9, 2.5}), 2.0), 1e-12);
  EXPECT_NEAR(*substitutability(kUnit, {1e9, 1e9, 0.5e9, 3.0}), 0.0, 1e-9);
  EXPECT_FALSE(substitutability(kUnit, {1e9, 1e9, 0.5e9, 1.9}));
  EXPECT_THROW_CODE(substitutability(kUnit, {1e9, 1e9, 0.0, 2.5}), ErrorCode::zero_retrieval);
}

TEST(Laws, SubstitutabilityRoundTrip) {
  SplitMix64 rng(6);
  int checked = 0;
  for (int i = 0; i < 5000; ++i) {
    const Params3D p = testing::random_params3d(rng, GainFamily::log_gain);
    const double n = testing::log_uniform(rng, 1e7, 1e10), d = testing::log_uniform(rng, 1e7, 1e11);
    const double r = testing::log_uniform(rng, 1e8, 2e10);
    const double loss = eval_3d_unchecked(p, n, d, r);
    if (loss <= 0) continue;
    const auto s = substitutability(p.base, {n, d, r, loss});
    if (!s) continue;
    ++checked;
    ASSERT_LE(rel_err(eval_2d(p.base, n, d + *s * r), loss), 1e-9);
  }
  EXPECT_GT(checked, 1000);
}

TEST(Laws, MarginalBenefit) {
  EXPECT_EQ(marginal_benefit(3.0, 3.0, 1e9), 0.0);
  EXPECT_NEAR(marginal_benefit(3.0, 2.6, 2e9), 0.2, 1e-12);
  EXPECT_THROW_CODE(marginal_benefit(3.0, 2.6, 0.0), ErrorCode::zero_retrieval);
}

TEST(Laws, GeometricMean) {
  const std::vector<double> a{1, 100}, b{7.5}, c{2, 8, 32};
  EXPECT_NEAR(aggregate_sigma_gm(a), 10.0, 1e-12);
  EXPECT_DOUBLE_EQ(aggregate_sigma_gm(b), 7.5);
  EXPECT_NEAR(aggregate_sigma_gm(c), 8.0, 1e-12);
  EXPECT_THROW_CODE(aggregate_sigma_gm(std::vector<double>{}), ErrorCode::empty_input);
  EXPECT_THROW_CODE(aggregate_sigma_gm(std::vector<double>{1.0, 0.0}), ErrorCode::non_positive_input);
  SplitMix64 rng(8);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> s(1 + rng.below(20)), scaled;
    for (auto& x : s) x = testing::log_uniform(rng, 1e-3, 1e3);
    const double k = testing::log_uniform(rng, 1e-2, 1e2);
    for (double x : s) scaled.push_back(k * x);
    EXPECT_LE(rel_err(aggregate_sigma_gm(scaled), k * aggregate_sigma_gm(s)), 1e-12);
  }
}

TEST(Laws, MedianMatchesSortOracle) {
  EXPECT_EQ(aggregate_kappa_med(std::vector<double>{-1, 0, 5}), 0.0);
  EXPECT_EQ(aggregate_kappa_med(std::vector<double>{1, 3}), 2.0);
  EXPECT_THROW_CODE(aggregate_kappa_med(std::vector<double>{}), ErrorCode::empty_input);
  SplitMix64 rng(9);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> k(1 + rng.below(30));
    for (auto& x : k) x = testing::uniform(rng, -5, 5);
    auto sorted = k;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    const double want = m % 2 ? sorted[m / 2] : (sorted[m / 2 - 1] + sorted[m / 2]) / 2;
    ASSERT_EQ(aggregate_kappa_med(k), want);
  }
}

TEST(Laws, Regimes) {
  EXPECT_EQ(regime_of(1e8, 1e8), Regime::x1);
  EXPECT_EQ(regime_of(1e8, 1e9), Regime::x10);
  EXPECT_EQ(regime_of(1e8, 1e10), Regime::x100);
  EXPECT_EQ(regime_of(1e8, 1e8 * std::sqrt(10.0)), Regime::x1);
  EXPECT_EQ(regime_of(1e8, 3.162e8), Regime::x1);
  EXPECT_EQ(regime_of(1e8, 3.2e8), Regime::x10);
  EXPECT_EQ(regime_of(1e8, 1e8 * std::pow(10.0, 1.5)), Regime::x10);
  EXPECT_EQ(regime_of(1e8, 1e8 * std::pow(10.0, 2.5)), Regime::x100);
  EXPECT_EQ(regime_of(1e8, 1e11), Regime::other);
  EXPECT_EQ(regime_of(1e8, 2e7), Regime::other);
  EXPECT_EQ(to_string(Regime::x10), "10x");
}

}  // namespace
}  // namespace ragscale
