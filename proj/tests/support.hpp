#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ragscale/ragscale.hpp"

namespace ragscale::testing {

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

/// Uniform in [lo, hi).
inline double uniform(SplitMix64& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }
/// Log-uniform in [lo, hi).
inline double log_uniform(SplitMix64& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

inline Params2D random_params2d(SplitMix64& rng) {
  return Params2D{log_uniform(rng, 0.1, 10.0), uniform(rng, 0.1, 0.8), log_uniform(rng, 0.1, 10.0),
                  uniform(rng, 0.1, 0.8), uniform(rng, 0.5, 2.0)};
}

inline Params3D random_params3d(SplitMix64& rng, GainFamily family) {
  Params3D p;
  p.base = random_params2d(rng);
  p.C = log_uniform(rng, 0.01, 0.5);
  p.rate = log_uniform(rng, 0.05, 5.0);
  p.family = family;
  return p;
}

inline RunRecord make_record(std::int64_t n, std::int64_t d, std::int64_t r, double loss,
                             std::string benchmark = "bench", std::string seed = {}, std::string family = {}) {
  RunRecord rec;
  rec.model_params = n;
  rec.pretrain_tokens = d;
  rec.retrieval_tokens = r;
  rec.loss = loss;
  rec.benchmark = std::move(benchmark);
  rec.seed = std::move(seed);
  rec.model_family = std::move(family);
  return rec;
}

/// Fresh per-test scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ragscale_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Smaller grid than default_grid for fast fitter tests: 4 N x 4 D x 3 R.
inline SynthSpec small_grid() {
  SynthSpec s = default_grid();
  s.n_values = {30'000'000, 233'000'000, 1'000'000'000, 3'000'000'000};
  s.d_values = {30'000'000, 600'000'000, 10'000'000'000, 100'000'000'000};
  s.r_values = {0, 2'000'000'000, 20'000'000'000};
  return s;
}

#define EXPECT_THROW_CODE(stmt, error_code)                                       \
  do {                                                                            \
    try {                                                                         \
      stmt;                                                                       \
      ADD_FAILURE() << "expected " << to_string(error_code) << ", nothing thrown"; \
    } catch (const ::ragscale::Error& e) {                                        \
      EXPECT_EQ(e.code(), error_code) << e.what();                                \
    }                                                                             \
  } while (0)

}  // namespace ragscale::testing
