#include "ragscale/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ragscale/error.hpp"
#include "ragscale/rng.hpp"

namespace ragscale {

void SynthSpec::validate() const {
  if (n_values.empty() || d_values.empty() || r_values.empty())
    throw Error(ErrorCode::invalid_argument, "synth grids must be non-empty");
  if (std::find(r_values.begin(), r_values.end(), 0) == r_values.end())
    throw Error(ErrorCode::invalid_argument, "synth r_values must include 0");
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::invalid_argument, "noise_sigma must be >= 0");
}

std::string family_label(std::int64_t n) {
  char buf[32];
  if (n >= 1'000'000'000 && n % 1'000'000'000 == 0)
    std::snprintf(buf, sizeof buf, "%lldB", static_cast<long long>(n / 1'000'000'000));
  else if (n >= 1'000'000 && n % 1'000'000 == 0)
    std::snprintf(buf, sizeof buf, "%lldM", static_cast<long long>(n / 1'000'000));
  else
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(n));
  return buf;
}

Dataset generate(const SynthSpec& spec) {
  spec.validate();
  std::vector<RunRecord> records;
  records.reserve(spec.n_values.size() * spec.d_values.size() * spec.r_values.size());
  std::uint64_t index = 0;
  for (auto n : spec.n_values) {
    for (auto d : spec.d_values) {
      for (auto r : spec.r_values) {
        const double truth = eval_3d(spec.planted, static_cast<double>(n), static_cast<double>(d),
                                     static_cast<double>(r));
        if (!(truth > 0.0))
          throw Error(ErrorCode::non_positive_prediction, "planted law is non-positive on the grid");
        double loss = truth;
        if (spec.noise_sigma > 0.0) {
          SplitMix64 stream(derive_seed(spec.seed, index));
          loss = truth * std::exp(spec.noise_sigma * stream.normal());
        }
        RunRecord rec;
        rec.model_params = n;
        rec.pretrain_tokens = d;
        rec.retrieval_tokens = r;
        rec.loss = loss;
        rec.benchmark = spec.benchmark_label;
        rec.seed = spec.seed_label;
        rec.model_family = family_label(n);
        rec.row = records.size() + 1;
        records.push_back(std::move(rec));
        ++index;
      }
    }
  }
  return Dataset::create(std::move(records), "synth:" + spec.benchmark_label);
}

SynthSpec default_grid() {
  SynthSpec spec;
  spec.planted = Params3D{Params2D{2.5, 0.35, 1.8, 0.28, 1.1}, 0.3, 0.9, GainFamily::log_gain};
  spec.n_values = {30'000'000, 136'000'000, 233'000'000, 728'000'000, 1'000'000'000, 3'000'000'000};
  const double lo = 3e7, hi = 1e11;
  for (int i = 0; i < 6; ++i) {
    const double d = lo * std::pow(hi / lo, i / 5.0);
    spec.d_values.push_back(static_cast<std::int64_t>(std::llround(d)));
  }
  spec.d_values.back() = 100'000'000'000;
  spec.r_values = {0, 1'000'000'000, 5'000'000'000, 10'000'000'000, 20'000'000'000};
  spec.noise_sigma = 0.0;
  spec.seed = 42;
  spec.benchmark_label = "synthetic";
  return spec;
}

}  // namespace ragscale
