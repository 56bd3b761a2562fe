#include "ragscale/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ragscale/rng.hpp"

namespace ragscale {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double safe_eval(const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& x) {
  const double v = f(x);
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

struct RunOutcome {
  int iterations = 0;
  bool converged = false;
};

RunOutcome run_simplex(const std::function<double(const std::vector<double>&)>& f,
                       std::vector<std::vector<double>>& pts, std::vector<double>& vals,
                       const SimplexOptions& opt, int iter_budget, int iter_offset,
                       const std::function<void(int, double)>& on_iteration) {
  const std::size_t k = pts.front().size();
  const std::size_t m = k + 1;
  std::vector<std::size_t> order(m);
  std::vector<double> centroid(k), trial(k), trial2(k);
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(iter_budget) + 1);

  auto sort_vertices = [&] {
    std::iota(order.begin(), order.end(), 0);
    // Stable on index so equal values keep a deterministic order.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
  };

  RunOutcome out;
  sort_vertices();
  history.push_back(vals[order[0]]);
  for (int it = 0; it < iter_budget; ++it) {
    const std::size_t best = order[0], worst = order[m - 1], second = order[m - 2];

    double diameter = 0.0;
    for (std::size_t j = 1; j < m; ++j)
      for (std::size_t c = 0; c < k; ++c)
        diameter = std::max(diameter, std::fabs(pts[order[j]][c] - pts[best][c]));
    if (diameter < opt.diameter_tol) {
      out.converged = true;
      break;
    }
    if (history.size() > static_cast<std::size_t>(opt.window)) {
      const double before = history[history.size() - 1 - static_cast<std::size_t>(opt.window)];
      if (std::isfinite(before) && before - history.back() < opt.improvement_tol) {
        out.converged = true;
        break;
      }
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t j = 0; j + 1 < m; ++j)
      for (std::size_t c = 0; c < k; ++c) centroid[c] += pts[order[j]][c];
    for (double& c : centroid) c /= static_cast<double>(k);

    for (std::size_t c = 0; c < k; ++c) trial[c] = clamp01(centroid[c] + (centroid[c] - pts[worst][c]));
    const double f_reflect = safe_eval(f, trial);

    if (f_reflect < vals[best]) {
      for (std::size_t c = 0; c < k; ++c) trial2[c] = clamp01(centroid[c] + 2.0 * (centroid[c] - pts[worst][c]));
      const double f_expand = safe_eval(f, trial2);
      if (f_expand < f_reflect) {
        pts[worst] = trial2;
        vals[worst] = f_expand;
      } else {
        pts[worst] = trial;
        vals[worst] = f_reflect;
      }
    } else if (f_reflect < vals[second]) {
      pts[worst] = trial;
      vals[worst] = f_reflect;
    } else {
      const bool outside = f_reflect < vals[worst];
      for (std::size_t c = 0; c < k; ++c) {
        trial2[c] = outside ? clamp01(centroid[c] + 0.5 * (trial[c] - centroid[c]))
                            : clamp01(centroid[c] + 0.5 * (pts[worst][c] - centroid[c]));
      }
      const double f_contract = safe_eval(f, trial2);
      if (f_contract < (outside ? f_reflect : vals[worst])) {
        pts[worst] = trial2;
        vals[worst] = f_contract;
      } else {
        for (std::size_t j = 1; j < m; ++j) {
          auto& p = pts[order[j]];
          for (std::size_t c = 0; c < k; ++c) p[c] = pts[best][c] + 0.5 * (p[c] - pts[best][c]);
          vals[order[j]] = safe_eval(f, p);
        }
      }
    }
    const double previous_best = vals[order[0]];
    sort_vertices();
    const double current_best = vals[order[0]];
    if (current_best > previous_best) throw std::logic_error("simplex incumbent objective increased");
    history.push_back(current_best);
    ++out.iterations;
    if (on_iteration) on_iteration(iter_offset + out.iterations, current_best);
  }
  return out;
}

void build_simplex(const std::vector<double>& x0, double step, const std::function<double(const std::vector<double>&)>& f,
                   std::vector<std::vector<double>>& pts, std::vector<double>& vals) {
  const std::size_t k = x0.size();
  pts.assign(k + 1, x0);
  vals.assign(k + 1, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    auto& p = pts[c + 1];
    p[c] = x0[c] + step <= 1.0 ? x0[c] + step : x0[c] - step;
  }
  for (std::size_t j = 0; j <= k; ++j) vals[j] = safe_eval(f, pts[j]);
}

}  // namespace

SimplexResult minimize_in_unit_cube(const std::function<double(const std::vector<double>&)>& objective,
                                    std::vector<double> start, const SimplexOptions& options,
                                    const std::function<void(int, double)>& on_iteration) {
  if (start.empty()) throw std::invalid_argument("simplex needs at least one dimension");
  for (double& v : start) v = clamp01(v);

  std::vector<std::vector<double>> pts;
  std::vector<double> vals;
  build_simplex(start, options.initial_step, objective, pts, vals);

  SimplexResult result;
  int used = 0;
  double step = options.initial_step;
  for (int restart = 0; restart <= options.max_restarts && used < options.max_iters; ++restart) {
    const RunOutcome run = run_simplex(objective, pts, vals, options, options.max_iters - used, used, on_iteration);
    used += run.iterations;
    const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    const double previous = result.x.empty() ? std::numeric_limits<double>::infinity() : result.value;
    if (result.x.empty() || vals[best] <= result.value) {
      result.x = pts[best];
      result.value = vals[best];
    }
    result.converged = run.converged;
    if (!run.converged) break;
    // A restart that gains nothing confirms the incumbent.
    if (restart > 0 && !(previous - result.value > options.improvement_tol)) break;
    step = std::max(step * 0.1, 1e-4);
    std::vector<std::vector<double>> fresh_pts;
    std::vector<double> fresh_vals;
    build_simplex(result.x, step, objective, fresh_pts, fresh_vals);
    // Keep the incumbent's exact value so the objective stays monotone.
    fresh_vals[0] = result.value;
    pts = std::move(fresh_pts);
    vals = std::move(fresh_vals);
  }
  result.iterations = used;
  return result;
}

std::vector<std::vector<double>> low_discrepancy_points(std::size_t count, std::size_t dims, std::uint64_t seed) {
  static constexpr std::uint32_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (dims > std::size(kPrimes)) throw std::invalid_argument("too many dimensions for the Halton sequence");
  SplitMix64 rng(derive_seed(seed, 0x48616c746f6eULL));
  std::vector<double> shift(dims);
  for (double& s : shift) s = rng.uniform();

  std::vector<std::vector<double>> out(count, std::vector<double>(dims));
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t d = 0; d < dims; ++d) {
      const std::uint32_t base = kPrimes[d];
      double f = 1.0, value = 0.0;
      for (std::size_t idx = i + 1; idx > 0; idx /= base) {
        f /= base;
        value += f * static_cast<double>(idx % base);
      }
      value += shift[d];
      out[i][d] = value - std::floor(value);
    }
  }
  return out;
}

}  // namespace ragscale
