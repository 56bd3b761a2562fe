#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace ragscale {

struct SimplexOptions {
  int max_iters = 2000;
  /// Converged when every vertex lies within this (inf-norm) of the best one.
  double diameter_tol = 1e-10;
  /// ... or when the best objective improved by less than this over `window` iterations.
  double improvement_tol = 1e-12;
  int window = 50;
  /// Edge length of the initial simplex in unit-cube coordinates.
  double initial_step = 0.1;
  /// Fresh simplex restarts around the incumbent after convergence.
  int max_restarts = 4;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead descent restricted to the unit cube [0, 1]^k by projecting
/// every trial vertex onto the cube. The incumbent objective is
/// non-increasing; `on_iteration` (optional) sees it after every iteration.
SimplexResult minimize_in_unit_cube(const std::function<double(const std::vector<double>&)>& objective,
                                    std::vector<double> start, const SimplexOptions& options,
                                    const std::function<void(int, double)>& on_iteration = {});

/// Halton points over [0, 1]^dims with a seeded Cranley-Patterson rotation.
std::vector<std::vector<double>> low_discrepancy_points(std::size_t count, std::size_t dims,
                                                        std::uint64_t seed);

}  // namespace ragscale
