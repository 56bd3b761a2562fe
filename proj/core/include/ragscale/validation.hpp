#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragscale/fitter.hpp"
#include "ragscale/records.hpp"

namespace ragscale {

enum class Protocol { cv, lomo, lodo, stability };
enum class GroupBy { model_size, benchmark };

std::string_view to_string(Protocol protocol) noexcept;
Protocol parse_protocol(std::string_view text);

/// Mean absolute relative error in percent. Throws EmptyInput / LengthMismatch.
double are(std::span<const double> pred, std::span<const double> obs);

/// 1 - SS_res / SS_tot about mean(obs). Throws ZeroVariance / EmptyInput / LengthMismatch.
double r_squared(std::span<const double> pred, std::span<const double> obs);

struct FoldResult {
  std::string held_out_label;
  std::size_t n_points = 0;
  double are_percent = 0.0;
};

struct ValidationReport {
  Protocol protocol = Protocol::cv;
  double are_percent = 0.0;  // mean over folds
  double r_squared = 0.0;    // pooled over every held-out prediction
  std::vector<FoldResult> per_fold;
  std::uint64_t seed = 0;
  int folds = 0;
  int repeats = 1;
  /// Free-form notes carried into reports (e.g. the LODO pooling rule).
  std::vector<std::string> notes;
};

/// Seeded fold assignment: fold_of[i] in [0, folds) for each of n rows, with
/// fold sizes differing by at most one.
std::vector<int> assign_folds(std::size_t n, int folds, std::uint64_t seed);

/// Random k-fold CV, `repeats` times. For two_d the data is first restricted
/// to R = 0 rows.
ValidationReport cross_validate(const Dataset& data, const FitConfig& cfg, int folds = 5, int repeats = 5,
                                std::uint64_t seed = 42);

/// One fold per distinct model size (LOMO) or benchmark (LODO).
ValidationReport leave_one_group_out(const Dataset& data, const FitConfig& cfg, GroupBy group_by);

struct StabilityRow {
  std::string subset_id;  // "family=seed;family=seed;..."
  std::string benchmark;
  double cv_are = 0.0;
  double lomo_are = 0.0;
};

struct StabilitySummary {
  std::string benchmark;
  std::size_t subsets = 0;
  double cv_mean = 0.0;
  double cv_std = 0.0;
  double lomo_mean = 0.0;
  double lomo_std = 0.0;
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  std::vector<StabilitySummary> summary;
};

struct StabilityOptions {
  int folds = 5;
  int repeats = 5;
  std::uint64_t seed = 42;
};

/// Every choice of one seed label per family (|seeds|^|families| subsets);
/// each subset is fit and validated per benchmark. Throws MissingGroup.
StabilityReport stability_report(const Dataset& data, const FitConfig& cfg, const std::vector<std::string>& families,
                                 const std::vector<std::string>& seeds, const StabilityOptions& options = {});

}  // namespace ragscale
