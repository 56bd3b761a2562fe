#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ragscale {

/// Every failure the library reports carries one of these codes.
enum class ErrorCode {
  parse_error,
  schema_error,
  domain_error,
  io_error,
  invalid_argument,
  non_positive_prediction,
  zero_retrieval,
  empty_input,
  non_positive_input,
  insufficient_data,
  no_convergence,
  length_mismatch,
  zero_variance,
  single_group,
  missing_group,
  budget_too_small,
  insufficient_points,
  zero_slope,
  missing_baseline,
  empty_catalog,
  budget_exceeds_corpus,
  seed_mismatch,
  digest_mismatch,
};

/// CamelCase name used in diagnostics, e.g. "InsufficientData".
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace ragscale
