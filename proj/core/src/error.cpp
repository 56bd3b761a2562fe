#include "ragscale/error.hpp"

namespace ragscale {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::schema_error: return "SchemaError";
    case ErrorCode::domain_error: return "DomainError";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::non_positive_prediction: return "NonPositivePrediction";
    case ErrorCode::zero_retrieval: return "ZeroRetrieval";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::non_positive_input: return "NonPositiveInput";
    case ErrorCode::insufficient_data: return "InsufficientData";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::zero_variance: return "ZeroVariance";
    case ErrorCode::single_group: return "SingleGroup";
    case ErrorCode::missing_group: return "MissingGroup";
    case ErrorCode::budget_too_small: return "BudgetTooSmall";
    case ErrorCode::insufficient_points: return "InsufficientPoints";
    case ErrorCode::zero_slope: return "ZeroSlope";
    case ErrorCode::missing_baseline: return "MissingBaseline";
    case ErrorCode::empty_catalog: return "EmptyCatalog";
    case ErrorCode::budget_exceeds_corpus: return "BudgetExceedsCorpus";
    case ErrorCode::seed_mismatch: return "SeedMismatch";
    case ErrorCode::digest_mismatch: return "DigestMismatch";
  }
  return "Error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      detail_(message) {}

}  // namespace ragscale
