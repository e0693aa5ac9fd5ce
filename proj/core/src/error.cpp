#include "promptllr/error.hpp"

namespace promptllr {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::bad_magic: return "bad-magic";
    case ErrorCode::version_mismatch: return "version-mismatch";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::non_finite_value: return "non-finite-value";
    case ErrorCode::label_out_of_range: return "label-out-of-range";
    case ErrorCode::invalid_metadata: return "invalid-metadata";
    case ErrorCode::kind_mismatch: return "kind-mismatch";
    case ErrorCode::out_of_range: return "out-of-range";
    case ErrorCode::length_mismatch: return "length-mismatch";
    case ErrorCode::bin_mismatch: return "bin-mismatch";
    case ErrorCode::shape_mismatch: return "shape-mismatch";
    case ErrorCode::support_violation: return "support-violation";
    case ErrorCode::mismatched_sets: return "mismatched-sets";
    case ErrorCode::sample_mismatch: return "sample-mismatch";
    case ErrorCode::missing_class: return "missing-class";
    case ErrorCode::empty_input: return "empty-input";
    case ErrorCode::io_failure: return "io-failure";
    case ErrorCode::degenerate_features: return "degenerate-features";
    case ErrorCode::singular_covariance: return "singular-covariance";
    case ErrorCode::zero_variance: return "zero-variance";
    case ErrorCode::non_finite_result: return "non-finite-result";
  }
  return "unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::degenerate_features:
    case ErrorCode::singular_covariance:
    case ErrorCode::zero_variance:
    case ErrorCode::non_finite_result:
      return false;
    default:
      return true;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace promptllr
