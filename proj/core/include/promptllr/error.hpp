#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace promptllr {

enum class ErrorCode {
  // Input validation: malformed files, bad arguments, violated preconditions.
  bad_magic,
  version_mismatch,
  dimension_mismatch,
  non_finite_value,
  label_out_of_range,
  invalid_metadata,
  kind_mismatch,
  out_of_range,
  length_mismatch,
  bin_mismatch,
  shape_mismatch,
  support_violation,
  mismatched_sets,
  sample_mismatch,
  missing_class,
  empty_input,
  io_failure,
  // Numerical failures detected during a computation.
  degenerate_features,
  singular_covariance,
  zero_variance,
  non_finite_result,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for codes that describe bad inputs rather than numerical breakdown.
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace promptllr
