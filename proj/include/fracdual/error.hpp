#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracdual {

enum class ErrorCode {
  // validation
  kShapeMismatch,
  kNotSymmetric,
  kHNotNegativeDefinite,
  kMu0NotPositive,
  kDeltaOutOfRange,
  kNegativeLambda,
  // evaluation
  kInfeasible,
  kMuOutOfRange,
  kNotPD,
  // solver / oracle
  kNoStartingPoint,
  kAllSubproblemsFailed,
  kDimensionTooLarge,
  // io
  kParse,
  kIo,
};

std::string_view to_string(ErrorCode code);

bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fracdual
