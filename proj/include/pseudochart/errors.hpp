#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

namespace pseudochart {

enum class ErrorCode {
  FieldMismatch,
  VariableMismatch,
  ArityMismatch,
  ZeroPolynomial,
  NumericNonConvergence,
  InvalidArgument,
  BasePointHit,
  CenterMeetsVariety,
  InconclusiveBudget,
  PositiveDimensional,
  Unsupported,
  Parse,
};

const char* error_code_name(ErrorCode code);

/// Library-wide exception. `witness` carries structured evidence (a point, an
/// eliminated polynomial, ...) when the failure has one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, nlohmann::json witness = nullptr)
      : std::runtime_error(what), code_(code), witness_(std::move(witness)) {}

  ErrorCode code() const { return code_; }
  const nlohmann::json& witness() const { return witness_; }

 private:
  ErrorCode code_;
  nlohmann::json witness_;
};

}  // namespace pseudochart
