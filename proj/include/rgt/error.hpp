#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rgt {

enum class ErrorCode {
  EmptyUniverse,
  DuplicateAction,
  UnknownAction,
  UniverseTooLarge,
  UniverseMismatch,
  EmptyInterval,
  GuardExceeded,
  UnboundVariable,
  ParseError,
  IncompleteGraph,
  DuplicateRelation,
  SelfRelation,
  UnknownSubject,
  LastSubjectRemoval,
  NotDecomposable,
  InvalidPolynomial,
  NotSolvable,
  MatrixIncomplete,
  ChoiceOutsideInterval,
  StageOrderViolation,
  SchemaError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the engine carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const noexcept { return to_string(code_); }

 private:
  ErrorCode code_;
};

}  // namespace rgt
