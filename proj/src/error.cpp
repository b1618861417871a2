#include "rgt/error.hpp"

namespace rgt {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyUniverse: return "EmptyUniverse";
    case ErrorCode::DuplicateAction: return "DuplicateAction";
    case ErrorCode::UnknownAction: return "UnknownAction";
    case ErrorCode::UniverseTooLarge: return "UniverseTooLarge";
    case ErrorCode::UniverseMismatch: return "UniverseMismatch";
    case ErrorCode::EmptyInterval: return "EmptyInterval";
    case ErrorCode::GuardExceeded: return "GuardExceeded";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IncompleteGraph: return "IncompleteGraph";
    case ErrorCode::DuplicateRelation: return "DuplicateRelation";
    case ErrorCode::SelfRelation: return "SelfRelation";
    case ErrorCode::UnknownSubject: return "UnknownSubject";
    case ErrorCode::LastSubjectRemoval: return "LastSubjectRemoval";
    case ErrorCode::NotDecomposable: return "NotDecomposable";
    case ErrorCode::InvalidPolynomial: return "InvalidPolynomial";
    case ErrorCode::NotSolvable: return "NotSolvable";
    case ErrorCode::MatrixIncomplete: return "MatrixIncomplete";
    case ErrorCode::ChoiceOutsideInterval: return "ChoiceOutsideInterval";
    case ErrorCode::StageOrderViolation: return "StageOrderViolation";
    case ErrorCode::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

}  // namespace rgt
