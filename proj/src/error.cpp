#include "cnav/error.hpp"

namespace cnav {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::CycleError: return "CycleError";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::UnknownType: return "UnknownType";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::EmptyObjective: return "EmptyObjective";
    case ErrorCode::InvalidStore: return "InvalidStore";
    case ErrorCode::NoRelations: return "NoRelations";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::EmptyTemplate: return "EmptyTemplate";
    case ErrorCode::RuleConflict: return "RuleConflict";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::vector<std::string> subjects)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      subjects_(std::move(subjects)) {}

}  // namespace cnav
