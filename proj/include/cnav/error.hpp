#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cnav {

enum class ErrorCode {
    ParseError,
    CycleError,
    DanglingReference,
    UnknownType,
    InvariantViolation,
    DuplicateId,
    NotFound,
    EmptyObjective,
    InvalidStore,
    NoRelations,
    BudgetTooSmall,
    EmptyTemplate,
    RuleConflict,
    InvalidProfile,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
// `subjects` carries the ids involved (e.g. the steps of a rule cycle).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::vector<std::string> subjects = {});

    ErrorCode code() const noexcept { return code_; }
    const std::vector<std::string>& subjects() const noexcept { return subjects_; }

private:
    ErrorCode code_;
    std::vector<std::string> subjects_;
};

}  // namespace cnav
