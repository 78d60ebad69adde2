#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace t20 {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a total function (e.g. over 23).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Input is structurally unusable (missing CSV column, malformed file).
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A tabulation or enumeration would exceed its configured budget.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// A precondition of an operation was violated by the caller.
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Summary targets cannot be met by any outcome vector.
class FitError : public Error {
public:
    FitError(std::string bound, const std::string& message)
        : Error(message), bound_(std::move(bound)) {}
    const std::string& bound() const noexcept { return bound_; }

private:
    std::string bound_;
};

/// No plan satisfies the scenario constraints. `constraint()` names the
/// binding one ("quota", "no-consecutive", "prev_bowler", ...).
class InfeasibleError : public Error {
public:
    InfeasibleError(std::string constraint, const std::string& message)
        : Error(message), constraint_(std::move(constraint)) {}
    const std::string& constraint() const noexcept { return constraint_; }

private:
    std::string constraint_;
};

struct FieldIssue {
    std::string field;
    std::string message;
};

/// One or more fields of a scenario or request failed validation.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<FieldIssue> issues)
        : Error(summarize(issues)), issues_(std::move(issues)) {}
    ValidationError(std::string field, std::string message)
        : ValidationError(std::vector<FieldIssue>{{std::move(field), std::move(message)}}) {}

    const std::vector<FieldIssue>& issues() const noexcept { return issues_; }

private:
    static std::string summarize(const std::vector<FieldIssue>& issues) {
        std::string out;
        for (const auto& i : issues) {
            if (!out.empty()) out += "; ";
            out += i.field + ": " + i.message;
        }
        return out.empty() ? std::string("validation failed") : out;
    }

    std::vector<FieldIssue> issues_;
};

}  // namespace t20
