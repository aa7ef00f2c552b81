#pragma once

#include <stdexcept>
#include <string>

namespace morrey {

enum class ErrorCode {
    ZeroTotalMassViolated,
    ZeroFirstMoment,
    EmptyAfterMerge,
    AtomOutsideFieldDomain,
    AtomOutsideBox,
    EmptySearchConfig,
    DimensionNotOne,
    RegimeMismatch,
    PushforwardMismatch,
    CoincidentPoints,
    InvalidExponent,
    InvalidSimilarity,
    InvalidField,
};

inline const char* to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::ZeroTotalMassViolated: return "ZeroTotalMassViolated";
        case ErrorCode::ZeroFirstMoment: return "ZeroFirstMoment";
        case ErrorCode::EmptyAfterMerge: return "EmptyAfterMerge";
        case ErrorCode::AtomOutsideFieldDomain: return "AtomOutsideFieldDomain";
        case ErrorCode::AtomOutsideBox: return "AtomOutsideBox";
        case ErrorCode::EmptySearchConfig: return "EmptySearchConfig";
        case ErrorCode::DimensionNotOne: return "DimensionNotOne";
        case ErrorCode::RegimeMismatch: return "RegimeMismatch";
        case ErrorCode::PushforwardMismatch: return "PushforwardMismatch";
        case ErrorCode::CoincidentPoints: return "CoincidentPoints";
        case ErrorCode::InvalidExponent: return "InvalidExponent";
        case ErrorCode::InvalidSimilarity: return "InvalidSimilarity";
        case ErrorCode::InvalidField: return "InvalidField";
    }
    return "Unknown";
}

// Invalid input or broken data invariant (CLI exit code 3).
class ValidationError : public std::runtime_error {
public:
    ValidationError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

enum class SolverErrorCode {
    ConstraintDegenerate,
    MaxIterations,
};

inline const char* to_string(SolverErrorCode c) {
    switch (c) {
        case SolverErrorCode::ConstraintDegenerate: return "ConstraintDegenerate";
        case SolverErrorCode::MaxIterations: return "MaxIterations";
    }
    return "Unknown";
}

// Non-convergence of an iterative solve (CLI exit code 4).
class SolverError : public std::runtime_error {
public:
    SolverError(SolverErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    SolverErrorCode code() const { return code_; }

private:
    SolverErrorCode code_;
};

}  // namespace morrey
