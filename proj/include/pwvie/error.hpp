#pragma once

#include <stdexcept>
#include <string>

namespace pwvie {

/// Failure categories surfaced by the library. The CLI maps some of them to
/// dedicated exit codes.
enum class ErrorCode {
    Parse,
    UnsupportedInput,
    Domain,
    SingularDiagonal,
    NoValidConstants,
    InvalidBoundary,
    NonPolynomialDerivative,
    DegenerateCharacteristic,
    MultiplicityMismatch,
    InternalConsistency,
    MissingParameter,
    ConditionViolated,
    ContractionFailure,
    StepOrdering,
    WeightExhausted,
    NotCovered,
    ParameterMismatch,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Parse: return "parse error";
        case ErrorCode::UnsupportedInput: return "unsupported input";
        case ErrorCode::Domain: return "domain error";
        case ErrorCode::SingularDiagonal: return "singular diagonal";
        case ErrorCode::NoValidConstants: return "no valid constants";
        case ErrorCode::InvalidBoundary: return "invalid boundary";
        case ErrorCode::NonPolynomialDerivative: return "non-polynomial derivative";
        case ErrorCode::DegenerateCharacteristic: return "degenerate characteristic";
        case ErrorCode::MultiplicityMismatch: return "multiplicity mismatch";
        case ErrorCode::InternalConsistency: return "internal consistency";
        case ErrorCode::MissingParameter: return "missing parameter";
        case ErrorCode::ConditionViolated: return "condition violated";
        case ErrorCode::ContractionFailure: return "contraction failure";
        case ErrorCode::StepOrdering: return "step ordering";
        case ErrorCode::WeightExhausted: return "weight exhausted";
        case ErrorCode::NotCovered: return "not covered";
        case ErrorCode::ParameterMismatch: return "parameter mismatch";
    }
    return "error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace pwvie
