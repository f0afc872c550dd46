#pragma once

#include <stdexcept>
#include <string>

namespace ptb {

enum class ErrorCode {
    EmptyWord,
    InvalidCharacter,
    NotHyperbolic,
    MalformedPath,
    SectionTableMiss,
    UnsupportedVertex,
    SemiFiber,
    OrderImbalance,
    UniqueMinimum,
    DivisionByZero,
    ZeroDirection,
    UnsolvedVariable,
    UnknownCase,
    ResidualTooLarge,
    DegenerateValue,
    DegenerateShape,
    NoConvergence,
    DegenerationCollision,
    InsufficientSteps,
    BadReport,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace ptb
