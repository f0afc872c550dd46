#include "ptb/errors.hpp"

namespace ptb {

const char* error_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::EmptyWord: return "EmptyWord";
    case ErrorCode::InvalidCharacter: return "InvalidCharacter";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::MalformedPath: return "MalformedPath";
    case ErrorCode::SectionTableMiss: return "SectionTableMiss";
    case ErrorCode::UnsupportedVertex: return "UnsupportedVertex";
    case ErrorCode::SemiFiber: return "SemiFiber";
    case ErrorCode::OrderImbalance: return "OrderImbalance";
    case ErrorCode::UniqueMinimum: return "UniqueMinimum";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::ZeroDirection: return "ZeroDirection";
    case ErrorCode::UnsolvedVariable: return "UnsolvedVariable";
    case ErrorCode::UnknownCase: return "UnknownCase";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::DegenerateValue: return "DegenerateValue";
    case ErrorCode::DegenerateShape: return "DegenerateShape";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerationCollision: return "DegenerationCollision";
    case ErrorCode::InsufficientSteps: return "InsufficientSteps";
    case ErrorCode::BadReport: return "BadReport";
    }
    return "Unknown";
}

} // namespace ptb
