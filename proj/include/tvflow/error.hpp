#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tvflow {

enum class ErrorCode {
    OutOfDomain,
    DegreeOverflow,
    LevelOutOfRange,
    ContinuityViolation,
    BoundaryMismatch,
    SchemaError,
    EmptyDomain,
    NotJRegular,
    DegenerateFacet,
    EventSkipped,
    NoEssentialFacets,
    OutOfRange,
    NotConverged,
    Precondition,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::DegreeOverflow: return "DegreeOverflow";
        case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
        case ErrorCode::ContinuityViolation: return "ContinuityViolation";
        case ErrorCode::BoundaryMismatch: return "BoundaryMismatch";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::EmptyDomain: return "EmptyDomain";
        case ErrorCode::NotJRegular: return "NotJRegular";
        case ErrorCode::DegenerateFacet: return "DegenerateFacet";
        case ErrorCode::EventSkipped: return "EventSkipped";
        case ErrorCode::NoEssentialFacets: return "NoEssentialFacets";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::Precondition: return "Precondition";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace tvflow
