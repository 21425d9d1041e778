#pragma once

#include <stdexcept>
#include <string>

namespace trajent {

/// Failure categories, used by the CLI to pick an exit code.
enum class ErrorKind {
    InvalidInput,   ///< malformed chain, unknown label, bad parameter
    Infeasible,     ///< query is well-formed but has no answer on this chain
    Numerical,      ///< a linear solve failed where the preconditions said it could not
};

enum class ErrorCode {
    // invalid input
    NonSquare,
    NegativeEntry,
    RowSumViolation,
    DuplicateLabel,
    LabelCountMismatch,
    UnknownState,
    DestinationRevisited,
    TargetsEqual,
    DestinationInVia,
    OutOfRange,
    ParseError,
    DuplicateEdge,
    // infeasible queries
    NotIrreducible,
    AbsorptionNotCertain,
    DestinationUnreachable,
    SourceCannotReachDestination,
    AlwaysPassesThroughU,
    NeverPassesThroughU,
    ImpossibleConditioning,
    InsufficientCoverage,
    LimitsExceeded,
    // numerical failures
    SingularSystem,
};

constexpr ErrorKind kind_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotIrreducible:
        case ErrorCode::AbsorptionNotCertain:
        case ErrorCode::DestinationUnreachable:
        case ErrorCode::SourceCannotReachDestination:
        case ErrorCode::AlwaysPassesThroughU:
        case ErrorCode::NeverPassesThroughU:
        case ErrorCode::ImpossibleConditioning:
        case ErrorCode::InsufficientCoverage:
        case ErrorCode::LimitsExceeded:
            return ErrorKind::Infeasible;
        case ErrorCode::SingularSystem:
            return ErrorKind::Numerical;
        default:
            return ErrorKind::InvalidInput;
    }
}

constexpr const char* name_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonSquare: return "NonSquare";
        case ErrorCode::NegativeEntry: return "NegativeEntry";
        case ErrorCode::RowSumViolation: return "RowSumViolation";
        case ErrorCode::DuplicateLabel: return "DuplicateLabel";
        case ErrorCode::LabelCountMismatch: return "LabelCountMismatch";
        case ErrorCode::UnknownState: return "UnknownState";
        case ErrorCode::DestinationRevisited: return "DestinationRevisited";
        case ErrorCode::TargetsEqual: return "TargetsEqual";
        case ErrorCode::DestinationInVia: return "DestinationInVia";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::DuplicateEdge: return "DuplicateEdge";
        case ErrorCode::NotIrreducible: return "NotIrreducible";
        case ErrorCode::AbsorptionNotCertain: return "AbsorptionNotCertain";
        case ErrorCode::DestinationUnreachable: return "DestinationUnreachable";
        case ErrorCode::SourceCannotReachDestination: return "SourceCannotReachDestination";
        case ErrorCode::AlwaysPassesThroughU: return "AlwaysPassesThroughU";
        case ErrorCode::NeverPassesThroughU: return "NeverPassesThroughU";
        case ErrorCode::ImpossibleConditioning: return "ImpossibleConditioning";
        case ErrorCode::InsufficientCoverage: return "InsufficientCoverage";
        case ErrorCode::LimitsExceeded: return "LimitsExceeded";
        case ErrorCode::SingularSystem: return "SingularSystem";
    }
    return "Unknown";
}

/// Library-wide exception. `index()` carries the offending state, row, or leg
/// where one is meaningful (-1 otherwise).
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, std::string message, long index = -1)
        : std::runtime_error(std::string(name_of(code)) + ": " + message),
          code_(code),
          message_(std::move(message)),
          index_(index) {}

    ErrorCode code() const noexcept { return code_; }
    ErrorKind kind() const noexcept { return kind_of(code_); }
    /// The text after the code name in what().
    const std::string& message() const noexcept { return message_; }
    long index() const noexcept { return index_; }

  private:
    ErrorCode code_;
    std::string message_;
    long index_;
};

}  // namespace trajent
