#include "podsurf/error.hpp"

namespace podsurf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DuplicateParameter: return "DuplicateParameter";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionUnsupported: return "VersionUnsupported";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::RankTooLarge: return "RankTooLarge";
    case ErrorCode::DegenerateMatrix: return "DegenerateMatrix";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DuplicateInput: return "DuplicateInput";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::CholeskyFailure: return "CholeskyFailure";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::OutOfHull: return "OutOfHull";
    case ErrorCode::ZeroTruthNorm: return "ZeroTruthNorm";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::CountTooSmall: return "CountTooSmall";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

}  // namespace podsurf
