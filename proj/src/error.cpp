#include "edurec/error.hpp"

namespace edurec {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MissingAttr: return "MissingAttr";
    case ErrorCode::NegativeNumericAttr: return "NegativeNumericAttr";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::UnknownEndpoint: return "UnknownEndpoint";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::IncompatiblePathSchema: return "IncompatiblePathSchema";
    case ErrorCode::GraphFrozen: return "GraphFrozen";
    case ErrorCode::GraphNotFrozen: return "GraphNotFrozen";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyCohort: return "EmptyCohort";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::NonFinitePoint: return "NonFinitePoint";
    case ErrorCode::MismatchedItems: return "MismatchedItems";
    case ErrorCode::TooFewItems: return "TooFewItems";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateTable: return "DegenerateTable";
    case ErrorCode::TooSmallTable: return "TooSmallTable";
    case ErrorCode::TooFewClusters: return "TooFewClusters";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NoPositives: return "NoPositives";
    case ErrorCode::GroupSizeTooSmall: return "GroupSizeTooSmall";
    case ErrorCode::ZeroNormEmbedding: return "ZeroNormEmbedding";
    case ErrorCode::SingletonGroup: return "SingletonGroup";
  }
  return "Unknown";
}

}  // namespace edurec
