#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edurec {

enum class ErrorCode {
  DuplicateId,
  MissingAttr,
  NegativeNumericAttr,
  UnknownNode,
  UnknownEndpoint,
  SignatureMismatch,
  DuplicateEdge,
  IncompatiblePathSchema,
  GraphFrozen,
  GraphNotFrozen,
  UnknownKind,
  FileNotFound,
  MalformedLine,
  IoError,
  InvalidConfig,
  EmptyCohort,
  TooFewPoints,
  NonFinitePoint,
  MismatchedItems,
  TooFewItems,
  ZeroVariance,
  LengthMismatch,
  DegenerateTable,
  TooSmallTable,
  TooFewClusters,
  EmptyGraph,
  DimMismatch,
  NoPositives,
  GroupSizeTooSmall,
  ZeroNormEmbedding,
  SingletonGroup,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; the code is the stable part.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace edurec
