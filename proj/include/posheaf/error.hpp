#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace posheaf {

enum class ErrorCode {
  CycleDetected,
  UnknownElement,
  DuplicateElement,
  EmptyHyperedge,
  UnknownVertex,
  FieldMismatch,
  NotAComplex,
  DegreeViolation,
  NotClosedUnderDifferential,
  ShapeMismatch,
  MissingEdgeMap,
  ExtraEdgeMap,
  TooShort,
  NotMonotone,
  NonInvertibleMap,
  NotAPath,
  Disconnected,
  NotSimplicialPoset,
  PosetMismatch,
  OverflowOnConvert,
  DegreeOutOfRange,
  NoConvergence,
  DimensionMismatch,
  NotTwoLayer,
  UnstableStepSize,
  TraceTooShort,
  DegenerateInitialState,
  EmptySignalSet,
  NotAGraph,
  ParseError,
  SchemaError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::UnknownElement: return "UnknownElement";
    case ErrorCode::DuplicateElement: return "DuplicateElement";
    case ErrorCode::EmptyHyperedge: return "EmptyHyperedge";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::NotAComplex: return "NotAComplex";
    case ErrorCode::DegreeViolation: return "DegreeViolation";
    case ErrorCode::NotClosedUnderDifferential: return "NotClosedUnderDifferential";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MissingEdgeMap: return "MissingEdgeMap";
    case ErrorCode::ExtraEdgeMap: return "ExtraEdgeMap";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NotMonotone: return "NotMonotone";
    case ErrorCode::NonInvertibleMap: return "NonInvertibleMap";
    case ErrorCode::NotAPath: return "NotAPath";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::NotSimplicialPoset: return "NotSimplicialPoset";
    case ErrorCode::PosetMismatch: return "PosetMismatch";
    case ErrorCode::OverflowOnConvert: return "OverflowOnConvert";
    case ErrorCode::DegreeOutOfRange: return "DegreeOutOfRange";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotTwoLayer: return "NotTwoLayer";
    case ErrorCode::UnstableStepSize: return "UnstableStepSize";
    case ErrorCode::TraceTooShort: return "TraceTooShort";
    case ErrorCode::DegenerateInitialState: return "DegenerateInitialState";
    case ErrorCode::EmptySignalSet: return "EmptySignalSet";
    case ErrorCode::NotAGraph: return "NotAGraph";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

/// Domain error carrying a stable code string; the CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace posheaf
