#pragma once

#include <stdexcept>
#include <string>

namespace skagree {

enum class ErrorCode {
  NegativeEntry,
  NotNormalized,
  DimensionMismatch,
  DuplicateLabel,
  EpsilonOutOfRange,
  AlphabetMismatch,
  DegenerateWitness,
  InvalidPmf,
  OutOfRange,
  InvalidAlpha,
  InvalidPath,
  AlphabetTooLarge,
  NotErasureSource,
  EnumerationTooLarge,
  EmptySet,
  SetsNotDisjoint,
  PairsCollide,
  InvalidInstance,
  ParseError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::DegenerateWitness: return "DegenerateWitness";
    case ErrorCode::InvalidPmf: return "InvalidPmf";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::InvalidPath: return "InvalidPath";
    case ErrorCode::AlphabetTooLarge: return "AlphabetTooLarge";
    case ErrorCode::NotErasureSource: return "NotErasureSource";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::SetsNotDisjoint: return "SetsNotDisjoint";
    case ErrorCode::PairsCollide: return "PairsCollide";
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

// Guards that refuse work because it would be too expensive, as opposed to
// rejecting malformed input.
inline bool is_computational_guard(ErrorCode code) {
  return code == ErrorCode::AlphabetTooLarge || code == ErrorCode::EnumerationTooLarge;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace skagree
