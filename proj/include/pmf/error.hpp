#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pmf {

enum class ErrorKind {
  InvalidArgument,
  NegativeValuation,
  NotCoprime,
  NotUnit,
  NotFundamental,
  ModulusSharesFactorWithP,
  CharacterOrder,
  ContextMismatch,
  NonUnitConstantTerm,
  MissingMetadata,
  BadPrime,
  ParityViolation,
  NotPositiveDefinite,
  TruncationTooShort,
  NotStable,
  NotInSpan,
  FormatError,
  MissingSource,
  RankDeficiency,
  NoStabilization,
  DenominatorNotUnit,
  TwistUndefined,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NegativeValuation: return "NegativeValuation";
    case ErrorKind::NotCoprime: return "NotCoprime";
    case ErrorKind::NotUnit: return "NotUnit";
    case ErrorKind::NotFundamental: return "NotFundamental";
    case ErrorKind::ModulusSharesFactorWithP: return "ModulusSharesFactorWithP";
    case ErrorKind::CharacterOrder: return "CharacterOrder";
    case ErrorKind::ContextMismatch: return "ContextMismatch";
    case ErrorKind::NonUnitConstantTerm: return "NonUnitConstantTerm";
    case ErrorKind::MissingMetadata: return "MissingMetadata";
    case ErrorKind::BadPrime: return "BadPrime";
    case ErrorKind::ParityViolation: return "ParityViolation";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::TruncationTooShort: return "TruncationTooShort";
    case ErrorKind::NotStable: return "NotStable";
    case ErrorKind::NotInSpan: return "NotInSpan";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::MissingSource: return "MissingSource";
    case ErrorKind::RankDeficiency: return "RankDeficiency";
    case ErrorKind::NoStabilization: return "NoStabilization";
    case ErrorKind::DenominatorNotUnit: return "DenominatorNotUnit";
    case ErrorKind::TwistUndefined: return "TwistUndefined";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace pmf
