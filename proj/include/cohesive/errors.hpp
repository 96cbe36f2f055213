#pragma once

#include <stdexcept>
#include <string>

namespace cohesive {

enum class ErrorKind {
  NonConvergent,
  NonFinite,
  EnvelopeViolated,
  NoBracket,
  NotMonotone,
  DomainError,
  OutOfRange,
  HypothesisViolation,
  Unsupported,
  WrongRegime,
  NotInvertible,
  CompatibilityError,
  UnknownEntry,
  BadParameters,
  ParseError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::EnvelopeViolated: return "EnvelopeViolated";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::NotMonotone: return "NotMonotone";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::HypothesisViolation: return "HypothesisViolation";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::WrongRegime: return "WrongRegime";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::CompatibilityError: return "CompatibilityError";
    case ErrorKind::UnknownEntry: return "UnknownEntry";
    case ErrorKind::BadParameters: return "BadParameters";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Error";
}

}  // namespace cohesive
