#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kjet {

enum class ErrorKind {
  CompositionMismatch,
  NotCommuting,
  NotJointlyMonic,
  StageMismatch,
  OverMismatch,
  NotInSupport,
  TargetMismatch,
  SupportNotContained,
  UnstableLaw,
  NotSymmetric,
  NotReflexive,
  PreservationViolated,
  ShapeMismatch,
  NotVertical,
  SquaresNotCommuting,
  ChainMismatch,
  InvalidSet,
  InvalidMap,
  SyntaxError,
  UnknownReference,
  NonTotalMap,
  DuplicateName,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CompositionMismatch: return "CompositionMismatch";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::NotJointlyMonic: return "NotJointlyMonic";
    case ErrorKind::StageMismatch: return "StageMismatch";
    case ErrorKind::OverMismatch: return "OverMismatch";
    case ErrorKind::NotInSupport: return "NotInSupport";
    case ErrorKind::TargetMismatch: return "TargetMismatch";
    case ErrorKind::SupportNotContained: return "SupportNotContained";
    case ErrorKind::UnstableLaw: return "UnstableLaw";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NotReflexive: return "NotReflexive";
    case ErrorKind::PreservationViolated: return "PreservationViolated";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotVertical: return "NotVertical";
    case ErrorKind::SquaresNotCommuting: return "SquaresNotCommuting";
    case ErrorKind::ChainMismatch: return "ChainMismatch";
    case ErrorKind::InvalidSet: return "InvalidSet";
    case ErrorKind::InvalidMap: return "InvalidMap";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownReference: return "UnknownReference";
    case ErrorKind::NonTotalMap: return "NonTotalMap";
    case ErrorKind::DuplicateName: return "DuplicateName";
  }
  return "Unknown";
}

/// Every precondition violation in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace kjet
