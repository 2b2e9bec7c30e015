#pragma once

#include <stdexcept>
#include <string>

namespace lagctrl {

enum class ErrorKind {
  InvalidArgument,
  OutOfDomain,
  DegenerateGram,
  CflViolation,
  NonFiniteField,
  VacuumApproach,
  AmplitudeTooLarge,
  Diverged,
  SizeLimit,
  Config,
  Io,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so that callers (the CLI
/// in particular) can map it onto an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::DegenerateGram: return "DegenerateGram";
    case ErrorKind::CflViolation: return "CflViolation";
    case ErrorKind::NonFiniteField: return "NonFiniteField";
    case ErrorKind::VacuumApproach: return "VacuumApproach";
    case ErrorKind::AmplitudeTooLarge: return "AmplitudeTooLarge";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::SizeLimit: return "SizeLimit";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

}  // namespace lagctrl
