#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bifurcade {

enum class ErrorKind {
  InvalidModel,
  InvalidState,
  InvalidArgument,
  Unsupported,
  IntervalTooTight,
  Degenerate,
  InconsistentCrossing,
  PersistentTangency,
  NoInvariantSetFound,
  WrongArity,
  SwitchFailed,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind so the
/// front end can map it onto an exit code and a diagnostic record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures of the numerics rather than of the input.
  bool numerical() const noexcept {
    return kind_ == ErrorKind::PersistentTangency || kind_ == ErrorKind::SwitchFailed ||
           kind_ == ErrorKind::NoInvariantSetFound || kind_ == ErrorKind::IntervalTooTight ||
           kind_ == ErrorKind::InconsistentCrossing;
  }

 private:
  ErrorKind kind_;
};

}  // namespace bifurcade
