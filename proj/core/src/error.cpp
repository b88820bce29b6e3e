#include "bifurcade/error.hpp"

namespace bifurcade {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::IntervalTooTight: return "IntervalTooTight";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::InconsistentCrossing: return "InconsistentCrossing";
    case ErrorKind::PersistentTangency: return "PersistentTangency";
    case ErrorKind::NoInvariantSetFound: return "NoInvariantSetFound";
    case ErrorKind::WrongArity: return "WrongArity";
    case ErrorKind::SwitchFailed: return "SwitchFailed";
  }
  return "Unknown";
}

}  // namespace bifurcade
