#include "pqfi/error.hpp"

namespace pqfi {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::Unsupported: return "Unsupported";
    case Errc::VacuumOverlap: return "VacuumOverlap";
    case Errc::NotConvergedInput: return "NotConvergedInput";
    case Errc::NonPositiveQfi: return "NonPositiveQfi";
    case Errc::InfiniteQfi: return "InfiniteQfi";
    case Errc::Infeasible: return "Infeasible";
    case Errc::InstanceTooLarge: return "InstanceTooLarge";
    case Errc::DegenerateSweep: return "DegenerateSweep";
    case Errc::DivergentMember: return "DivergentMember";
    case Errc::InconsistentRecord: return "InconsistentRecord";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace pqfi
