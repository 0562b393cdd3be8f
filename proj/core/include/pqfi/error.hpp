#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pqfi {

/// Recoverable error categories raised by the library.
enum class Errc {
  InvalidParameter,
  Unsupported,
  VacuumOverlap,
  NotConvergedInput,
  NonPositiveQfi,
  InfiniteQfi,
  Infeasible,
  InstanceTooLarge,
  DegenerateSweep,
  DivergentMember,
  InconsistentRecord,
  ParseError,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace pqfi
