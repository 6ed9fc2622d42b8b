#pragma once

#include <stdexcept>
#include <string>

namespace ailimit {

enum class Errc {
  non_invertible,
  undefined_center,
  branch_undefined,
  no_forward_map,
  no_backward_branching,
  infinite_slope,
  no_interval,
  convergence_failure,
  symbol_mismatch,
  undefined_distance,
  tangent_failure,
  corrector_failure,
  divergence_failure,
  no_real_doubling,
  no_fixed_point,
  ambiguous_symbol,
  diverged,
  parse_error,
  invalid_argument,
  io_error,
};

/// Broad category used by the CLI to pick an exit code.
enum class ErrorCategory { bad_input, numerical, io };

constexpr ErrorCategory category_of(Errc code) noexcept {
  switch (code) {
    case Errc::parse_error:
    case Errc::invalid_argument:
    case Errc::undefined_distance:
      return ErrorCategory::bad_input;
    case Errc::io_error:
      return ErrorCategory::io;
    default:
      return ErrorCategory::numerical;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  Errc code_;
};

}  // namespace ailimit
