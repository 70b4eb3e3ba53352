#pragma once

#include <stdexcept>
#include <string>

namespace gridtune {

// Every failure mode in the library maps to one of these codes. Tests match
// on the code; the message is for humans.
enum class Errc {
  invalid_range,
  misaligned_step,
  duplicate_name,
  overflow,
  off_grid,
  dimension_mismatch,
  duplicate_ok,
  iteration_order,
  budget_exhausted,
  space_exhausted,
  stalled,
  protocol_violation,
  not_positive_definite,
  degenerate_input,
  all_fits_failed,
  space_too_small,
  insufficient_history,
  unknown_placeholder,
  missing_binding,
  bad_pattern,
  spawn_error,
  unbound_parameter,
  empty_history,
  grid_too_large,
  parse_error,
  validation_error,
  io_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_range: return "InvalidRange";
    case Errc::misaligned_step: return "MisalignedStep";
    case Errc::duplicate_name: return "DuplicateName";
    case Errc::overflow: return "Overflow";
    case Errc::off_grid: return "OffGrid";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::duplicate_ok: return "DuplicateOk";
    case Errc::iteration_order: return "IterationOrder";
    case Errc::budget_exhausted: return "BudgetExhausted";
    case Errc::space_exhausted: return "SpaceExhausted";
    case Errc::stalled: return "Stalled";
    case Errc::protocol_violation: return "ProtocolViolation";
    case Errc::not_positive_definite: return "NotPositiveDefinite";
    case Errc::degenerate_input: return "DegenerateInput";
    case Errc::all_fits_failed: return "AllFitsFailed";
    case Errc::space_too_small: return "SpaceTooSmall";
    case Errc::insufficient_history: return "InsufficientHistory";
    case Errc::unknown_placeholder: return "UnknownPlaceholder";
    case Errc::missing_binding: return "MissingBinding";
    case Errc::bad_pattern: return "BadPattern";
    case Errc::spawn_error: return "SpawnError";
    case Errc::unbound_parameter: return "UnboundParameter";
    case Errc::empty_history: return "EmptyHistory";
    case Errc::grid_too_large: return "GridTooLarge";
    case Errc::parse_error: return "ParseError";
    case Errc::validation_error: return "ValidationError";
    case Errc::io_error: return "IoError";
  }
  return "UnknownError";
}

class TuneError : public std::runtime_error {
 public:
  TuneError(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw TuneError(code, message);
}

}  // namespace gridtune
