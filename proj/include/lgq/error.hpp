#pragma once

#include <stdexcept>
#include <string>

namespace lgq {

// Failure codes carried by every lgq::error. The CLI maps validation-type
// codes to exit 1 and runtime/numerical ones to exit 2.
enum class errc {
  non_unit_axis,
  negative_coupling,
  equatorial_axis_required,
  non_equatorial_axis,
  unsupported_init,
  time_order,
  dimension_too_small,
  dimension_mismatch,
  eigen_failure,
  truncation_insufficient,
  step_too_large,
  not_a_local_min,
  engine_unavailable,
  missing_density,
  parse_error,
  schema_error,
  io_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::non_unit_axis: return "NonUnitAxis";
    case errc::negative_coupling: return "NegativeCoupling";
    case errc::equatorial_axis_required: return "EquatorialAxisRequired";
    case errc::non_equatorial_axis: return "NonEquatorialAxis";
    case errc::unsupported_init: return "UnsupportedInit";
    case errc::time_order: return "TimeOrder";
    case errc::dimension_too_small: return "DimensionTooSmall";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::eigen_failure: return "EigenFailure";
    case errc::truncation_insufficient: return "TruncationInsufficient";
    case errc::step_too_large: return "StepTooLarge";
    case errc::not_a_local_min: return "NotALocalMin";
    case errc::engine_unavailable: return "EngineUnavailable";
    case errc::missing_density: return "MissingDensity";
    case errc::parse_error: return "ParseError";
    case errc::schema_error: return "SchemaError";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

// Validation errors are caller mistakes (bad arguments, bad config).
// Everything else is a runtime or numerical failure.
inline bool is_validation_error(errc c) {
  switch (c) {
    case errc::eigen_failure:
    case errc::truncation_insufficient:
    case errc::step_too_large:
    case errc::io_error:
      return false;
    default:
      return true;
  }
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw error(code, what);
}

}  // namespace lgq
