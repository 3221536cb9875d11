#pragma once

#include <stdexcept>
#include <string>

namespace displib {

// Error kinds raised by library operations. Validation *checks* report
// failures as data; these exceptions are for contract violations on inputs.
enum class errc {
  bad_prime,
  non_finite,
  parent_mismatch,
  not_a_unit,
  not_in_ideal,
  no_pd,
  shape_mismatch,
  relation_violated,
  budget_exceeded,
  base_mismatch,
  insufficient_precision,
  not_in_v_image,
  kernel_mismatch,
  not_a_frame_hom,
  datum_invalid,
  not_finite,
  not_admissible,
  precision_exhausted,
  not_a_lift,
  coefficient_extraction_failed,
  bijection_failure,
  not_equal_over_r,
  parse_error,
  io_error,
  internal,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::bad_prime: return "BadPrime";
    case errc::non_finite: return "NonFinite";
    case errc::parent_mismatch: return "ParentMismatch";
    case errc::not_a_unit: return "NotAUnit";
    case errc::not_in_ideal: return "NotInIdeal";
    case errc::no_pd: return "NoPD";
    case errc::shape_mismatch: return "ShapeMismatch";
    case errc::relation_violated: return "RelationViolated";
    case errc::budget_exceeded: return "BudgetExceeded";
    case errc::base_mismatch: return "BaseMismatch";
    case errc::insufficient_precision: return "InsufficientPrecision";
    case errc::not_in_v_image: return "NotInVImage";
    case errc::kernel_mismatch: return "KernelMismatch";
    case errc::not_a_frame_hom: return "NotAFrameHom";
    case errc::datum_invalid: return "DatumInvalid";
    case errc::not_finite: return "NotFinite";
    case errc::not_admissible: return "NotAdmissible";
    case errc::precision_exhausted: return "PrecisionExhausted";
    case errc::not_a_lift: return "NotALift";
    case errc::coefficient_extraction_failed: return "CoefficientExtractionFailed";
    case errc::bijection_failure: return "BijectionFailure";
    case errc::not_equal_over_r: return "NotEqualOverR";
    case errc::parse_error: return "ParseError";
    case errc::io_error: return "IOError";
    case errc::internal: return "InternalError";
  }
  return "UnknownError";
}

class calc_error : public std::runtime_error {
 public:
  calc_error(errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& detail) {
  throw calc_error(code, detail);
}

inline void require(bool cond, errc code, const std::string& detail) {
  if (!cond) fail(code, detail);
}

}  // namespace displib
