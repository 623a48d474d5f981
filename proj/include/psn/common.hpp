#pragma once

#include <stdexcept>
#include <string>

namespace psn {

inline constexpr const char* kVersion = "0.1.0";

enum class Errc {
  invalid_field,
  unsupported_order,
  grid_mismatch,
  under_resolved,
  cfl_exceeded,
  wave_breaking_suspected,
  nonfinite_state,
  insufficient_band,
  invalid_parameter,
  domain_error,
  io_error,
  internal_inconsistency,
  positivity_violation,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_g17(double v);

}  // namespace psn
