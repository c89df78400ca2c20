#pragma once

#include <stdexcept>
#include <string>

namespace acs {

enum class ErrorKind {
  invalid_input,
  domain_error,
  internal_error,
  chart_out_of_range,
  degenerate_scale,
  divergence,
  step_failure,
  unsupported_metric,
  not_reducible,
  chirality,
  parse_error,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::domain_error: return "domain-error";
    case ErrorKind::internal_error: return "internal-error";
    case ErrorKind::chart_out_of_range: return "chart-out-of-range";
    case ErrorKind::degenerate_scale: return "degenerate-scale";
    case ErrorKind::divergence: return "divergence-error";
    case ErrorKind::step_failure: return "step-failure";
    case ErrorKind::unsupported_metric: return "unsupported-metric";
    case ErrorKind::not_reducible: return "not-reducible";
    case ErrorKind::chirality: return "chirality-error";
    case ErrorKind::parse_error: return "parse-error";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace acs
