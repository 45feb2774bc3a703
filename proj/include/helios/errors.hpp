#pragma once

#include <stdexcept>
#include <string>

namespace helios {

/// Base of every error raised by the library. `code()` is a stable short name
/// used in CLI diagnostics and manifests.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define HELIOS_DEFINE_ERROR(Name)                                    \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name, what) {}   \
  };

HELIOS_DEFINE_ERROR(ArgumentError)
HELIOS_DEFINE_ERROR(ZeroArgument)
HELIOS_DEFINE_ERROR(StabilityLoss)
HELIOS_DEFINE_ERROR(DomainError)
HELIOS_DEFINE_ERROR(IndexError)
HELIOS_DEFINE_ERROR(DegeneratePolygon)
HELIOS_DEFINE_ERROR(UnresolvedOscillation)
HELIOS_DEFINE_ERROR(MeaningMismatch)
HELIOS_DEFINE_ERROR(SectorViolation)
HELIOS_DEFINE_ERROR(TailNotResolved)
HELIOS_DEFINE_ERROR(WindowUnderresolved)
HELIOS_DEFINE_ERROR(ConfigError)

#undef HELIOS_DEFINE_ERROR

/// A named runtime invariant was violated.
class CheckFailed : public Error {
 public:
  CheckFailed(std::string check, double measured, double threshold)
      : Error("CheckFailed", check + " measured " + std::to_string(measured) +
                                 " exceeds threshold " + std::to_string(threshold)),
        check_(std::move(check)),
        measured_(measured),
        threshold_(threshold) {}
  const std::string& check() const noexcept { return check_; }
  double measured() const noexcept { return measured_; }
  double threshold() const noexcept { return threshold_; }

 private:
  std::string check_;
  double measured_;
  double threshold_;
};

}  // namespace helios
