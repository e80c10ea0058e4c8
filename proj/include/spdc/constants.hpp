#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

// Internal unit system: lengths in micrometres, times in femtoseconds,
// angular frequencies in rad/fs. All numbers in the library are in these
// units unless a name says otherwise.
namespace spdc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 0.299792458;  // um/fs

inline double wavelength_to_omega(double lambda_um) { return 2.0 * kPi * kSpeedOfLight / lambda_um; }
inline double omega_to_wavelength(double omega) { return 2.0 * kPi * kSpeedOfLight / omega; }

/// Argument outside the physical domain of a model (out-of-window frequency,
/// evanescent wave, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input is inside the domain but too close to a singular point for the
/// expansion or linear algebra to be trusted.
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical integral failed to reach its tolerance within its budget.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double partial_value, double error_estimate)
      : std::runtime_error(what), partial_value_(partial_value), error_estimate_(error_estimate) {}
  double partial_value() const { return partial_value_; }
  double error_estimate() const { return error_estimate_; }

 private:
  double partial_value_;
  double error_estimate_;
};

}  // namespace spdc
