#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spdc/dispersion.hpp"

namespace spdc {

struct PumpEnvelope {
  double omega0 = 0.0;
  double tau = 0.0;
};

/// Psi(omega_i, omega_s) = A_p(omega_i + omega_s) * phi(omega_i, omega_s)
/// when `pump` is set, phi alone otherwise. Keeping the pump spectrum
/// separate lets the outer integral use Gauss-Hermite weights.
struct AmplitudeModel {
  std::function<std::complex<double>(double, double)> phi;
  std::optional<PumpEnvelope> pump;
  /// Optional |v| cut-off (v = omega_i - omega_s) beyond which |phi| is
  /// negligible, e.g. 8 widths of the transverse Gaussian suppression.
  std::optional<double> v_halfwidth;
  /// |phi(u, v)| = |phi(u, -v)|; the inner integral then covers v >= 0.
  bool symmetric = false;
};

enum class DomainMode { TransmissionWindow, Filter };

/// omega_lo <= omega_i, omega_s <= omega_hi and omega_i + omega_s <= u_max.
struct FrequencyDomain {
  DomainMode mode = DomainMode::TransmissionWindow;
  double omega_lo = 0.0;
  double omega_hi = 0.0;
  double u_max = 0.0;

  static FrequencyDomain window(const TransmissionWindow& w);
  /// omega_center +- delta, intersected with the transmission window.
  static FrequencyDomain filter(double omega_center, double delta, const TransmissionWindow& w);

  bool contains(double omega_i, double omega_s) const;
  double u_min() const { return 2.0 * omega_lo; }
  double u_upper() const { return std::min(u_max, 2.0 * omega_hi); }
  /// Largest |v| admitted at a given u.
  double v_limit(double u) const { return std::max(0.0, std::min(u - 2.0 * omega_lo, 2.0 * omega_hi - u)); }
  std::string describe() const;
};

struct BrightnessOptions {
  double rel_tol = 1e-6;       // outer doubling tolerance
  double inner_rel_tol = 1e-8; // adaptive v-integral
  int u_nodes = 8;             // starting outer node count (doubles)
  int max_u_doublings = 6;
  std::size_t max_evaluations = std::size_t{1} << 22;

  /// One refinement step: twice the starting nodes, a tighter inner
  /// tolerance. Used by the error-honesty checks.
  BrightnessOptions refined() const;
};

struct BrightnessResult {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evaluations = 0;
  FrequencyDomain domain;
  bool converged = true;
};

/// Integral of |Psi|^2 over the domain in rotated coordinates u = omega_i +
/// omega_s, v = omega_i - omega_s. QuadratureError with the partial value
/// when the outer doubling or the evaluation budget runs out.
BrightnessResult total_brightness(const AmplitudeModel& model, const FrequencyDomain& domain,
                                  const BrightnessOptions& opts = {});

struct SweepPoint {
  double parameter = 0.0;
  std::optional<BrightnessResult> result;
  std::string error;  // empty on success
};

/// Evaluates one brightness per grid point on `workers` threads. Failures
/// are recorded per point; the output order follows the grid.
std::vector<SweepPoint> brightness_sweep(const std::function<AmplitudeModel(double)>& factory,
                                         const FrequencyDomain& domain, const std::vector<double>& grid,
                                         const BrightnessOptions& opts = {}, int workers = 1);

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace spdc
