#pragma once

#include <complex>
#include <optional>

#include "spdc/geometry.hpp"
#include "spdc/wavefunction.hpp"

namespace spdc {

/// Degenerate symmetric thin-crystal configuration (w_i = w_s = w,
/// w_p = r w). The ratio r is passed to each function separately.
struct ThinConfig {
  double w = 10.0;      // um
  double alpha = 0.0;   // rad
  double tau = 100.0;   // fs
  double omega0 = 0.0;  // rad/fs
  double omega_b = 0.0;
  double omega_t = 0.0;
  std::optional<double> delta;  // filter half-width, rad/fs
  double L = 100.0;             // um
  double beta_p = 0.0;          // pump walk-off slope

  /// r^2 w^2 / (1 + 2 r^2)
  double wbar2(double r) const { return r * r * w * w / (1.0 + 2.0 * r * r); }
  /// Argument of the window erf at omega0: alpha wbar (omega0 - 2 omega_b) / c.
  double transition_parameter(double r) const;
  /// (r^2 / (1 + 2 r^2)) (alpha w (omega_t - 2 omega_b) / c)^2, the size of
  /// the small-angle series argument over the window.
  double series_parameter(double r) const;
};

/// Thin-crystal amplitude: pump spectrum, sinc(L dk / 2) at the expansion
/// centre, waist prefactor and transverse Gaussian suppression.
std::complex<double> psi_thin(const SourceSetup& setup, double omega_i, double omega_s);
/// Same without the pump spectrum.
std::complex<double> phi_thin(const SourceSetup& setup, double omega_i, double omega_s);
/// Thin amplitude with the sinc set to one.
std::complex<double> phi_thin_perfect(const SourceSetup& setup, double omega_i, double omega_s);

/// Integral of exp(-2 (y + tau (2 omega_b - omega0))^2) y^(1 + 2n) over
/// [0, tau (omega_t - 2 omega_b)].
double d_coefficient(int n, const ThinConfig& cfg);

double brightness_collinear(double r, const ThinConfig& cfg);
double brightness_large_angle(double r, const ThinConfig& cfg);

struct SeriesResult {
  double value = 0.0;
  double remainder_bound = 0.0;  // |first omitted term|
  int terms = 0;
};

/// Partial sum of the small-angle series through order n_max. DomainError
/// when the terms grow so large that cancellation would destroy more than
/// eight digits; use brightness_exact_thin there.
SeriesResult brightness_series(double r, const ThinConfig& cfg, int n_max);

struct ThinIntegral {
  double value = 0.0;
  double abs_error = 0.0;
};

/// One-dimensional u-quadrature of the erf-weighted pump envelope over the
/// transmission window (perfect longitudinal phase matching). Each
/// `refinement` level doubles the starting node count and tightens the
/// adaptive tolerance by four.
ThinIntegral brightness_exact_thin_result(double r, const ThinConfig& cfg, int refinement = 0);
double brightness_exact_thin(double r, const ThinConfig& cfg);

/// Series while series_parameter(r) < 4 (summed until the remainder bound
/// drops below 1e-12 of the sum), exact quadrature otherwise.
double brightness_thin(double r, const ThinConfig& cfg);

struct FilteredBrightness {
  double exact = 0.0;
  double exact_abs_error = 0.0;
  double third_order = 0.0;
};

/// Filter of half-width cfg.delta around omega0 / 2: quadrature of the
/// exact filtered integral and the third-order narrow-filter formula.
FilteredBrightness brightness_filtered(double r, const ThinConfig& cfg, int refinement = 0);

/// Filter half-width in rad/fs for a full width `width_um` centred on
/// `center_um` (vacuum wavelengths).
double filter_half_width(double center_um, double width_um);

struct AnisotropicWaists {
  BeamWaist pump, idler, signal;
};

/// Thin-limit rate (arbitrary units) when frequencies are integrated over
/// the whole plane, as a function of the emission azimuth.
double anisotropic_rate(double phi, const AnisotropicWaists& waists);

enum class OptimalPhiKind { OddHalfPi, MultiplesOfPi, Any };
struct OptimalPhi {
  OptimalPhiKind kind = OptimalPhiKind::Any;
  double representative = 0.0;  // pi/2, 0 or 0
};
OptimalPhi optimal_phi(const AnisotropicWaists& waists, double rel_tol = 1e-12);

/// n_theta^2 (1/n_e^2 - 1/n_o^2) sin(theta) cos(theta) at omega.
double walkoff_slope(double omega, const CrystalModel& crystal);

/// Collinear brightness with the pump walk-off kept to first order in the
/// focal parameters, indices frozen at omega0. Reduces to
/// brightness_collinear when beta_p -> 0.
double brightness_walkoff_collinear(double r, const ThinConfig& cfg);

/// First order in xi, perfect longitudinal phase matching. Depends on the
/// bundle only through A_x + A_y and the Gaussian suppression.
std::complex<double> phi_first_order_xi(const ParaxialBundle& bundle);
std::complex<double> psi_first_order_xi(const SourceSetup& setup, double omega_i, double omega_s);

/// erf(x) / x, continuous at 0.
double erf_over_x(double x);

}  // namespace spdc
