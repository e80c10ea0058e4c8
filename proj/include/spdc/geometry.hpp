#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spdc/dispersion.hpp"

namespace spdc {

/// Polarizations of (pump, signal, idler); "eoo" is type-I e -> o + o.
struct PhaseMatchingType {
  Polarization pump = Polarization::Extraordinary;
  Polarization signal = Polarization::Ordinary;
  Polarization idler = Polarization::Ordinary;

  static PhaseMatchingType parse(std::string_view code);
  std::string code() const;
};

/// Collection directions: alpha_* are the absolute angles to z, phi the
/// azimuth of the emission plane (unit vector m = (cos phi, sin phi)).
struct CollectionGeometry {
  double alpha_i = 0.0;
  double alpha_s = 0.0;
  double phi = 0.0;
  bool exact_sine = false;  // sin(alpha) instead of alpha
};

struct BeamWaist {
  double x = 0.0;  // um
  double y = 0.0;
  double operator[](int axis) const { return axis == 0 ? x : y; }
};

struct PumpBeam {
  double omega0 = 0.0;  // rad/fs
  double tau = 0.0;     // fs; 1/(2 tau) is the std-dev of |A|^2
  BeamWaist waist;
  Polarization polarization = Polarization::Extraordinary;
};

struct CollectedBeam {
  double omega = 0.0;  // central frequency Omega
  BeamWaist waist;
  Polarization polarization = Polarization::Ordinary;
};

struct SourceSetup {
  CrystalModel crystal;
  PumpBeam pump;
  CollectedBeam signal;
  CollectedBeam idler;
  CollectionGeometry geometry;

  PhaseMatchingType pm_type() const { return {pump.polarization, signal.polarization, idler.polarization}; }
};

/// Degenerate symmetric configuration: w_i = w_s = w, w_p = r w on both
/// axes, Omega_i = Omega_s = omega0 / 2, alpha_i = alpha_s = alpha.
SourceSetup degenerate_setup(const CrystalModel& crystal, double pump_wavelength_um, double tau_fs, double waist_um,
                             double ratio, double alpha, double phi, PhaseMatchingType pm);

struct SetupCheck {
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

/// Energy and transverse matching, paraxial waist floor (w >= 5 lambda
/// rejected below, warned below 20 lambda), small-angle validity.
SetupCheck check_setup(const SourceSetup& setup);

struct CentralWavevectors {
  TransverseWavevector idler;
  TransverseWavevector signal;
};

/// Gaussian mode centres of the collected photons at frequencies
/// (omega_i, omega_s); the idler points along +m, the signal along -m.
CentralWavevectors collection_wavevectors(const SourceSetup& setup, double omega_i, double omega_s);

/// m 2pi/Lambda + k_pz(k_i + k_s, omega_i + omega_s) - k_iz - k_sz.
double phase_mismatch(TransverseWavevector k_i, double omega_i, TransverseWavevector k_s, double omega_s,
                      const SourceSetup& setup);

/// Cut angle zeroing the phase mismatch at the central frequencies and
/// central wavevectors. Brackets are found on a 0.5 degree scan of
/// [0, pi/2] and refined by safeguarded secant steps. DomainError when no
/// sign change exists. `omega_signal` defaults to omega0 / 2; the idler
/// takes the rest and its angle follows from transverse matching.
double solve_pm_angle(const CrystalModel& crystal, double omega0, const CollectionGeometry& geometry,
                      PhaseMatchingType pm, std::optional<double> omega_signal = std::nullopt);

/// Copy of `setup` with the crystal cut angle set by solve_pm_angle.
SourceSetup with_phase_matched_cut(SourceSetup setup);

}  // namespace spdc
