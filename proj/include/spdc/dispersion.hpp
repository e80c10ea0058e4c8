#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spdc/constants.hpp"

namespace spdc {

enum class Polarization { Ordinary, Extraordinary };

inline char polarization_code(Polarization p) { return p == Polarization::Ordinary ? 'o' : 'e'; }

/// n^2(lambda) = a + sum_j b_j / (lambda^2 - c_j) + sum_k d_k lambda^(2k),
/// lambda in micrometres. Covers the usual published fits for BBO, KDP,
/// LBO, ... and a dispersionless test medium (only `a`).
struct SellmeierCoefficients {
  double a = 1.0;
  std::vector<std::pair<double, double>> poles;
  std::vector<double> poly;

  double index_squared(double lambda_um) const;
  double index(double lambda_um) const;
};

struct TransmissionWindow {
  double omega_min = 0.0;  // rad/fs
  double omega_max = 0.0;
  bool contains(double omega) const { return omega >= omega_min && omega <= omega_max; }
};

struct CrystalModel {
  std::string name;
  SellmeierCoefficients ordinary;
  SellmeierCoefficients extraordinary;
  TransmissionWindow window;
  double length = 0.0;                  // um
  std::optional<double> poling_period;  // um
  int poling_order = 0;
  double cut_angle = 0.0;  // rad, optical axis to z in the (y,z) plane

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
  /// m * 2 pi / Lambda, zero when unpoled.
  double poling_wavevector() const;
};

struct PrincipalIndices {
  double ordinary = 1.0;
  double extraordinary = 1.0;
};

/// Both principal indices at omega. DomainError outside the window.
PrincipalIndices refractive_indices(double omega, const CrystalModel& crystal);

/// 1/n^2 = sin^2(theta)/n_e^2 + cos^2(theta)/n_o^2.
double index_at_angle(const PrincipalIndices& n, double theta);
double index_at_angle(double omega, double theta, const CrystalModel& crystal);

struct TransverseWavevector {
  double kx = 0.0;  // rad/um
  double ky = 0.0;

  TransverseWavevector operator+(const TransverseWavevector& o) const { return {kx + o.kx, ky + o.ky}; }
  TransverseWavevector operator-(const TransverseWavevector& o) const { return {kx - o.kx, ky - o.ky}; }
  TransverseWavevector operator*(double s) const { return {kx * s, ky * s}; }
  double operator[](int axis) const { return axis == 0 ? kx : ky; }
};

/// Coefficients of the uniaxial dispersion relation written as
///   k_z = beta k_y + sqrt((n w/c)^2 - (gamma k_x)^2 - (gamma n/n_o k_y)^2).
/// Ordinary waves have n = n_o, gamma = 1, beta = 0.
struct WaveCoefficients {
  double omega = 0.0;
  double n = 1.0;
  double n_o = 1.0;
  double gamma = 1.0;
  double beta = 0.0;
};

WaveCoefficients wave_coefficients(const PrincipalIndices& indices, double theta, Polarization pol, double omega);
WaveCoefficients wave_coefficients(double omega, Polarization pol, const CrystalModel& crystal);

/// Exact longitudinal component. DomainError for evanescent k.
double kz(const WaveCoefficients& wave, TransverseWavevector k);
double kz(TransverseWavevector k, double omega, Polarization pol, const CrystalModel& crystal);

/// k_z with its gradient (K1) and Hessian (K2) in (k_x, k_y).
struct KzJet {
  double kz = 0.0;
  std::array<double, 2> k1{};
  std::array<std::array<double, 2>, 2> k2{};
};

/// ConditioningError when the radicand falls below 1e-6 (n w/c)^2.
KzJet kz_jet(const WaveCoefficients& wave, TransverseWavevector kbar);
KzJet kz_jet(TransverseWavevector kbar, double omega, Polarization pol, const CrystalModel& crystal);

}  // namespace spdc
