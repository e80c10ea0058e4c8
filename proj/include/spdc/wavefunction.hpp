#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "spdc/dispersion.hpp"
#include "spdc/geometry.hpp"

namespace spdc {

/// Normalized Gaussian pump spectrum; |A|^2 has standard deviation 1/(2 tau).
double pump_spectral_amplitude(double omega_p, double omega0, double tau);

enum class Beam { Pump = 0, Idler = 1, Signal = 2 };

struct ExpansionCenter {
  TransverseWavevector idler;
  TransverseWavevector signal;
  TransverseWavevector pump;  // idler + signal
};

/// Maximum of the three-mode Gaussian overlap at (omega_i, omega_s).
ExpansionCenter expansion_center(const SourceSetup& setup, double omega_i, double omega_s);

struct BeamExpansion {
  TransverseWavevector kbar;
  double omega = 0.0;
  BeamWaist waist;
  KzJet jet;
  std::array<double, 2> xi{};  // -L K2^{mu mu} / w^2
  std::array<double, 2> nu{};  // -L K1^mu / (2 w)
};

/// Per-axis aggregates entering the factorized Z-integrand.
struct AxisExpansion {
  double wbar2 = 0.0;  // 1/wbar^2 = sum_a 1/w_a^2
  double delta2_is = 0.0;
  double delta2_ps = 0.0;
  double delta2_pi = 0.0;
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double xi = 0.0;  // aggregate focal parameter

  std::complex<double> Q(double Z) const { return {A, -B * Z}; }
  std::complex<double> F(double Z) const { return {1.0 + C * Z * Z, xi * Z}; }
};

struct ParaxialBundle {
  double omega_i = 0.0;
  double omega_s = 0.0;
  double length = 0.0;
  TransverseWavevector k0_idler;
  TransverseWavevector k0_signal;
  std::array<BeamExpansion, 3> beams;  // indexed by Beam
  std::array<AxisExpansion, 2> axes;
  double delta_kz = 0.0;  // phase mismatch at the expansion centre

  const BeamExpansion& beam(Beam b) const { return beams[static_cast<int>(b)]; }
  /// w^2 (1 - i Z xi), the q-parameter at z = L Z / 2.
  std::complex<double> q(Beam b, int axis, double Z) const;
  /// -w^2 / (2 K2^{mu mu}).
  double rayleigh_range(Beam b, int axis) const;
};

ParaxialBundle paraxial_params(const SourceSetup& setup, double omega_i, double omega_s);

struct JsaSample {
  double omega_i = 0.0;
  double omega_s = 0.0;
  std::complex<double> amplitude{};
  double abs_error = 0.0;
  int panels = 0;
};

struct ZIntegralOptions {
  double rel_tol = 1e-8;
  int max_panels = 4096;
};

/// Spatial part Phi of the amplitude (Psi = A_p(omega_i + omega_s) Phi),
/// in-plane emission only (phi a multiple of pi/2). DomainError otherwise;
/// QuadratureError when the Z-integral does not converge.
JsaSample phi_factorized(const SourceSetup& setup, double omega_i, double omega_s, const ZIntegralOptions& opts = {});
JsaSample psi_factorized(const SourceSetup& setup, double omega_i, double omega_s, const ZIntegralOptions& opts = {});

/// Same quantity from the 4x4 matrix form, valid for any azimuth.
JsaSample phi_general(const SourceSetup& setup, double omega_i, double omega_s, const ZIntegralOptions& opts = {});
JsaSample psi_general(const SourceSetup& setup, double omega_i, double omega_s, const ZIntegralOptions& opts = {});

/// M2(Z) and M1(Z) of the matrix form, ordering (k_ix, k_sx, k_iy, k_sy).
struct MatrixForm {
  std::array<std::array<std::complex<double>, 4>, 4> m2{};
  std::array<std::complex<double>, 4> m1{};
};
MatrixForm matrix_form(const ParaxialBundle& bundle, double Z);

struct BruteForceOptions {
  int nodes_start = 12;  // Gauss-Hermite nodes per transverse dimension
  int nodes_max = 48;
  double rel_tol = 1e-6;
};

struct BruteForceResult {
  std::complex<double> value{};
  double abs_error = 0.0;
  int nodes = 0;
  bool converged = false;
};

/// Phi from the unexpanded overlap integral with exact k_z. The Z-integral
/// is done in closed form (2 sinc(L dk / 2)); the four transverse
/// dimensions use Gauss-Hermite nodes in coordinates whitening the Gaussian
/// overlap around kbar. Node count doubles until the change is below
/// rel_tol; the result reports converged = false instead of throwing.
BruteForceResult brute_force_phi(const SourceSetup& setup, double omega_i, double omega_s,
                                 const BruteForceOptions& opts = {});

/// |u_p u_i* u_s*| at (k_i, k_s), the modulus of the overlap integrand.
double overlap_modulus(const SourceSetup& setup, double omega_i, double omega_s, TransverseWavevector k_i,
                       TransverseWavevector k_s);

struct IntegrandMapCell {
  double k_ix = 0.0;
  double k_sx = 0.0;
  double overlap = 0.0;     // normalized to the map maximum
  double with_phase = 0.0;  // overlap times |sinc(L dk / 2)|, normalized
};

struct IntegrandMap {
  std::vector<IntegrandMapCell> cells;  // row-major, k_ix slowest
  int points = 0;
  double kbar_ix = 0.0, kbar_sx = 0.0;
  double k0_ix = 0.0, k0_sx = 0.0;
};

/// Overlap landscape over (k_ix, k_sx) with k_iy = k_sy = 0, centred on
/// kbar with a half-span of `widths` Gaussian widths.
IntegrandMap integrand_map(const SourceSetup& setup, double omega_i, double omega_s, int points, double widths = 4.0);

/// Centroid of |u(mu, z)|^2 for one beam, obtained by evaluating the
/// transverse Fourier integral with the exact k_z along `axis` (the other
/// transverse component held at kbar). Used to check that the exit-face
/// shift equals w * nu.
double real_space_centroid(const WaveCoefficients& wave, TransverseWavevector kbar, int axis, double waist, double z);

}  // namespace spdc
