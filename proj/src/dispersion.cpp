#include "spdc/dispersion.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spdc {

double SellmeierCoefficients::index_squared(double lambda_um) const {
  const double l2 = lambda_um * lambda_um;
  double n2 = a;
  for (const auto& [b, c] : poles) n2 += b / (l2 - c);
  double power = l2;
  for (double d : poly) {
    n2 += d * power;
    power *= l2;
  }
  return n2;
}

double SellmeierCoefficients::index(double lambda_um) const {
  const double n2 = index_squared(lambda_um);
  if (!(n2 > 0.0)) throw DomainError("Sellmeier fit gives non-positive n^2");
  return std::sqrt(n2);
}

void CrystalModel::validate() const {
  if (!(window.omega_min > 0.0 && window.omega_min < window.omega_max))
    throw std::invalid_argument("crystal '" + name + "': transmission window needs 0 < omega_b < omega_t");
  if (!(length > 0.0)) throw std::invalid_argument("crystal '" + name + "': length must be positive");
  if (poling_period && !(*poling_period > 0.0))
    throw std::invalid_argument("crystal '" + name + "': poling period must be positive");
  if (!(cut_angle >= 0.0 && cut_angle <= kPi / 2))
    throw std::invalid_argument("crystal '" + name + "': cut angle must lie in [0, pi/2]");
  constexpr int kSamples = 64;
  for (int i = 0; i <= kSamples; ++i) {
    const double omega = window.omega_min + (window.omega_max - window.omega_min) * i / kSamples;
    const double lambda = omega_to_wavelength(omega);
    for (const auto* s : {&ordinary, &extraordinary}) {
      const double n2 = s->index_squared(lambda);
      if (!(n2 > 1.0 && n2 < 9.0)) {
        std::ostringstream msg;
        msg << "crystal '" << name << "': index outside (1, 3) at lambda = " << lambda << " um";
        throw std::invalid_argument(msg.str());
      }
    }
  }
}

double CrystalModel::poling_wavevector() const {
  if (!poling_period || poling_order == 0) return 0.0;
  return poling_order * 2.0 * kPi / *poling_period;
}

PrincipalIndices refractive_indices(double omega, const CrystalModel& crystal) {
  if (!crystal.window.contains(omega)) {
    std::ostringstream msg;
    msg << "omega = " << omega << " rad/fs outside transmission window [" << crystal.window.omega_min << ", "
        << crystal.window.omega_max << "]";
    throw DomainError(msg.str());
  }
  const double lambda = omega_to_wavelength(omega);
  return {crystal.ordinary.index(lambda), crystal.extraordinary.index(lambda)};
}

double index_at_angle(const PrincipalIndices& n, double theta) {
  const double s = std::sin(theta), c = std::cos(theta);
  return 1.0 / std::sqrt(s * s / (n.extraordinary * n.extraordinary) + c * c / (n.ordinary * n.ordinary));
}

double index_at_angle(double omega, double theta, const CrystalModel& crystal) {
  return index_at_angle(refractive_indices(omega, crystal), theta);
}

WaveCoefficients wave_coefficients(const PrincipalIndices& indices, double theta, Polarization pol, double omega) {
  WaveCoefficients w;
  w.omega = omega;
  w.n_o = indices.ordinary;
  if (pol == Polarization::Ordinary) {
    w.n = indices.ordinary;
    w.gamma = 1.0;
    w.beta = 0.0;
  } else {
    w.n = index_at_angle(indices, theta);
    w.gamma = w.n / indices.extraordinary;
    w.beta = (w.gamma * w.gamma - (w.n * w.n) / (w.n_o * w.n_o)) * std::sin(theta) * std::cos(theta);
  }
  return w;
}

WaveCoefficients wave_coefficients(double omega, Polarization pol, const CrystalModel& crystal) {
  return wave_coefficients(refractive_indices(omega, crystal), crystal.cut_angle, pol, omega);
}

namespace {

struct Radicand {
  double value;
  double k_medium_sq;
  double gx2;  // gamma^2
  double gy2;  // (gamma n / n_o)^2
};

Radicand radicand(const WaveCoefficients& w, TransverseWavevector k) {
  const double km = w.n * w.omega / kSpeedOfLight;
  const double gx2 = w.gamma * w.gamma;
  const double ratio = w.gamma * w.n / w.n_o;
  const double gy2 = ratio * ratio;
  return {km * km - gx2 * k.kx * k.kx - gy2 * k.ky * k.ky, km * km, gx2, gy2};
}

}  // namespace

double kz(const WaveCoefficients& wave, TransverseWavevector k) {
  const auto r = radicand(wave, k);
  if (!(r.value > 0.0)) throw DomainError("evanescent transverse wavevector (k_z radicand <= 0)");
  return wave.beta * k.ky + std::sqrt(r.value);
}

double kz(TransverseWavevector k, double omega, Polarization pol, const CrystalModel& crystal) {
  return kz(wave_coefficients(omega, pol, crystal), k);
}

KzJet kz_jet(const WaveCoefficients& wave, TransverseWavevector kbar) {
  const auto r = radicand(wave, kbar);
  if (!(r.value > 0.0)) throw DomainError("evanescent transverse wavevector (k_z radicand <= 0)");
  if (r.value < 1e-6 * r.k_medium_sq)
    throw ConditioningError("transverse wavevector too close to the evanescence boundary for a k_z expansion");
  const double s = std::sqrt(r.value);
  // d(radicand)/dk_mu and the constant second derivatives.
  const double rx = -2.0 * r.gx2 * kbar.kx;
  const double ry = -2.0 * r.gy2 * kbar.ky;
  const double rxx = -2.0 * r.gx2;
  const double ryy = -2.0 * r.gy2;
  const double s3 = s * s * s;
  KzJet jet;
  jet.kz = wave.beta * kbar.ky + s;
  jet.k1 = {rx / (2.0 * s), wave.beta + ry / (2.0 * s)};
  jet.k2[0][0] = rxx / (2.0 * s) - rx * rx / (4.0 * s3);
  jet.k2[1][1] = ryy / (2.0 * s) - ry * ry / (4.0 * s3);
  jet.k2[0][1] = jet.k2[1][0] = -rx * ry / (4.0 * s3);
  return jet;
}

KzJet kz_jet(TransverseWavevector kbar, double omega, Polarization pol, const CrystalModel& crystal) {
  return kz_jet(wave_coefficients(omega, pol, crystal), kbar);
}

}  // namespace spdc
