#include "spdc/thinlimit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spdc/quadrature.hpp"

namespace spdc {
namespace {

using cd = std::complex<double>;

double rho2(double r, double w) {
  const double s = 1.0 + 2.0 * r * r;
  return r * r / (s * s * w * w);
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// Waist prefactor and transverse Gaussian suppression shared by the thin
// amplitudes: prod_mu (wbar^2 / (w_p w_i w_s))^(1/2) exp(-wbar^2 S^2 / 4).
double thin_transverse_factor(const SourceSetup& s, double omega_i, double omega_s) {
  const auto k0 = collection_wavevectors(s, omega_i, omega_s);
  double f = 1.0;
  for (int mu = 0; mu < 2; ++mu) {
    const double wp = s.pump.waist[mu], wi = s.idler.waist[mu], ws = s.signal.waist[mu];
    const double wbar2 = 1.0 / (1.0 / (wp * wp) + 1.0 / (wi * wi) + 1.0 / (ws * ws));
    const double sum = k0.idler[mu] + k0.signal[mu];
    f *= std::sqrt(wbar2 / (wp * wi * ws)) * std::exp(-0.25 * wbar2 * sum * sum);
  }
  return f;
}

// log of d_n, computed on a window around the integrand peak so that large
// n does not overflow.
double log_d_coefficient(int n, const ThinConfig& cfg) {
  if (n < 0) throw std::invalid_argument("d coefficient order must be non-negative");
  const double y0 = cfg.tau * (cfg.omega0 - 2.0 * cfg.omega_b);
  const double upper = cfg.tau * (cfg.omega_t - 2.0 * cfg.omega_b);
  const double p = 1.0 + 2.0 * n;
  const double peak = std::clamp(0.5 * (y0 + std::sqrt(y0 * y0 + p)), 1e-300, upper);
  const double log_peak = std::log(peak);
  auto f = [&](double y) {
    if (y <= 0.0) return 0.0;
    const double d = y - y0;
    return std::exp(-2.0 * d * d + p * (std::log(y) - log_peak));
  };
  const double half = 10.0 + 2.0 * std::sqrt(p);
  const double a = std::max(0.0, peak - half);
  const double b = std::min(upper, peak + half);
  double sum = 0.0;
  if (a > 0.0) sum += quad::integrate_adaptive(f, 0.0, a, 1e-13, 0.0, 4000).value;
  sum += quad::integrate_adaptive(f, a, b, 1e-13, 0.0, 4000).value;
  if (b < upper) sum += quad::integrate_adaptive(f, b, upper, 1e-13, 0.0, 4000).value;
  return std::log(sum) + p * log_peak;
}

// 2 * int_0^X exp(-a v^2) dv
double window_v_integral(double X, double a) {
  if (X <= 0.0) return 0.0;
  return std::sqrt(kPi) * X * erf_over_x(std::sqrt(a) * X);
}

}  // namespace

double erf_over_x(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-3) {
    const double x2 = x * x;
    return 2.0 / std::sqrt(kPi) * (1.0 - x2 / 3.0 + x2 * x2 / 10.0 - x2 * x2 * x2 / 42.0);
  }
  return std::erf(x) / x;
}

double ThinConfig::transition_parameter(double r) const {
  return alpha * std::sqrt(wbar2(r)) * (omega0 - 2.0 * omega_b) / kSpeedOfLight;
}

double ThinConfig::series_parameter(double r) const {
  const double x = alpha * w * (omega_t - 2.0 * omega_b) / kSpeedOfLight;
  return r * r / (1.0 + 2.0 * r * r) * x * x;
}

std::complex<double> phi_thin_perfect(const SourceSetup& setup, double omega_i, double omega_s) {
  return 4.0 * std::sqrt(2.0 * kPi) * setup.crystal.length * thin_transverse_factor(setup, omega_i, omega_s);
}

std::complex<double> phi_thin(const SourceSetup& setup, double omega_i, double omega_s) {
  const auto c = expansion_center(setup, omega_i, omega_s);
  const double dk = phase_mismatch(c.idler, omega_i, c.signal, omega_s, setup);
  return phi_thin_perfect(setup, omega_i, omega_s) * sinc(0.5 * setup.crystal.length * dk);
}

std::complex<double> psi_thin(const SourceSetup& setup, double omega_i, double omega_s) {
  return pump_spectral_amplitude(omega_i + omega_s, setup.pump.omega0, setup.pump.tau) *
         phi_thin(setup, omega_i, omega_s);
}

double d_coefficient(int n, const ThinConfig& cfg) { return std::exp(log_d_coefficient(n, cfg)); }

double brightness_collinear(double r, const ThinConfig& cfg) {
  const double prefactor = 32.0 * std::sqrt(2.0 * kPi) * cfg.L * cfg.L * rho2(r, cfg.w) / cfg.tau;
  return prefactor * d_coefficient(0, cfg);
}

double brightness_large_angle(double r, const ThinConfig& cfg) {
  if (!(cfg.alpha > 0.0)) throw DomainError("large-angle brightness needs alpha > 0");
  const double s = 1.0 + 2.0 * r * r;
  const double bracket = std::erf(std::sqrt(2.0) * cfg.tau * (cfg.omega0 - 2.0 * cfg.omega_b)) -
                         std::erf(std::sqrt(2.0) * cfg.tau * (cfg.omega0 - cfg.omega_t));
  return 8.0 * std::sqrt(2.0) * std::pow(kPi, 1.5) * cfg.L * cfg.L * kSpeedOfLight * r /
         (std::pow(s, 1.5) * cfg.w * cfg.w * cfg.w * cfg.alpha) * bracket;
}

SeriesResult brightness_series(double r, const ThinConfig& cfg, int n_max) {
  if (n_max < 0) throw std::invalid_argument("series order must be non-negative");
  const double prefactor = 32.0 * std::sqrt(2.0 * kPi) * cfg.L * cfg.L * rho2(r, cfg.w) / cfg.tau;
  SeriesResult out;
  const double ratio = r * r / (1.0 + 2.0 * r * r);
  const double x = cfg.alpha * cfg.w / (cfg.tau * kSpeedOfLight);
  auto term = [&](int n) {
    if (n > 0 && x == 0.0) return 0.0;
    const double log_mag = -n * std::log(2.0) - std::log(1.0 + 2.0 * n) - std::lgamma(n + 1.0) +
                           n * std::log(ratio) + (n > 0 ? 2.0 * n * std::log(x) : 0.0) + log_d_coefficient(n, cfg);
    const double mag = std::exp(log_mag);
    return (n % 2 == 0) ? mag : -mag;
  };
  double sum = 0.0, largest = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const double t = term(n);
    sum += t;
    largest = std::max(largest, std::abs(t));
    out.terms = n + 1;
  }
  if (largest > 1e8 * std::abs(sum)) {
    std::ostringstream msg;
    msg << "small-angle series loses more than eight digits to cancellation (largest term " << largest
        << ", sum " << sum << "); use the exact thin-limit quadrature";
    throw DomainError(msg.str());
  }
  const double next = std::abs(term(n_max + 1));
  if (next > std::abs(sum)) {
    std::ostringstream msg;
    msg << "small-angle series has not started to converge at order " << n_max << " (next term " << next
        << ", sum " << sum << "); use the exact thin-limit quadrature";
    throw DomainError(msg.str());
  }
  out.value = prefactor * sum;
  out.remainder_bound = prefactor * next;
  return out;
}

ThinIntegral brightness_exact_thin_result(double r, const ThinConfig& cfg, int refinement) {
  const double a = cfg.wbar2(r) * cfg.alpha * cfg.alpha / (2.0 * kSpeedOfLight * kSpeedOfLight);
  const double prefactor = 16.0 * std::sqrt(2.0 * kPi) * cfg.L * cfg.L * cfg.tau * rho2(r, cfg.w);
  const double lo = 2.0 * cfg.omega_b, hi = cfg.omega_t;
  auto g = [&](double u) { return window_v_integral(std::min(u - lo, 2.0 * cfg.omega_t - u), a); };
  const double sigma = 1.0 / (2.0 * cfg.tau);
  ThinIntegral out;
  if (cfg.omega0 - 8.0 * sigma > lo && cfg.omega0 + 8.0 * sigma < hi) {
    // Gauss-Hermite in x = sqrt(2) tau (u - omega0).
    const double scale = 1.0 / (std::sqrt(2.0) * cfg.tau);
    auto level = [&](int n) {
      const auto& gh = quad::gauss_hermite(n);
      double s = 0.0;
      for (std::size_t j = 0; j < gh.nodes.size(); ++j) s += gh.weights[j] * g(cfg.omega0 + scale * gh.nodes[j]);
      return s * scale;
    };
    const int start = 16 << refinement;
    double prev = level(start);
    for (int n = 2 * start; n <= (256 << refinement); n *= 2) {
      const double cur = level(n);
      out.value = prefactor * cur;
      // The floor covers summation round-off of a few hundred terms.
      out.abs_error = prefactor * (std::abs(cur - prev) + 1e-14 * std::abs(cur));
      if (std::abs(cur - prev) <= 1e-12 * std::abs(cur)) break;
      prev = cur;
    }
    return out;
  }
  auto f = [&](double u) {
    const double d = u - cfg.omega0;
    return std::exp(-2.0 * cfg.tau * cfg.tau * d * d) * g(u);
  };
  const double a0 = std::max(lo, cfg.omega0 - 8.0 * sigma);
  const double b0 = std::min(hi, cfg.omega0 + 8.0 * sigma);
  if (a0 >= b0) return out;
  const double mid = std::clamp(cfg.omega0, a0, b0);
  const double tol = 1e-12 / std::pow(4.0, refinement);
  const auto left = quad::integrate_adaptive(f, a0, mid, tol);
  const auto right = quad::integrate_adaptive(f, mid, b0, tol);
  out.value = prefactor * (left.value + right.value);
  out.abs_error = prefactor * (left.abs_error + right.abs_error + 1e-14 * std::abs(left.value + right.value));
  return out;
}

double brightness_exact_thin(double r, const ThinConfig& cfg) { return brightness_exact_thin_result(r, cfg).value; }

double brightness_thin(double r, const ThinConfig& cfg) {
  if (cfg.series_parameter(r) >= 4.0) return brightness_exact_thin(r, cfg);
  for (int n = 4;; n *= 2) {
    const auto s = brightness_series(r, cfg, n);
    if (s.remainder_bound <= 1e-12 * std::abs(s.value) || n >= 512) return s.value;
  }
}

FilteredBrightness brightness_filtered(double r, const ThinConfig& cfg, int refinement) {
  if (!cfg.delta || !(*cfg.delta > 0.0)) throw std::invalid_argument("filtered brightness needs a positive delta");
  const double delta = *cfg.delta;
  const double a = cfg.wbar2(r) * cfg.alpha * cfg.alpha / (2.0 * kSpeedOfLight * kSpeedOfLight);
  const double base = 16.0 * std::sqrt(2.0 * kPi) * cfg.L * cfg.L * cfg.tau * rho2(r, cfg.w);
  auto f = [&](double u) { return std::exp(-2.0 * cfg.tau * cfg.tau * u * u) * window_v_integral(2.0 * delta - u, a); };
  FilteredBrightness out;
  const auto integral = quad::integrate_adaptive(f, 0.0, 2.0 * delta, 1e-13 / std::pow(4.0, refinement));
  out.exact = base * 2.0 * integral.value;
  out.exact_abs_error = base * 2.0 * (integral.abs_error + 1e-14 * std::abs(integral.value));
  const double correction = cfg.alpha * cfg.alpha * cfg.w * cfg.w * delta * delta * r * r /
                            (3.0 * kSpeedOfLight * kSpeedOfLight * (1.0 + 2.0 * r * r));
  out.third_order = base * 8.0 * delta * delta * (1.0 - correction);
  return out;
}

double filter_half_width(double center_um, double width_um) {
  if (!(width_um > 0.0 && width_um < 2.0 * center_um)) throw std::invalid_argument("filter width out of range");
  return 0.5 * (wavelength_to_omega(center_um - 0.5 * width_um) - wavelength_to_omega(center_um + 0.5 * width_um));
}

double anisotropic_rate(double phi, const AnisotropicWaists& waists) {
  double product = 1.0;
  double wbar2[2];
  for (int mu = 0; mu < 2; ++mu) {
    const double wp = waists.pump[mu], wi = waists.idler[mu], ws = waists.signal[mu];
    if (!(wp > 0.0 && wi > 0.0 && ws > 0.0)) throw std::invalid_argument("waists must be positive");
    wbar2[mu] = 1.0 / (1.0 / (wp * wp) + 1.0 / (wi * wi) + 1.0 / (ws * ws));
    product *= wbar2[mu] / (wp * wi * ws);
  }
  const double c = std::cos(phi), s = std::sin(phi);
  return product / std::sqrt(wbar2[0] * c * c + wbar2[1] * s * s);
}

OptimalPhi optimal_phi(const AnisotropicWaists& waists, double rel_tol) {
  double wbar2[2];
  for (int mu = 0; mu < 2; ++mu) {
    const double wp = waists.pump[mu], wi = waists.idler[mu], ws = waists.signal[mu];
    wbar2[mu] = 1.0 / (1.0 / (wp * wp) + 1.0 / (wi * wi) + 1.0 / (ws * ws));
  }
  if (std::abs(wbar2[0] - wbar2[1]) <= rel_tol * std::max(wbar2[0], wbar2[1])) return {OptimalPhiKind::Any, 0.0};
  if (wbar2[0] > wbar2[1]) return {OptimalPhiKind::OddHalfPi, kPi / 2.0};
  return {OptimalPhiKind::MultiplesOfPi, 0.0};
}

double walkoff_slope(double omega, const CrystalModel& crystal) {
  const auto n = refractive_indices(omega, crystal);
  const double nt = index_at_angle(n, crystal.cut_angle);
  const double th = crystal.cut_angle;
  return nt * nt * (1.0 / (n.extraordinary * n.extraordinary) - 1.0 / (n.ordinary * n.ordinary)) * std::sin(th) *
         std::cos(th);
}

double brightness_walkoff_collinear(double r, const ThinConfig& cfg) {
  const double s = 1.0 + 2.0 * r * r;
  const double scale = cfg.L / (std::sqrt(2.0) * cfg.w * std::sqrt(s));
  const double e = scale * erf_over_x(cfg.beta_p * scale);  // erf(L beta / ...) / beta
  return 16.0 * std::sqrt(2.0) * std::pow(kPi, 1.5) * d_coefficient(0, cfg) / cfg.tau * (r * r / s) * e * e;
}

std::complex<double> phi_first_order_xi(const ParaxialBundle& b) {
  double prefactor = 2.0 * std::sqrt(2.0 * kPi) * b.length;
  for (int mu = 0; mu < 2; ++mu) {
    const double sum = b.k0_idler[mu] + b.k0_signal[mu];
    const double w3 = b.beam(Beam::Pump).waist[mu] * b.beam(Beam::Idler).waist[mu] * b.beam(Beam::Signal).waist[mu];
    prefactor *= std::sqrt(b.axes[mu].wbar2 / w3) * std::exp(-0.25 * b.axes[mu].wbar2 * sum * sum);
  }
  const double A = b.axes[0].A + b.axes[1].A;
  return prefactor * std::sqrt(kPi) * erf_over_x(std::sqrt(A));
}

std::complex<double> psi_first_order_xi(const SourceSetup& setup, double omega_i, double omega_s) {
  return pump_spectral_amplitude(omega_i + omega_s, setup.pump.omega0, setup.pump.tau) *
         phi_first_order_xi(paraxial_params(setup, omega_i, omega_s));
}

}  // namespace spdc
