#include "spdc/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spdc {
namespace {

Polarization parse_polarization(char c) {
  if (c == 'o' || c == 'O') return Polarization::Ordinary;
  if (c == 'e' || c == 'E') return Polarization::Extraordinary;
  throw std::invalid_argument(std::string("unknown polarization code '") + c + "'");
}

double transverse_scale(double alpha, bool exact_sine) { return exact_sine ? std::sin(alpha) : alpha; }

}  // namespace

PhaseMatchingType PhaseMatchingType::parse(std::string_view code) {
  if (code.size() != 3) throw std::invalid_argument("phase-matching type needs three letters (pump, signal, idler)");
  return {parse_polarization(code[0]), parse_polarization(code[1]), parse_polarization(code[2])};
}

std::string PhaseMatchingType::code() const {
  return {polarization_code(pump), polarization_code(signal), polarization_code(idler)};
}

SourceSetup degenerate_setup(const CrystalModel& crystal, double pump_wavelength_um, double tau_fs, double waist_um,
                             double ratio, double alpha, double phi, PhaseMatchingType pm) {
  SourceSetup s;
  s.crystal = crystal;
  s.pump.omega0 = wavelength_to_omega(pump_wavelength_um);
  s.pump.tau = tau_fs;
  s.pump.waist = {ratio * waist_um, ratio * waist_um};
  s.pump.polarization = pm.pump;
  s.signal = {s.pump.omega0 / 2.0, {waist_um, waist_um}, pm.signal};
  s.idler = {s.pump.omega0 / 2.0, {waist_um, waist_um}, pm.idler};
  s.geometry = {alpha, alpha, phi, false};
  return s;
}

SetupCheck check_setup(const SourceSetup& setup) {
  SetupCheck check;
  const auto& g = setup.geometry;
  const double omega0 = setup.pump.omega0;
  auto fmt = [](auto&&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    return os.str();
  };
  try {
    setup.crystal.validate();
  } catch (const std::exception& e) {
    check.errors.push_back(e.what());
  }
  if (!(setup.pump.tau > 0.0)) check.errors.push_back("pump tau must be positive");
  if (!(omega0 > 0.0)) check.errors.push_back("pump frequency must be positive");
  const double sum = setup.signal.omega + setup.idler.omega;
  if (std::abs(sum - omega0) > 1e-12 * omega0)
    check.errors.push_back(fmt("energy matching violated: Omega_i + Omega_s = ", sum, " != omega0 = ", omega0));
  if (g.alpha_i < 0.0 || g.alpha_s < 0.0) check.errors.push_back("collection angles must be non-negative");
  const double ti = setup.idler.omega * transverse_scale(g.alpha_i, g.exact_sine);
  const double ts = setup.signal.omega * transverse_scale(g.alpha_s, g.exact_sine);
  if (std::abs(ti - ts) > 1e-12 * std::max({1.0, std::abs(ti), std::abs(ts)}))
    check.errors.push_back("transverse matching violated: Omega_i sin(alpha_i) != Omega_s sin(alpha_s)");
  if (std::max(g.alpha_i, g.alpha_s) > 0.2)
    check.warnings.push_back("collection angle above 0.2 rad: small-angle Gaussian modes are inaccurate");

  struct Beam {
    const char* name;
    double omega;
    BeamWaist waist;
  };
  for (const Beam& b : {Beam{"pump", omega0, setup.pump.waist}, Beam{"signal", setup.signal.omega, setup.signal.waist},
                        Beam{"idler", setup.idler.omega, setup.idler.waist}}) {
    if (!(b.omega > 0.0)) continue;
    const double lambda = omega_to_wavelength(b.omega);
    for (int axis = 0; axis < 2; ++axis) {
      const double w = b.waist[axis];
      const char* ax = axis == 0 ? "x" : "y";
      if (!(w >= 5.0 * lambda))
        check.errors.push_back(fmt(b.name, " waist (", ax, ") = ", w, " um is below the paraxial floor 5 lambda = ",
                                   5.0 * lambda, " um"));
      else if (w < 20.0 * lambda)
        check.warnings.push_back(fmt(b.name, " waist (", ax, ") = ", w, " um is below 20 lambda = ", 20.0 * lambda,
                                     " um; paraxial accuracy degrades"));
    }
  }
  if (!setup.crystal.window.contains(omega0) || !setup.crystal.window.contains(setup.signal.omega) ||
      !setup.crystal.window.contains(setup.idler.omega))
    check.errors.push_back("central frequencies must lie inside the transmission window");
  return check;
}

CentralWavevectors collection_wavevectors(const SourceSetup& setup, double omega_i, double omega_s) {
  const auto& g = setup.geometry;
  const TransverseWavevector m{std::cos(g.phi), std::sin(g.phi)};
  const double ki = omega_i * transverse_scale(g.alpha_i, g.exact_sine) / kSpeedOfLight;
  const double ks = omega_s * transverse_scale(g.alpha_s, g.exact_sine) / kSpeedOfLight;
  return {m * ki, m * (-ks)};
}

double phase_mismatch(TransverseWavevector k_i, double omega_i, TransverseWavevector k_s, double omega_s,
                      const SourceSetup& setup) {
  const auto& c = setup.crystal;
  const double kp = kz(k_i + k_s, omega_i + omega_s, setup.pump.polarization, c);
  const double ki = kz(k_i, omega_i, setup.idler.polarization, c);
  const double ks = kz(k_s, omega_s, setup.signal.polarization, c);
  return c.poling_wavevector() + kp - ki - ks;
}

double solve_pm_angle(const CrystalModel& crystal, double omega0, const CollectionGeometry& geometry,
                      PhaseMatchingType pm, std::optional<double> omega_signal) {
  const double omega_s = omega_signal.value_or(omega0 / 2.0);
  const double omega_i = omega0 - omega_s;
  CollectionGeometry g = geometry;
  if (omega_signal) {
    // Idler angle from Omega_i sin(alpha_i) = Omega_s sin(alpha_s).
    const double t = omega_s * transverse_scale(g.alpha_s, g.exact_sine) / omega_i;
    g.alpha_i = g.exact_sine ? std::asin(t) : t;
  }
  const auto n_p = refractive_indices(omega0, crystal);
  const auto n_i = refractive_indices(omega_i, crystal);
  const auto n_s = refractive_indices(omega_s, crystal);
  SourceSetup probe;
  probe.geometry = g;
  const auto k0 = collection_wavevectors(probe, omega_i, omega_s);
  const double poling = crystal.poling_wavevector();
  auto mismatch = [&](double theta) {
    const double kp = kz(wave_coefficients(n_p, theta, pm.pump, omega0), k0.idler + k0.signal);
    const double ki = kz(wave_coefficients(n_i, theta, pm.idler, omega_i), k0.idler);
    const double ks = kz(wave_coefficients(n_s, theta, pm.signal, omega_s), k0.signal);
    return poling + kp - ki - ks;
  };

  constexpr int kSteps = 180;  // 0.5 degree grid
  const double step = (kPi / 2.0) / kSteps;
  double a = 0.0, fa = mismatch(0.0);
  if (fa == 0.0) return 0.0;
  for (int i = 1; i <= kSteps; ++i) {
    const double b0 = i * step;
    const double fb0 = mismatch(b0);
    if (fb0 == 0.0) return b0;
    if ((fa < 0.0) != (fb0 < 0.0)) {
      double lo = a, flo = fa, hi = b0, fhi = fb0;
      for (int iter = 0; iter < 200; ++iter) {
        double x = hi - fhi * (hi - lo) / (fhi - flo);
        const double mid = 0.5 * (lo + hi);
        // Fall back to bisection if the secant step leaves the bracket or
        // lands too close to an end to shrink it usefully.
        if (!(x > lo && x < hi) || std::min(x - lo, hi - x) < 1e-3 * (hi - lo)) x = mid;
        const double fx = mismatch(x);
        if (std::abs(fx) <= 1e-13 || hi - lo < 1e-15) return x;
        if ((fx < 0.0) == (flo < 0.0)) {
          lo = x;
          flo = fx;
        } else {
          hi = x;
          fhi = fx;
        }
      }
      return 0.5 * (lo + hi);
    }
    a = b0;
    fa = fb0;
  }
  std::ostringstream msg;
  msg << "phase matching unattainable for " << pm.code() << ": no sign change of the phase mismatch for theta in "
      << "[0 deg, 90 deg]";
  throw DomainError(msg.str());
}

SourceSetup with_phase_matched_cut(SourceSetup setup) {
  const bool degenerate = std::abs(setup.signal.omega - setup.pump.omega0 / 2.0) < 1e-14 * setup.pump.omega0;
  setup.crystal.cut_angle =
      solve_pm_angle(setup.crystal, setup.pump.omega0, setup.geometry, setup.pm_type(),
                     degenerate ? std::nullopt : std::optional<double>(setup.signal.omega));
  return setup;
}

}  // namespace spdc
