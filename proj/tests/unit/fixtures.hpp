#pragma once

#include <cmath>
#include <random>

#include "spdc/config.hpp"
#include "spdc/constants.hpp"
#include "spdc/geometry.hpp"

namespace fixtures {

inline const spdc::CrystalModel& bbo() {
  static const spdc::CrystalModel c = spdc::bundled_bbo();
  return c;
}

inline double deg(double d) { return d * spdc::kPi / 180.0; }

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double omega0() { return spdc::wavelength_to_omega(0.405); }

inline spdc::CrystalModel bbo_with(double length_um, double cut_angle) {
  auto c = bbo();
  c.length = length_um;
  c.cut_angle = cut_angle;
  return c;
}

// Degenerate type-I setup with the cut angle solved for the geometry.
inline spdc::SourceSetup degenerate(double L, double w, double r, double alpha, double phi = 0.0, double tau = 100.0) {
  auto c = bbo();
  c.length = L;
  auto s = spdc::degenerate_setup(c, 0.405, tau, w, r, alpha, phi, spdc::PhaseMatchingType::parse("eoo"));
  return spdc::with_phase_matched_cut(s);
}

// Collected modes of 50 um, pump of 25 um, 2.8 degree emission, 500 um crystal.
inline spdc::SourceSetup fig2(double phi = 0.0) { return degenerate(500.0, 50.0, 0.5, deg(2.8), phi); }

inline double fig2_omega_i() { return omega0() / 2.1; }
inline double fig2_omega_s() { return omega0() / 1.9; }

}  // namespace fixtures
