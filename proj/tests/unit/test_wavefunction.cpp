#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "fixtures.hpp"
#include "spdc/quadrature.hpp"
#include "spdc/thinlimit.hpp"
#include "spdc/wavefunction.hpp"

using namespace spdc;
using fixtures::deg;
using fixtures::rel_err;
using cd = std::complex<double>;

namespace {

double rel_err_c(cd a, cd b) { return std::abs(a - b) / std::abs(b); }

// log of |u_p(k_i + k_s) u_i(k_i) u_s(k_s)| along x, modes exp(-w^2 (k - k0)^2 / 4).
struct GaussianProduct {
  double wp, wi, ws, k0i, k0s;
  double operator()(double ki, double ks) const {
    const double p = ki + ks, i = ki - k0i, s = ks - k0s;
    return -0.25 * (wp * wp * p * p + wi * wi * i * i + ws * ws * s * s);
  }
};

// Newton iterations with finite-difference derivatives; exact for a quadratic.
std::pair<double, double> argmax_2d(const GaussianProduct& f, double x, double y) {
  const double h = 1e-3;
  for (int it = 0; it < 4; ++it) {
    const double gx = (f(x + h, y) - f(x - h, y)) / (2 * h);
    const double gy = (f(x, y + h) - f(x, y - h)) / (2 * h);
    const double hxx = (f(x + h, y) - 2 * f(x, y) + f(x - h, y)) / (h * h);
    const double hyy = (f(x, y + h) - 2 * f(x, y) + f(x, y - h)) / (h * h);
    const double hxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h);
    const double det = hxx * hyy - hxy * hxy;
    x -= (hyy * gx - hxy * gy) / det;
    y -= (hxx * gy - hxy * gx) / det;
  }
  return {x, y};
}

}  // namespace

TEST_CASE("pump spectral amplitude is a normalized Gaussian") {
  const double w0 = fixtures::omega0(), tau = 100.0;
  CHECK(pump_spectral_amplitude(w0, w0, tau) > pump_spectral_amplitude(w0 + 1e-4, w0, tau));
  CHECK(pump_spectral_amplitude(w0, w0, tau) > pump_spectral_amplitude(w0 - 1e-4, w0, tau));
  auto p2 = [&](double w) { return std::pow(pump_spectral_amplitude(w, w0, tau), 2); };
  const double norm = quad::integrate_adaptive(p2, w0 - 0.1, w0 + 0.1, 1e-13).value;
  CHECK(std::abs(norm - 1.0) < 1e-10);
  const double var =
      quad::integrate_adaptive([&](double w) { return (w - w0) * (w - w0) * p2(w); }, w0 - 0.1, w0 + 0.1, 1e-13).value;
  CHECK(std::sqrt(var) == doctest::Approx(1.0 / (2.0 * tau)).epsilon(1e-9));
}

TEST_CASE("expansion centre") {
  SUBCASE("central frequencies give the collection wavevectors") {
    const auto s = fixtures::fig2();
    const auto c = expansion_center(s, s.idler.omega, s.signal.omega);
    const auto k0 = collection_wavevectors(s, s.idler.omega, s.signal.omega);
    CHECK(c.idler.kx == doctest::Approx(k0.idler.kx).epsilon(1e-14));
    CHECK(c.signal.kx == doctest::Approx(k0.signal.kx).epsilon(1e-14));
    CHECK(std::abs(c.pump.kx) < 1e-14);
  }
  SUBCASE("collinear centres vanish") {
    const auto s = fixtures::degenerate(100.0, 30.0, 0.7, 0.0);
    const auto c = expansion_center(s, 2.2, 2.4);
    for (const auto& k : {c.idler, c.signal, c.pump}) {
      CHECK(k.kx == 0.0);
      CHECK(k.ky == 0.0);
    }
  }
  SUBCASE("off-centre: numerical argmax of the Gaussian product") {
    const auto s = fixtures::fig2();
    const double wi = fixtures::fig2_omega_i(), ws = fixtures::fig2_omega_s();
    const auto k0 = collection_wavevectors(s, wi, ws);
    const GaussianProduct g{s.pump.waist.x, s.idler.waist.x, s.signal.waist.x, k0.idler.kx, k0.signal.kx};
    const auto [xi, xs] = argmax_2d(g, k0.idler.kx, k0.signal.kx);
    const auto c = expansion_center(s, wi, ws);
    CHECK(rel_err(c.idler.kx, xi) <= 1e-8);
    CHECK(rel_err(c.signal.kx, xs) <= 1e-8);
    CHECK(c.pump.kx == doctest::Approx(c.idler.kx + c.signal.kx).epsilon(1e-14));
    // The overlap modulus peaks there, at the Gaussian-product value.
    const double peak = overlap_modulus(s, wi, ws, c.idler, c.signal);
    const double norm = std::sqrt(s.pump.waist.x * s.pump.waist.y * s.idler.waist.x * s.idler.waist.y *
                                  s.signal.waist.x * s.signal.waist.y / std::pow(2 * kPi, 3));
    CHECK(peak == doctest::Approx(norm * std::exp(g(xi, xs))).epsilon(1e-12));
    CHECK(peak > overlap_modulus(s, wi, ws, c.idler + TransverseWavevector{1e-3, 0}, c.signal));
    CHECK(peak > overlap_modulus(s, wi, ws, c.idler, c.signal + TransverseWavevector{0, 1e-3}));
  }
}

TEST_CASE("paraxial parameters") {
  SUBCASE("thin-validity numbers for L = 100 um, w = 10 um") {
    const auto s = fixtures::degenerate(100.0, 10.0, 1.0 / std::sqrt(2.0), 0.0);
    const auto b = paraxial_params(s, s.idler.omega, s.signal.omega);
    CHECK(b.beam(Beam::Signal).xi[0] == doctest::Approx(b.beam(Beam::Signal).xi[1]));
    CHECK(std::abs(b.beam(Beam::Signal).xi[0] - 0.07) <= 0.015);
    CHECK(b.axes[0].A == 0.0);
    CHECK(std::abs(b.axes[1].A - 0.11) <= 0.02);
    // A_y = L^2 beta_p^2 / (2 w^2 (1 + 2 r^2)).
    const double beta = walkoff_slope(s.pump.omega0, s.crystal);
    const double r2 = 0.5;
    CHECK(b.axes[1].A == doctest::Approx(100.0 * 100.0 * beta * beta / (2 * 100.0 * (1 + 2 * r2))).epsilon(1e-10));
  }
  SUBCASE("xi and nu scale exactly with L and w") {
    const auto s1 = fixtures::degenerate(100.0, 20.0, 0.6, deg(2.0));
    auto s2 = s1;
    s2.crystal.length *= 3.0;
    auto s3 = s1;
    for (auto* w : {&s3.pump.waist, &s3.idler.waist, &s3.signal.waist}) {
      w->x *= 2.0;
      w->y *= 2.0;
    }
    const double wi = 2.31, ws = 2.34;
    const auto b1 = paraxial_params(s1, wi, ws), b2 = paraxial_params(s2, wi, ws), b3 = paraxial_params(s3, wi, ws);
    for (int a = 0; a < 3; ++a)
      for (int mu = 0; mu < 2; ++mu) {
        CHECK(b2.beams[a].xi[mu] == doctest::Approx(3.0 * b1.beams[a].xi[mu]).epsilon(1e-13));
        CHECK(b2.beams[a].nu[mu] == doctest::Approx(3.0 * b1.beams[a].nu[mu]).epsilon(1e-13));
        // kbar does not change with a common waist scale, so only 1/w^2 and 1/w remain.
        CHECK(b3.beams[a].xi[mu] == doctest::Approx(b1.beams[a].xi[mu] / 4.0).epsilon(1e-13));
        CHECK(b3.beams[a].nu[mu] == doctest::Approx(b1.beams[a].nu[mu] / 2.0).epsilon(1e-13));
      }
  }
  SUBCASE("bundle invariants") {
    const auto s = fixtures::fig2();
    const auto b = paraxial_params(s, fixtures::fig2_omega_i(), fixtures::fig2_omega_s());
    for (int mu = 0; mu < 2; ++mu) {
      double inv = 0.0;
      for (const auto& beam : b.beams) inv += 1.0 / (beam.waist[mu] * beam.waist[mu]);
      CHECK(b.axes[mu].wbar2 == doctest::Approx(1.0 / inv).epsilon(1e-14));
      CHECK(b.axes[mu].A >= 0.0);
      CHECK(b.axes[mu].Q(0.0) == cd(b.axes[mu].A, 0.0));
      CHECK(b.axes[mu].F(0.0) == cd(1.0, 0.0));
      CHECK(b.rayleigh_range(Beam::Signal, mu) > 0.0);
    }
  }
}

TEST_CASE("factorized and matrix forms agree in-plane") {
  for (double phi : {0.0, kPi / 2}) {
    const auto s = fixtures::degenerate(500.0, 30.0, 0.6, deg(2.0), phi);
    const double w0 = fixtures::omega0();
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        const double wi = w0 / 2 + 0.02 * (i - 4.5) / 4.5, ws = w0 / 2 + 0.02 * (j - 4.5) / 4.5;
        const auto f = psi_factorized(s, wi, ws);
        const auto g = psi_general(s, wi, ws);
        CHECK(rel_err_c(g.amplitude, f.amplitude) <= 1e-6);
      }
  }
}

TEST_CASE("Z = 0 matrix is the real positive-definite overlap") {
  const auto s = fixtures::degenerate(500.0, 30.0, 0.6, deg(2.0), kPi / 4);
  const auto b = paraxial_params(s, 2.3, 2.35);
  const auto m = matrix_form(b, 0.0);
  Eigen::Matrix4d re;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      CHECK(m.m2[r][c].imag() == 0.0);
      CHECK(m.m2[r][c] == m.m2[c][r]);
      re(r, c) = m.m2[r][c].real();
    }
  CHECK(re.determinant() > 0.0);
  CHECK(Eigen::LLT<Eigen::Matrix4d>(re).info() == Eigen::Success);
}

TEST_CASE("factorized form reduces to the thin amplitude for a thin crystal") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> du(-0.015, 0.015), dv(-0.3, 0.3);
  for (double alpha : {0.0, deg(1.0)}) {
    const auto s = fixtures::degenerate(10.0, 50.0, 0.7, alpha);
    const double w0 = fixtures::omega0();
    for (int k = 0; k < 50; ++k) {
      const double u = w0 + du(rng), v = dv(rng);
      const double wi = 0.5 * (u + v), ws = 0.5 * (u - v);
      CHECK(rel_err_c(psi_factorized(s, wi, ws).amplitude, psi_thin(s, wi, ws)) <= 0.01);
    }
  }
}

TEST_CASE("without walk-off the Z-integrand is the bare focal factor") {
  // All-ordinary fictitious source, quasi-phase-matched at the centre.
  auto s = fixtures::degenerate(1000.0, 20.0, 0.7, 0.0);
  s.pump.polarization = Polarization::Ordinary;
  const double w0 = fixtures::omega0();
  const double dk0 = kz({0, 0}, w0, Polarization::Ordinary, s.crystal) -
                     2 * kz({0, 0}, w0 / 2, Polarization::Ordinary, s.crystal);
  s.crystal.poling_order = -1;
  s.crystal.poling_period = 2 * kPi / dk0;
  for (auto [wi, ws] : {std::pair{w0 / 2, w0 / 2}, std::pair{w0 / 2 + 0.004, w0 / 2 - 0.003}}) {
    const auto b = paraxial_params(s, wi, ws);
    for (const auto& ax : b.axes) {
      CHECK(ax.A == 0.0);
      CHECK(ax.B == 0.0);
    }
    auto integrand = [&](double Z, bool imag) {
      const cd f = std::exp(cd(0, -0.5 * b.length * b.delta_kz * Z)) / std::sqrt(b.axes[0].F(Z) * b.axes[1].F(Z));
      return imag ? f.imag() : f.real();
    };
    const double re = quad::integrate_adaptive([&](double Z) { return integrand(Z, false); }, -1, 1, 1e-13).value;
    const double im = quad::integrate_adaptive([&](double Z) { return integrand(Z, true); }, -1, 1, 1e-13).value;
    const double wp = s.pump.waist.x, wc = s.signal.waist.x;
    const double wbar2 = 1.0 / (1 / (wp * wp) + 2 / (wc * wc));
    const double prefactor = 2 * std::sqrt(2 * kPi) * b.length * wbar2 / (wp * wc * wc);
    const auto phi = phi_factorized(s, wi, ws);
    CHECK(rel_err_c(phi.amplitude, prefactor * cd(re, im)) <= 1e-8);
  }
}

TEST_CASE("brute-force overlap integral") {
  SUBCASE("thin collinear all-ordinary toy is an analytic Gaussian") {
    auto s = fixtures::degenerate(0.5, 20.0, 0.7, 0.0);
    s.pump.polarization = Polarization::Ordinary;
    const double w0 = fixtures::omega0();
    const double dk0 = kz({0, 0}, w0, Polarization::Ordinary, s.crystal) -
                       2 * kz({0, 0}, w0 / 2, Polarization::Ordinary, s.crystal);
    s.crystal.poling_order = -1;
    s.crystal.poling_period = 2 * kPi / dk0;
    const auto bf = brute_force_phi(s, w0 / 2, w0 / 2);
    CHECK(bf.converged);
    const double wp = s.pump.waist.x, wc = s.signal.waist.x;
    const double wbar2 = 1.0 / (1 / (wp * wp) + 2 / (wc * wc));
    const double analytic = 4 * std::sqrt(2 * kPi) * s.crystal.length * wbar2 / (wp * wc * wc);
    CHECK(rel_err_c(bf.value, cd(analytic, 0.0)) <= 1e-6);
  }
  SUBCASE("paraxial amplitude at the centre of the collection-angle configuration") {
    const auto s = fixtures::fig2();
    const auto bf = brute_force_phi(s, s.idler.omega, s.signal.omega);
    CHECK(bf.converged);
    CHECK(rel_err_c(phi_factorized(s, s.idler.omega, s.signal.omega).amplitude, bf.value) <= 0.02);
  }
  SUBCASE("general form at 45 degrees azimuth") {
    const auto s = fixtures::fig2(kPi / 4);
    const auto bf = brute_force_phi(s, s.idler.omega, s.signal.omega);
    CHECK(bf.converged);
    CHECK(rel_err_c(phi_general(s, s.idler.omega, s.signal.omega).amplitude, bf.value) <= 0.02);
  }
}

TEST_CASE("degenerate symmetric amplitude is symmetric under exchange") {
  const auto s = fixtures::degenerate(500.0, 30.0, 0.6, deg(1.5));
  const double w0 = fixtures::omega0();
  for (double d : {0.003, 0.01, 0.04}) {
    const double a = std::abs(psi_factorized(s, w0 / 2 + d, w0 / 2 - d + 0.001).amplitude);
    const double b = std::abs(psi_factorized(s, w0 / 2 - d + 0.001, w0 / 2 + d).amplitude);
    CHECK(std::abs(a - b) <= 1e-10 * std::max(a, 1e-300));
  }
}

TEST_CASE("the non-planar matrix form needs the general evaluator") {
  const auto s = fixtures::fig2(kPi / 4);
  CHECK_THROWS_AS(phi_factorized(s, s.idler.omega, s.signal.omega), DomainError);
  CHECK_NOTHROW(phi_general(s, s.idler.omega, s.signal.omega));
}

TEST_CASE("exit-face beam shift equals w nu") {
  const auto s = fixtures::degenerate(500.0, 20.0, 0.7, 0.0);
  const auto b = paraxial_params(s, s.idler.omega, s.signal.omega);
  const auto& p = b.beam(Beam::Pump);
  const auto wave = wave_coefficients(p.omega, s.pump.polarization, s.crystal);
  const double w = p.waist.y;
  const double shift = real_space_centroid(wave, p.kbar, 1, w, 0.5 * s.crystal.length);
  CHECK(std::abs(p.nu[1]) > 0.1);
  CHECK(shift == doctest::Approx(w * p.nu[1]).epsilon(1e-3));
  // Ordinary photons do not walk off.
  const auto& i = b.beam(Beam::Idler);
  const auto wave_i = wave_coefficients(i.omega, Polarization::Ordinary, s.crystal);
  CHECK(std::abs(real_space_centroid(wave_i, i.kbar, 1, i.waist.y, 0.5 * s.crystal.length)) < 1e-6 * w);
}

TEST_CASE("integrand map marks kbar at its maximum") {
  const auto s = fixtures::fig2();
  const auto map = integrand_map(s, fixtures::fig2_omega_i(), fixtures::fig2_omega_s(), 41);
  CHECK(map.cells.size() == 41u * 41u);
  const auto best = std::max_element(map.cells.begin(), map.cells.end(),
                                     [](const auto& a, const auto& b) { return a.overlap < b.overlap; });
  CHECK(best->overlap == doctest::Approx(1.0));
  const double step = map.cells[41].k_ix - map.cells[0].k_ix;
  CHECK(std::abs(best->k_ix - map.kbar_ix) <= 0.5 * step + 1e-12);
  CHECK(std::abs(best->k_sx - map.kbar_sx) <= 0.5 * step + 1e-12);
  // kbar sits away from the collection directions for off-centre frequencies.
  CHECK(std::abs(map.kbar_ix - map.k0_ix) > step);
}
