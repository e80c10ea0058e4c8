#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "spdc/dispersion.hpp"

using namespace spdc;
using fixtures::bbo;

namespace {

// Reference values from tests/oracles/dispersion_oracle.py (mpmath, 50 digits).
constexpr double kNo405 = 1.6922993830562733;
constexpr double kNe405 = 1.5679659215574718;
constexpr double kNo810 = 1.6610724058370865;
constexpr double kThetaCollinear = 0.50039294479387962;
constexpr double kKzE_0_01 = 25.766517749900926816;     // k = (0, 0.1), 29 deg
constexpr double kKzE_007_m005 = 25.756472540076700409; // k = (0.07, -0.05), 29 deg

double omega(double lambda_um) { return wavelength_to_omega(lambda_um); }

}  // namespace

TEST_CASE("principal indices of BBO match the Sellmeier oracle") {
  const auto n405 = refractive_indices(omega(0.405), bbo());
  CHECK(fixtures::rel_err(n405.ordinary, kNo405) < 1e-13);
  CHECK(fixtures::rel_err(n405.extraordinary, kNe405) < 1e-13);
  CHECK(fixtures::rel_err(refractive_indices(omega(0.810), bbo()).ordinary, kNo810) < 1e-13);
}

TEST_CASE("a constant Sellmeier polynomial is dispersionless") {
  CrystalModel c = bbo();
  c.ordinary = {2.25, {}, {}};
  c.extraordinary = {2.56, {}, {}};
  for (double lam : {0.3, 0.5, 1.0, 2.0}) {
    const auto n = refractive_indices(omega(lam), c);
    CHECK(n.ordinary == 1.5);
    CHECK(n.extraordinary == 1.6);
  }
}

TEST_CASE("frequencies outside the transmission window are rejected") {
  CHECK_THROWS_AS(refractive_indices(omega(0.15), bbo()), DomainError);
  CHECK_THROWS_AS(refractive_indices(omega(3.0), bbo()), DomainError);
}

TEST_CASE("index at angle") {
  const auto n = refractive_indices(omega(0.405), bbo());
  CHECK(index_at_angle(n, 0.0) == doctest::Approx(n.ordinary).epsilon(1e-15));
  CHECK(index_at_angle(n, kPi / 2) == doctest::Approx(n.extraordinary).epsilon(1e-15));
  // Collinear degenerate type-I matching: n_theta(405) = n_o(810).
  CHECK(fixtures::rel_err(index_at_angle(n, kThetaCollinear), kNo810) < 1e-12);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> lam(0.25, 2.1), th(0.0, kPi / 2);
  for (int i = 0; i < 200; ++i) {
    const auto p = refractive_indices(omega(lam(rng)), bbo());
    const double nt = index_at_angle(p, th(rng));
    CHECK(nt >= std::min(p.ordinary, p.extraordinary) - 1e-15);
    CHECK(nt <= std::max(p.ordinary, p.extraordinary) + 1e-15);
  }
}

TEST_CASE("kz at the origin") {
  const double w = omega(0.405);
  const auto n = refractive_indices(w, bbo());
  auto c = fixtures::bbo_with(100.0, fixtures::deg(29.0));
  CHECK(kz({0, 0}, w, Polarization::Ordinary, c) == doctest::Approx(n.ordinary * w / kSpeedOfLight).epsilon(1e-15));
  c.cut_angle = 0.0;
  CHECK(kz({0, 0}, w, Polarization::Extraordinary, c) ==
        doctest::Approx(n.ordinary * w / kSpeedOfLight).epsilon(1e-15));
}

TEST_CASE("extraordinary kz matches the rotated index-ellipsoid root") {
  const auto c = fixtures::bbo_with(100.0, fixtures::deg(29.0));
  const double w = omega(0.405);
  CHECK(fixtures::rel_err(kz({0.0, 0.1}, w, Polarization::Extraordinary, c), kKzE_0_01) < 1e-12);
  CHECK(fixtures::rel_err(kz({0.07, -0.05}, w, Polarization::Extraordinary, c), kKzE_007_m005) < 1e-12);
}

TEST_CASE("ordinary kz symmetries") {
  const auto c = fixtures::bbo_with(100.0, fixtures::deg(29.0));
  const double w = omega(0.81);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> k(-0.5, 0.5);
  for (int i = 0; i < 100; ++i) {
    const double a = k(rng), b = k(rng);
    const double ref = kz({a, b}, w, Polarization::Ordinary, c);
    CHECK(kz({b, a}, w, Polarization::Ordinary, c) == ref);
    CHECK(kz({-a, b}, w, Polarization::Ordinary, c) == ref);
    CHECK(kz({a, -b}, w, Polarization::Ordinary, c) == ref);
  }
}

TEST_CASE("evanescent and near-evanescent wavevectors") {
  const auto c = fixtures::bbo_with(100.0, fixtures::deg(29.0));
  const double w = omega(0.81);
  const double k_max = refractive_indices(w, c).ordinary * w / kSpeedOfLight;
  CHECK_THROWS_AS(kz({1.01 * k_max, 0.0}, w, Polarization::Ordinary, c), DomainError);
  CHECK_THROWS_AS(kz_jet({k_max * (1.0 - 1e-8), 0.0}, w, Polarization::Ordinary, c), ConditioningError);
}

TEST_CASE("kz_jet at the origin") {
  const auto c = fixtures::bbo_with(100.0, fixtures::deg(29.0));
  const double w = omega(0.81);
  const double no = refractive_indices(w, c).ordinary;
  const auto o = kz_jet({0, 0}, w, Polarization::Ordinary, c);
  CHECK(o.k1[0] == 0.0);
  CHECK(o.k1[1] == 0.0);
  CHECK(o.k2[0][0] == doctest::Approx(-kSpeedOfLight / (no * w)).epsilon(1e-14));
  CHECK(o.k2[1][1] == doctest::Approx(-kSpeedOfLight / (no * w)).epsilon(1e-14));
  CHECK(o.k2[0][1] == 0.0);

  const double wp = omega(0.405);
  const auto wave = wave_coefficients(wp, Polarization::Extraordinary, c);
  const auto e = kz_jet({0, 0}, wp, Polarization::Extraordinary, c);
  CHECK(e.k1[0] == 0.0);
  CHECK(e.k1[1] == doctest::Approx(wave.beta).epsilon(1e-14));
  for (const auto& jet : {o, e}) {
    CHECK(jet.k2[0][1] == jet.k2[1][0]);
    const double tr = jet.k2[0][0] + jet.k2[1][1];
    const double det = jet.k2[0][0] * jet.k2[1][1] - jet.k2[0][1] * jet.k2[1][0];
    CHECK(tr < 0.0);
    CHECK(det > 0.0);
  }
}

TEST_CASE("kz_jet matches central finite differences at random points") {
  const auto c = fixtures::bbo_with(100.0, fixtures::deg(29.0));
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> lam(0.3, 2.0), unit(-1.0, 1.0), th(0.05, 1.5);
  int checked = 0;
  for (int i = 0; i < 120; ++i) {
    for (auto pol : {Polarization::Ordinary, Polarization::Extraordinary}) {
      auto cc = c;
      cc.cut_angle = th(rng);
      const double w = omega(lam(rng));
      const double scale = 0.05 * refractive_indices(w, cc).ordinary * w / kSpeedOfLight;
      // Keep |k| away from zero so that the ordinary K1 is not vanishingly small.
      const double mag = scale * (0.2 + 0.8 * std::abs(unit(rng))), ang = kPi * unit(rng);
      const TransverseWavevector k{mag * std::cos(ang), mag * std::sin(ang)};
      const auto jet = kz_jet(k, w, pol, cc);
      auto f = [&](double dx, double dy) { return kz({k.kx + dx, k.ky + dy}, w, pol, cc); };
      const double h1 = 1e-5, h2 = 1e-3;
      const double g[2] = {(f(h1, 0) - f(-h1, 0)) / (2 * h1), (f(0, h1) - f(0, -h1)) / (2 * h1)};
      const double f0 = f(0, 0);
      const double hxx = (f(h2, 0) - 2 * f0 + f(-h2, 0)) / (h2 * h2);
      const double hyy = (f(0, h2) - 2 * f0 + f(0, -h2)) / (h2 * h2);
      const double hxy = (f(h2, h2) - f(h2, -h2) - f(-h2, h2) + f(-h2, -h2)) / (4 * h2 * h2);
      const double g_norm = std::hypot(jet.k1[0], jet.k1[1]);
      const double h_norm = std::abs(jet.k2[0][0]) + std::abs(jet.k2[1][1]);
      CHECK(std::abs(g[0] - jet.k1[0]) <= 1e-6 * g_norm);
      CHECK(std::abs(g[1] - jet.k1[1]) <= 1e-6 * g_norm);
      CHECK(std::abs(hxx - jet.k2[0][0]) <= 1e-6 * h_norm);
      CHECK(std::abs(hyy - jet.k2[1][1]) <= 1e-6 * h_norm);
      CHECK(std::abs(hxy - jet.k2[0][1]) <= 1e-6 * h_norm);
      ++checked;
    }
  }
  CHECK(checked >= 200);
}

TEST_CASE("crystal validation") {
  CrystalModel c = bbo();
  CHECK_NOTHROW(c.validate());
  c.length = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = bbo();
  c.poling_period = -3.0;
  c.poling_order = 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = bbo();
  c.poling_period = 4.0;
  c.poling_order = 1;
  CHECK(c.poling_wavevector() == doctest::Approx(2 * kPi / 4.0));
}
