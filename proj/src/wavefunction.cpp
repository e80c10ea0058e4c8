#include "spdc/wavefunction.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spdc/quadrature.hpp"

namespace spdc {
namespace {

using cd = std::complex<double>;

bool in_plane(double phi) { return std::abs(std::sin(2.0 * phi)) < 1e-12; }

double waist_of(const SourceSetup& s, Beam b, int axis) {
  switch (b) {
    case Beam::Pump: return s.pump.waist[axis];
    case Beam::Idler: return s.idler.waist[axis];
    case Beam::Signal: return s.signal.waist[axis];
  }
  return 0.0;
}

// Product of the three mode normalizations (w_ax w_ay / 2 pi)^(1/2).
double mode_normalization(const SourceSetup& s) {
  double n = 1.0;
  for (Beam b : {Beam::Pump, Beam::Idler, Beam::Signal})
    n *= std::sqrt(waist_of(s, b, 0) * waist_of(s, b, 1) / (2.0 * kPi));
  return n;
}

int oscillation_panels(double length, double delta_kz) {
  return std::max(1, static_cast<int>(std::ceil(length * std::abs(delta_kz) / (2.0 * kPi))));
}

JsaSample finish(const quad::ComplexIntegralResult& r, double omega_i, double omega_s, cd scale, const char* what) {
  if (!r.converged) {
    std::ostringstream msg;
    msg << what << ": Z-integral did not converge within " << r.panels << " panels at (omega_i, omega_s) = ("
        << omega_i << ", " << omega_s << ")";
    throw QuadratureError(msg.str(), std::abs(scale * r.value), r.abs_error);
  }
  return {omega_i, omega_s, scale * r.value, std::abs(scale) * r.abs_error, r.panels};
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace

double pump_spectral_amplitude(double omega_p, double omega0, double tau) {
  const double d = omega_p - omega0;
  return std::pow(2.0 * tau * tau / kPi, 0.25) * std::exp(-tau * tau * d * d);
}

ExpansionCenter expansion_center(const SourceSetup& setup, double omega_i, double omega_s) {
  const auto k0 = collection_wavevectors(setup, omega_i, omega_s);
  ExpansionCenter c;
  double ki[2], ks[2];
  for (int mu = 0; mu < 2; ++mu) {
    const double wi2 = setup.idler.waist[mu] * setup.idler.waist[mu];
    const double ws2 = setup.signal.waist[mu] * setup.signal.waist[mu];
    const double wp2 = setup.pump.waist[mu] * setup.pump.waist[mu];
    const double wbar2 = 1.0 / (1.0 / wp2 + 1.0 / wi2 + 1.0 / ws2);
    const double sum = k0.idler[mu] + k0.signal[mu];
    ki[mu] = k0.idler[mu] - wbar2 / wi2 * sum;
    ks[mu] = k0.signal[mu] - wbar2 / ws2 * sum;
  }
  c.idler = {ki[0], ki[1]};
  c.signal = {ks[0], ks[1]};
  c.pump = c.idler + c.signal;
  return c;
}

std::complex<double> ParaxialBundle::q(Beam b, int axis, double Z) const {
  const auto& be = beam(b);
  const double w = be.waist[axis];
  return w * w * cd(1.0, -Z * be.xi[axis]);
}

double ParaxialBundle::rayleigh_range(Beam b, int axis) const {
  const auto& be = beam(b);
  const double w = be.waist[axis];
  return -w * w / (2.0 * be.jet.k2[axis][axis]);
}

ParaxialBundle paraxial_params(const SourceSetup& setup, double omega_i, double omega_s) {
  ParaxialBundle b;
  b.omega_i = omega_i;
  b.omega_s = omega_s;
  b.length = setup.crystal.length;
  const auto k0 = collection_wavevectors(setup, omega_i, omega_s);
  b.k0_idler = k0.idler;
  b.k0_signal = k0.signal;
  const auto center = expansion_center(setup, omega_i, omega_s);
  const double L = setup.crystal.length;

  auto fill = [&](Beam which, TransverseWavevector kbar, double omega, BeamWaist waist, Polarization pol) {
    auto& be = b.beams[static_cast<int>(which)];
    be.kbar = kbar;
    be.omega = omega;
    be.waist = waist;
    be.jet = kz_jet(kbar, omega, pol, setup.crystal);
    for (int mu = 0; mu < 2; ++mu) {
      be.xi[mu] = -L / (waist[mu] * waist[mu]) * be.jet.k2[mu][mu];
      be.nu[mu] = -L / (2.0 * waist[mu]) * be.jet.k1[mu];
    }
  };
  fill(Beam::Pump, center.pump, omega_i + omega_s, setup.pump.waist, setup.pump.polarization);
  fill(Beam::Idler, center.idler, omega_i, setup.idler.waist, setup.idler.polarization);
  fill(Beam::Signal, center.signal, omega_s, setup.signal.waist, setup.signal.polarization);

  const auto& p = b.beam(Beam::Pump);
  const auto& i = b.beam(Beam::Idler);
  const auto& s = b.beam(Beam::Signal);
  for (int mu = 0; mu < 2; ++mu) {
    auto& ax = b.axes[mu];
    const double wp = p.waist[mu], wi = i.waist[mu], ws = s.waist[mu];
    ax.wbar2 = 1.0 / (1.0 / (wp * wp) + 1.0 / (wi * wi) + 1.0 / (ws * ws));
    auto delta2 = [&](double nu_a, double w_a, double nu_b, double w_b) {
      const double d = nu_a / w_b - nu_b / w_a;
      return ax.wbar2 * d * d;
    };
    ax.delta2_is = delta2(i.nu[mu], wi, s.nu[mu], ws);
    ax.delta2_ps = delta2(p.nu[mu], wp, s.nu[mu], ws);
    ax.delta2_pi = delta2(p.nu[mu], wp, i.nu[mu], wi);
    ax.A = ax.delta2_is + ax.delta2_ps + ax.delta2_pi;
    ax.B = ax.delta2_is * p.xi[mu] - ax.delta2_ps * i.xi[mu] - ax.delta2_pi * s.xi[mu];
    ax.xi = i.xi[mu] * (1.0 - ax.wbar2 / (wi * wi)) + s.xi[mu] * (1.0 - ax.wbar2 / (ws * ws)) -
            p.xi[mu] * (1.0 - ax.wbar2 / (wp * wp));
    ax.C = ax.wbar2 * (s.xi[mu] * p.xi[mu] / (wi * wi) + i.xi[mu] * p.xi[mu] / (ws * ws) -
                       i.xi[mu] * s.xi[mu] / (wp * wp));
  }
  b.delta_kz = setup.crystal.poling_wavevector() + p.jet.kz - i.jet.kz - s.jet.kz;
  return b;
}

JsaSample phi_factorized(const SourceSetup& setup, double omega_i, double omega_s, const ZIntegralOptions& opts) {
  if (!in_plane(setup.geometry.phi))
    throw DomainError("factorized wavefunction needs emission in the (x,z) or (y,z) plane; use the general form");
  const auto b = paraxial_params(setup, omega_i, omega_s);
  const double L = b.length;
  double prefactor = 2.0 * std::sqrt(2.0 * kPi) * L;
  for (int mu = 0; mu < 2; ++mu) {
    const double sum = b.k0_idler[mu] + b.k0_signal[mu];
    const double w3 = b.beam(Beam::Pump).waist[mu] * b.beam(Beam::Idler).waist[mu] * b.beam(Beam::Signal).waist[mu];
    prefactor *= std::sqrt(b.axes[mu].wbar2) * std::exp(-0.25 * b.axes[mu].wbar2 * sum * sum) / std::sqrt(w3);
  }
  const double phase_rate = 0.5 * L * b.delta_kz;
  auto sample = [&](double Z) {
    const cd fx = b.axes[0].F(Z), fy = b.axes[1].F(Z);
    const cd expo = cd(0.0, -phase_rate * Z) - Z * Z * (b.axes[0].Q(Z) / fx + b.axes[1].Q(Z) / fy);
    return quad::BranchSample{std::exp(expo), fx * fy};
  };
  const auto r =
      quad::integrate_branch_tracked(sample, oscillation_panels(L, b.delta_kz), opts.rel_tol, opts.max_panels);
  return finish(r, omega_i, omega_s, prefactor, "factorized wavefunction");
}

JsaSample psi_factorized(const SourceSetup& setup, double omega_i, double omega_s, const ZIntegralOptions& opts) {
  auto s = phi_factorized(setup, omega_i, omega_s, opts);
  const double a = pump_spectral_amplitude(omega_i + omega_s, setup.pump.omega0, setup.pump.tau);
  s.amplitude *= a;
  s.abs_error *= a;
  return s;
}

MatrixForm matrix_form(const ParaxialBundle& b, double Z) {
  MatrixForm m;
  const double half_lz = 0.5 * b.length * Z;
  const auto& p = b.beam(Beam::Pump);
  const auto& i = b.beam(Beam::Idler);
  const auto& s = b.beam(Beam::Signal);
  for (int mu = 0; mu < 2; ++mu) {
    const double wp2 = p.waist[mu] * p.waist[mu];
    const double wi2 = i.waist[mu] * i.waist[mu];
    const double ws2 = s.waist[mu] * s.waist[mu];
    const int r0 = 2 * mu;
    // Gaussian overlap block.
    m.m2[r0][r0] += 0.5 * (wp2 + wi2);
    m.m2[r0][r0 + 1] += 0.5 * wp2;
    m.m2[r0 + 1][r0] += 0.5 * wp2;
    m.m2[r0 + 1][r0 + 1] += 0.5 * (wp2 + ws2);
    m.m1[r0] = cd(0.0, half_lz * (p.jet.k1[mu] - i.jet.k1[mu]));
    m.m1[r0 + 1] = cd(0.0, half_lz * (p.jet.k1[mu] - s.jet.k1[mu]));
    for (int nu = 0; nu < 2; ++nu) {
      const int c0 = 2 * nu;
      const double kp = p.jet.k2[mu][nu];
      m.m2[r0][c0] += cd(0.0, half_lz * (kp - i.jet.k2[mu][nu]));
      m.m2[r0][c0 + 1] += cd(0.0, half_lz * kp);
      m.m2[r0 + 1][c0] += cd(0.0, half_lz * kp);
      m.m2[r0 + 1][c0 + 1] += cd(0.0, half_lz * (kp - s.jet.k2[mu][nu]));
    }
  }
  return m;
}

JsaSample phi_general(const SourceSetup& setup, double omega_i, double omega_s, const ZIntegralOptions& opts) {
  const auto b = paraxial_params(setup, omega_i, omega_s);
  const double L = b.length;
  auto to_eigen = [](const MatrixForm& m, Eigen::Matrix4cd& m2, Eigen::Vector4cd& m1) {
    for (int r = 0; r < 4; ++r) {
      m1(r) = m.m1[r];
      for (int c = 0; c < 4; ++c) m2(r, c) = m.m2[r][c];
    }
  };
  Eigen::Matrix4cd m2;
  Eigen::Vector4cd m1;
  to_eigen(matrix_form(b, 0.0), m2, m1);
  const double det0 = m2.determinant().real();
  if (!(det0 > 0.0)) throw ConditioningError("Gaussian overlap matrix is not positive definite");

  double c0_sum = 0.0;
  for (int mu = 0; mu < 2; ++mu) {
    const double sum = b.k0_idler[mu] + b.k0_signal[mu];
    c0_sum += 0.5 * b.axes[mu].wbar2 * sum * sum;
  }
  const double prefactor =
      0.5 * L * 4.0 * kPi * kPi * mode_normalization(setup) * std::exp(-0.5 * c0_sum) / std::sqrt(det0);
  const double phase_rate = 0.5 * L * b.delta_kz;
  auto sample = [&](double Z) {
    Eigen::Matrix4cd a;
    Eigen::Vector4cd v;
    to_eigen(matrix_form(b, Z), a, v);
    Eigen::PartialPivLU<Eigen::Matrix4cd> lu(a);
    const cd det = lu.determinant();
    if (std::abs(det) < 1e-14 * det0) throw ConditioningError("M2(Z) is numerically singular");
    const cd quad_form = v.transpose() * lu.solve(v);
    return quad::BranchSample{std::exp(cd(0.0, -phase_rate * Z) + 0.5 * quad_form), det / det0};
  };
  const auto r =
      quad::integrate_branch_tracked(sample, oscillation_panels(L, b.delta_kz), opts.rel_tol, opts.max_panels);
  return finish(r, omega_i, omega_s, prefactor, "general wavefunction");
}

JsaSample psi_general(const SourceSetup& setup, double omega_i, double omega_s, const ZIntegralOptions& opts) {
  auto s = phi_general(setup, omega_i, omega_s, opts);
  const double a = pump_spectral_amplitude(omega_i + omega_s, setup.pump.omega0, setup.pump.tau);
  s.amplitude *= a;
  s.abs_error *= a;
  return s;
}

namespace {

struct AxisWhitening {
  // Lower Cholesky factor of the per-axis overlap matrix C2.
  double l11, l21, l22;
  // (kappa_i, kappa_s) = sqrt(2) L^{-T} y
  std::pair<double, double> map(double y1, double y2) const {
    const double b = y2 / l22;
    const double a = (y1 - l21 * b) / l11;
    return {std::sqrt(2.0) * a, std::sqrt(2.0) * b};
  }
  double jacobian() const { return 2.0 / (l11 * l22); }
};

AxisWhitening whitening(const SourceSetup& s, int mu) {
  const double wp2 = s.pump.waist[mu] * s.pump.waist[mu];
  const double wi2 = s.idler.waist[mu] * s.idler.waist[mu];
  const double ws2 = s.signal.waist[mu] * s.signal.waist[mu];
  const double a = 0.5 * (wp2 + wi2), off = 0.5 * wp2, c = 0.5 * (wp2 + ws2);
  AxisWhitening w;
  w.l11 = std::sqrt(a);
  w.l21 = off / w.l11;
  w.l22 = std::sqrt(c - w.l21 * w.l21);
  return w;
}

}  // namespace

double overlap_modulus(const SourceSetup& setup, double omega_i, double omega_s, TransverseWavevector k_i,
                       TransverseWavevector k_s) {
  const auto k0 = collection_wavevectors(setup, omega_i, omega_s);
  double e = 0.0;
  for (int mu = 0; mu < 2; ++mu) {
    const double di = k_i[mu] - k0.idler[mu];
    const double ds = k_s[mu] - k0.signal[mu];
    const double dp = k_i[mu] + k_s[mu];
    e += setup.idler.waist[mu] * setup.idler.waist[mu] * di * di +
         setup.signal.waist[mu] * setup.signal.waist[mu] * ds * ds +
         setup.pump.waist[mu] * setup.pump.waist[mu] * dp * dp;
  }
  return mode_normalization(setup) * std::exp(-0.25 * e);
}

BruteForceResult brute_force_phi(const SourceSetup& setup, double omega_i, double omega_s,
                                 const BruteForceOptions& opts) {
  const auto& crystal = setup.crystal;
  const auto wave_p = wave_coefficients(omega_i + omega_s, setup.pump.polarization, crystal);
  const auto wave_i = wave_coefficients(omega_i, setup.idler.polarization, crystal);
  const auto wave_s = wave_coefficients(omega_s, setup.signal.polarization, crystal);
  const auto center = expansion_center(setup, omega_i, omega_s);
  const double L = crystal.length;
  const double poling = crystal.poling_wavevector();
  const double peak = overlap_modulus(setup, omega_i, omega_s, center.idler, center.signal);
  const std::array<AxisWhitening, 2> white{whitening(setup, 0), whitening(setup, 1)};
  const double scale = L * peak * white[0].jacobian() * white[1].jacobian();

  auto level = [&](int n) {
    const auto& gh = quad::gauss_hermite(n);
    struct Node {
      double ki, ks, weight;
    };
    std::array<std::vector<Node>, 2> nodes;
    for (int mu = 0; mu < 2; ++mu) {
      nodes[mu].reserve(static_cast<std::size_t>(n) * n);
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) {
          const auto [di, ds] = white[mu].map(gh.nodes[a], gh.nodes[c]);
          nodes[mu].push_back({center.idler[mu] + di, center.signal[mu] + ds, gh.weights[a] * gh.weights[c]});
        }
    }
    double sum = 0.0;
    for (const auto& x : nodes[0]) {
      for (const auto& y : nodes[1]) {
        const TransverseWavevector ki{x.ki, y.ki}, ks{x.ks, y.ks};
        const double dk = poling + kz(wave_p, ki + ks) - kz(wave_i, ki) - kz(wave_s, ks);
        sum += x.weight * y.weight * sinc(0.5 * L * dk);
      }
    }
    return scale * sum;
  };

  // Each node's phase L dk / 2 is a difference of propagation constants of
  // size k_p, so it carries an absolute round-off of about L k_p eps.
  const double kp = kz(wave_p, center.idler + center.signal);
  const double phase_roundoff = L * std::abs(kp) * std::numeric_limits<double>::epsilon();

  BruteForceResult out;
  int n = std::max(2, opts.nodes_start);
  double previous = level(n);
  while (2 * n <= opts.nodes_max) {
    n *= 2;
    const double current = level(n);
    out.value = current;
    out.abs_error = std::abs(current - previous) + phase_roundoff * std::abs(current);
    out.nodes = n;
    if (out.abs_error <= opts.rel_tol * std::abs(current)) {
      out.converged = true;
      return out;
    }
    previous = current;
  }
  if (out.nodes == 0) {
    out.value = previous;
    out.abs_error = std::abs(previous);
    out.nodes = n;
  }
  return out;
}

IntegrandMap integrand_map(const SourceSetup& setup, double omega_i, double omega_s, int points, double widths) {
  if (points < 2) throw std::invalid_argument("integrand map needs at least two points per axis");
  IntegrandMap map;
  map.points = points;
  const auto center = expansion_center(setup, omega_i, omega_s);
  const auto k0 = collection_wavevectors(setup, omega_i, omega_s);
  map.kbar_ix = center.idler.kx;
  map.kbar_sx = center.signal.kx;
  map.k0_ix = k0.idler.kx;
  map.k0_sx = k0.signal.kx;
  // Marginal standard deviations of the overlap along k_ix and k_sx.
  const double wp2 = setup.pump.waist.x * setup.pump.waist.x;
  const double wi2 = setup.idler.waist.x * setup.idler.waist.x;
  const double ws2 = setup.signal.waist.x * setup.signal.waist.x;
  const double a = 0.5 * (wp2 + wi2), off = 0.5 * wp2, c = 0.5 * (wp2 + ws2);
  const double det = a * c - off * off;
  const double span_i = widths * std::sqrt(c / det);
  const double span_s = widths * std::sqrt(a / det);
  const auto wave_p = wave_coefficients(omega_i + omega_s, setup.pump.polarization, setup.crystal);
  const auto wave_i = wave_coefficients(omega_i, setup.idler.polarization, setup.crystal);
  const auto wave_s = wave_coefficients(omega_s, setup.signal.polarization, setup.crystal);
  const double L = setup.crystal.length;
  double max_overlap = 0.0, max_phase = 0.0;
  map.cells.reserve(static_cast<std::size_t>(points) * points);
  for (int r = 0; r < points; ++r) {
    const double kix = map.kbar_ix + span_i * (2.0 * r / (points - 1) - 1.0);
    for (int q = 0; q < points; ++q) {
      const double ksx = map.kbar_sx + span_s * (2.0 * q / (points - 1) - 1.0);
      const TransverseWavevector ki{kix, 0.0}, ks{ksx, 0.0};
      const double o = overlap_modulus(setup, omega_i, omega_s, ki, ks);
      const double dk = setup.crystal.poling_wavevector() + kz(wave_p, ki + ks) - kz(wave_i, ki) - kz(wave_s, ks);
      const double ph = o * std::abs(sinc(0.5 * L * dk));
      map.cells.push_back({kix, ksx, o, ph});
      max_overlap = std::max(max_overlap, o);
      max_phase = std::max(max_phase, ph);
    }
  }
  for (auto& cell : map.cells) {
    cell.overlap /= max_overlap;
    cell.with_phase = max_phase > 0.0 ? cell.with_phase / max_phase : 0.0;
  }
  return map;
}

double real_space_centroid(const WaveCoefficients& wave, TransverseWavevector kbar, int axis, double waist, double z) {
  const auto& gh = quad::gauss_hermite(64);
  const double kz0 = kz(wave, kbar);
  // Slope estimate only sets the sampling window.
  const double h = 1e-4;
  TransverseWavevector kp = kbar, km = kbar;
  if (axis == 0) {
    kp.kx += h;
    km.kx -= h;
  } else {
    kp.ky += h;
    km.ky -= h;
  }
  const double slope = (kz(wave, kp) - kz(wave, km)) / (2.0 * h);
  std::vector<double> dk(gh.nodes.size()), phase_z(gh.nodes.size());
  for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
    dk[j] = 2.0 * gh.nodes[j] / waist;
    TransverseWavevector k = kbar;
    if (axis == 0)
      k.kx += dk[j];
    else
      k.ky += dk[j];
    phase_z[j] = z * (kz(wave, k) - kz0);
  }
  const double guess = -slope * z;
  const double z0 = 0.5 * waist * waist * wave.n * wave.omega / kSpeedOfLight;
  const double spread = waist * std::sqrt(1.0 + (z / z0) * (z / z0));
  const double half = 8.0 * std::max(spread, waist);
  constexpr int kSamples = 2001;
  double num = 0.0, den = 0.0;
  for (int m = 0; m < kSamples; ++m) {
    const double mu = guess - half + 2.0 * half * m / (kSamples - 1);
    std::complex<double> u{};
    for (std::size_t j = 0; j < gh.nodes.size(); ++j)
      u += gh.weights[j] * std::exp(std::complex<double>(0.0, -(mu * dk[j] + phase_z[j])));
    const double p = std::norm(u);
    num += mu * p;
    den += p;
  }
  return num / den;
}

}  // namespace spdc
