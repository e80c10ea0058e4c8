#include "spdc/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

namespace spdc {

std::string model_tag_name(ModelTag tag) {
  switch (tag) {
    case ModelTag::ThinPerfectPM: return "thin-perfect-PM";
    case ModelTag::ThinSinc: return "thin-sinc";
    case ModelTag::FullFactorized: return "full-factorized";
    case ModelTag::WalkoffClosedForm: return "walkoff-closed-form";
  }
  return "unknown";
}

ModelTag parse_model_tag(const std::string& name) {
  for (ModelTag t : {ModelTag::ThinPerfectPM, ModelTag::ThinSinc, ModelTag::FullFactorized,
                     ModelTag::WalkoffClosedForm})
    if (model_tag_name(t) == name) return t;
  throw std::invalid_argument("unknown model '" + name +
                              "' (expected thin-perfect-PM, thin-sinc, full-factorized or walkoff-closed-form)");
}

namespace {

CrystalModel scenario_crystal(const Scenario& base, double alpha, double L) {
  CrystalModel c = base.crystal;
  c.length = L;
  if (base.solve_cut_angle) {
    CollectionGeometry g{alpha, alpha, base.phi, base.exact_sine};
    c.cut_angle = solve_pm_angle(c, wavelength_to_omega(base.pump_wavelength_um), g, base.pm);
  }
  return c;
}

}  // namespace

SourceSetup scenario_setup(const Scenario& base, double alpha, double w, double L, double r) {
  auto s = degenerate_setup(scenario_crystal(base, alpha, L), base.pump_wavelength_um, base.tau, w, r, alpha, base.phi,
                            base.pm);
  s.geometry.exact_sine = base.exact_sine;
  return s;
}

FrequencyDomain scenario_domain(const Scenario& base) {
  if (base.filter_half_width)
    return FrequencyDomain::filter(0.5 * wavelength_to_omega(base.pump_wavelength_um), *base.filter_half_width,
                                   base.crystal.window);
  return FrequencyDomain::window(base.crystal.window);
}

ThinConfig scenario_thin_config(const Scenario& base, double alpha, double w, double L) {
  ThinConfig cfg;
  cfg.w = w;
  cfg.alpha = alpha;
  cfg.tau = base.tau;
  cfg.omega0 = wavelength_to_omega(base.pump_wavelength_um);
  cfg.omega_b = base.crystal.window.omega_min;
  cfg.omega_t = base.crystal.window.omega_max;
  cfg.delta = base.filter_half_width;
  cfg.L = L;
  // Walk-off slope of the pump at omega0 for the collinear cut.
  const CrystalModel collinear = scenario_crystal(base, 0.0, L);
  cfg.beta_p = base.pm.pump == Polarization::Extraordinary ? walkoff_slope(cfg.omega0, collinear) : 0.0;
  return cfg;
}

AmplitudeModel amplitude_model(ModelTag tag, const SourceSetup& setup, const ZIntegralOptions& z) {
  AmplitudeModel m;
  m.pump = PumpEnvelope{setup.pump.omega0, setup.pump.tau};
  switch (tag) {
    case ModelTag::ThinPerfectPM:
      m.phi = [setup](double wi, double ws) { return phi_thin_perfect(setup, wi, ws); };
      break;
    case ModelTag::ThinSinc:
      m.phi = [setup](double wi, double ws) { return phi_thin(setup, wi, ws); };
      break;
    case ModelTag::FullFactorized:
      if (std::abs(std::sin(2.0 * setup.geometry.phi)) < 1e-12)
        m.phi = [setup, z](double wi, double ws) { return phi_factorized(setup, wi, ws, z).amplitude; };
      else
        m.phi = [setup, z](double wi, double ws) { return phi_general(setup, wi, ws, z).amplitude; };
      break;
    case ModelTag::WalkoffClosedForm:
      m.phi = [setup](double wi, double ws) { return phi_first_order_xi(paraxial_params(setup, wi, ws)); };
      break;
  }
  const auto& g = setup.geometry;
  const bool degenerate = setup.signal.omega == setup.idler.omega;
  const bool same_beams = setup.signal.waist.x == setup.idler.waist.x && setup.signal.waist.y == setup.idler.waist.y &&
                          setup.signal.polarization == setup.idler.polarization;
  m.symmetric = degenerate && same_beams && g.alpha_i == g.alpha_s && std::abs(std::sin(g.phi)) < 1e-12;
  if (g.alpha_i == g.alpha_s && g.alpha_i > 0.0) {
    // |Psi|^2 carries exp(-W2 alpha^2 v^2 / (2 c^2)); keep 8 standard deviations.
    double W2 = 0.0;
    const double c = std::cos(g.phi), s = std::sin(g.phi);
    for (int mu = 0; mu < 2; ++mu) {
      const double wp = setup.pump.waist[mu], wi = setup.idler.waist[mu], ws = setup.signal.waist[mu];
      const double wbar2 = 1.0 / (1.0 / (wp * wp) + 1.0 / (wi * wi) + 1.0 / (ws * ws));
      W2 += wbar2 * (mu == 0 ? c * c : s * s);
    }
    const double a = g.exact_sine ? std::sin(g.alpha_i) : g.alpha_i;
    m.v_halfwidth = 8.0 * kSpeedOfLight / (a * std::sqrt(W2));
  }
  return m;
}

RatioObjective make_ratio_objective(ModelTag tag, const Scenario& base, double alpha, double w, double L) {
  const double lambda_s = 2.0 * base.pump_wavelength_um;
  if (w < 5.0 * lambda_s) {
    std::ostringstream msg;
    msg << "waist " << w << " um is below the paraxial floor 5 lambda = " << 5.0 * lambda_s << " um";
    throw DomainError(msg.str());
  }
  RatioObjective obj;
  obj.r_min = std::max(0.2, 5.0 * base.pump_wavelength_um / w);
  switch (tag) {
    case ModelTag::ThinPerfectPM: {
      const ThinConfig cfg = scenario_thin_config(base, alpha, w, L);
      auto at_level = [cfg](int refinement) -> std::function<Evaluation(double)> {
        if (cfg.delta)
          return [cfg, refinement](double r) {
            const auto res = brightness_filtered(r, cfg, refinement);
            return Evaluation{res.exact, res.exact_abs_error};
          };
        return [cfg, refinement](double r) {
          const auto res = brightness_exact_thin_result(r, cfg, refinement);
          return Evaluation{res.value, res.abs_error};
        };
      };
      obj.evaluate = at_level(0);
      obj.evaluate_refined = at_level(1);
      return obj;
    }
    case ModelTag::WalkoffClosedForm: {
      if (alpha != 0.0) throw DomainError("the walk-off closed form is collinear only (alpha = 0)");
      const ThinConfig cfg = scenario_thin_config(base, alpha, w, L);
      obj.evaluate = [cfg](double r) {
        const double v = brightness_walkoff_collinear(r, cfg);
        return Evaluation{v, 1e-12 * v};
      };
      obj.evaluate_refined = obj.evaluate;  // closed form, nothing to refine
      return obj;
    }
    case ModelTag::ThinSinc:
    case ModelTag::FullFactorized: {
      const CrystalModel crystal = scenario_crystal(base, alpha, L);
      obj.theta = crystal.cut_angle;
      const FrequencyDomain domain = scenario_domain(base);
      auto at_level = [=](const BrightnessOptions& q, const ZIntegralOptions& z) {
        return [=](double r) {
          SourceSetup s = degenerate_setup(crystal, base.pump_wavelength_um, base.tau, w, r, alpha, base.phi, base.pm);
          s.geometry.exact_sine = base.exact_sine;
          const auto res = total_brightness(amplitude_model(tag, s, z), domain, q);
          return Evaluation{res.value, res.abs_error};
        };
      };
      ZIntegralOptions z_refined = base.z_integral;
      z_refined.rel_tol /= 4.0;
      obj.evaluate = at_level(base.quadrature, base.z_integral);
      obj.evaluate_refined = at_level(base.quadrature.refined(), z_refined);
      return obj;
    }
  }
  throw std::invalid_argument("unhandled model");
}

ScalarOptimum maximize_scalar(const std::function<double(double)>& f, const MaximizeOptions& opts) {
  if (!(opts.lo < opts.hi) || opts.coarse_points < 3) throw std::invalid_argument("bad maximization bracket");
  ScalarOptimum out;
  const int n = opts.coarse_points;
  std::vector<double> xs(n), fs(n);
  for (int i = 0; i < n; ++i) xs[i] = opts.lo + (opts.hi - opts.lo) * i / (n - 1);
  parallel_for(static_cast<std::size_t>(n), opts.workers, [&](std::size_t i) { fs[i] = f(xs[i]); });
  out.evaluations = n;
  const auto best = static_cast<int>(std::max_element(fs.begin(), fs.end()) - fs.begin());
  const double fmax = fs[best];
  const double fmin = *std::min_element(fs.begin(), fs.end());
  out.x = xs[best];
  out.f = fmax;
  if (fmax - fmin <= 1e-12 * std::abs(fmax)) {
    out.degenerate = true;
    return out;
  }
  if (best == 0 || best == n - 1) {
    out.at_edge = true;
    return out;
  }
  // Golden section on [x_{best-1}, x_{best+1}].
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = xs[best - 1], b = xs[best + 1];
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  out.evaluations += 2;
  while (b - a > 2.0 * opts.x_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
    ++out.evaluations;
  }
  if (fc > fd) {
    out.x = c;
    out.f = fc;
  } else {
    out.x = d;
    out.f = fd;
  }
  if (fmax > out.f) {  // the coarse point itself was better (flat top)
    out.x = xs[best];
    out.f = fmax;
  }
  return out;
}

RatioOptimum optimal_ratio(ModelTag tag, const Scenario& base, double alpha, double w, double L,
                           const MaximizeOptions& opts) {
  const RatioObjective obj = make_ratio_objective(tag, base, alpha, w, L);
  MaximizeOptions o = opts;
  o.lo = std::max(opts.lo, obj.r_min);
  const auto best = maximize_scalar([&](double r) { return obj.evaluate(r).value; }, o);
  RatioOptimum out;
  out.r_star = best.x;
  const auto final_eval = obj.evaluate(best.x);
  out.R_star = final_eval.value;
  out.R_abs_error = final_eval.abs_error;
  out.evaluations = best.evaluations + 1;
  out.degenerate = best.degenerate;
  out.at_edge = best.at_edge;
  out.theta = obj.theta;
  return out;
}

WaistOptimum optimal_waist(ModelTag tag, const Scenario& base, double alpha, double L, double w_lo, double w_hi,
                           int coarse_points, double rel_tol, const MaximizeOptions& ratio_opts) {
  if (!(w_lo > 0.0 && w_lo < w_hi) || coarse_points < 3) throw std::invalid_argument("bad waist bracket");
  WaistOptimum out;
  auto solve = [&](double w) {
    WaistSample s{w, optimal_ratio(tag, base, alpha, w, L, ratio_opts)};
    out.samples.push_back(s);
    return s.optimum.R_star;
  };
  const double la = std::log(w_lo), lb = std::log(w_hi);
  std::vector<double> ts(coarse_points), fs(coarse_points);
  for (int i = 0; i < coarse_points; ++i) {
    ts[i] = la + (lb - la) * i / (coarse_points - 1);
    fs[i] = solve(std::exp(ts[i]));
  }
  const auto best = static_cast<int>(std::max_element(fs.begin(), fs.end()) - fs.begin());
  double t_star = ts[best], f_star = fs[best];
  if (best == 0 || best == coarse_points - 1) {
    out.at_edge = true;
  } else {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = ts[best - 1], b = ts[best + 1];
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = solve(std::exp(c)), fd = solve(std::exp(d));
    while (b - a > rel_tol) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = solve(std::exp(c));
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = solve(std::exp(d));
      }
    }
    if (std::max(fc, fd) > f_star) {
      t_star = fc > fd ? c : d;
      f_star = std::max(fc, fd);
    }
  }
  out.w_star = std::exp(t_star);
  out.R_star = f_star;
  for (const auto& s : out.samples)
    if (s.w == out.w_star) out.r_star = s.optimum.r_star;
  out.near_floor = out.w_star < 20.0 * 2.0 * base.pump_wavelength_um;
  std::sort(out.samples.begin(), out.samples.end(), [](const auto& x, const auto& y) { return x.w < y.w; });
  return out;
}

std::vector<int> figure_ids() { return {3, 5, 6, 7, 8, 9}; }

FigurePreset figure_preset(int figure) {
  const double deg = kPi / 180.0;
  auto alpha_grid = [&](double max_deg, double step_deg) {
    std::vector<double> a;
    const int n = static_cast<int>(std::lround(max_deg / step_deg));
    for (int i = 0; i <= n; ++i) a.push_back(i * step_deg * deg);
    return a;
  };
  FigurePreset p;
  p.figure = figure;
  switch (figure) {
    case 3:
      p.axis = "alpha";
      p.models = {ModelTag::ThinPerfectPM};
      p.lengths = {100.0};
      p.waists = {10.0, 30.0, 50.0};
      p.alphas = alpha_grid(5.0, 0.25);
      break;
    case 5:
      p.axis = "alpha";
      p.models = {ModelTag::ThinSinc};
      p.lengths = {100.0};
      p.waists = {10.0, 30.0, 50.0};
      p.alphas = alpha_grid(5.0, 0.25);
      break;
    case 6:
      p.axis = "alpha";
      p.models = {ModelTag::FullFactorized};
      p.lengths = {100.0, 500.0};
      p.waists = {10.0, 30.0, 50.0, 70.0};
      p.alphas = alpha_grid(5.0, 0.5);
      break;
    case 7:
      p.axis = "w";
      p.models = {ModelTag::FullFactorized, ModelTag::WalkoffClosedForm};
      p.lengths = {500.0};
      p.waists = {10.0, 15.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0};
      p.alphas = {0.0};
      break;
    case 8:
      p.axis = "w";
      p.models = {ModelTag::FullFactorized};
      p.lengths = {500.0};
      p.waists = {4.5, 5.0, 6.0, 7.0, 8.0, 10.0, 12.0, 15.0, 20.0, 30.0};
      p.alphas = {0.0};
      break;
    case 9:
      p.axis = "alpha";
      p.models = {ModelTag::FullFactorized};
      p.lengths = {100.0};
      p.waists = {10.0, 30.0, 50.0, 70.0};
      p.alphas = alpha_grid(5.0, 0.5);
      break;
    default: {
      std::ostringstream msg;
      msg << "unknown figure " << figure << " (available: 3, 5, 6, 7, 8, 9)";
      throw std::invalid_argument(msg.str());
    }
  }
  return p;
}

void normalize_rows(std::vector<SweepRow>& rows, const std::string& axis) {
  using Key = std::tuple<int, double, double>;
  auto key = [&](const SweepRow& r) { return Key{static_cast<int>(r.model), r.L, axis == "alpha" ? r.w : -1.0}; };
  std::map<Key, double> best;
  for (const auto& r : rows)
    if (r.status == "ok") best[key(r)] = std::max(best[key(r)], r.R_star);
  for (auto& r : rows) {
    const auto it = best.find(key(r));
    r.R_norm = (r.status == "ok" && it != best.end() && it->second > 0.0) ? r.R_star / it->second
                                                                           : std::numeric_limits<double>::quiet_NaN();
  }
}

std::vector<SweepRow> figure_sweep(int figure, const Scenario& base_in, const FigureOverrides& overrides,
                                   int workers) {
  FigurePreset p = figure_preset(figure);
  if (overrides.lengths) p.lengths = *overrides.lengths;
  if (overrides.waists) p.waists = *overrides.waists;
  if (overrides.alphas) p.alphas = *overrides.alphas;
  if (overrides.tau) p.tau = *overrides.tau;
  Scenario base = base_in;
  base.tau = p.tau;
  base.pump_wavelength_um = p.pump_wavelength_um;
  if (overrides.quadrature) base.quadrature = *overrides.quadrature;

  std::vector<SweepRow> rows;
  for (ModelTag m : p.models)
    for (double L : p.lengths)
      for (double w : p.waists)
        for (double a : p.alphas) {
          if (m == ModelTag::WalkoffClosedForm && a != 0.0) continue;
          SweepRow r;
          r.figure = figure;
          r.model = m;
          r.alpha = a;
          r.w = w;
          r.L = L;
          rows.push_back(r);
        }
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    auto& r = rows[i];
    try {
      const auto opt = optimal_ratio(r.model, base, r.alpha, r.w, r.L);
      r.r_star = opt.r_star;
      r.R_star = opt.R_star;
      r.R_abs_error = opt.R_abs_error;
      r.evaluations = opt.evaluations;
      if (opt.degenerate) r.status = "degenerate";
      if (opt.at_edge) r.status = "bracket-edge";
    } catch (const std::exception& e) {
      r.status = std::string("error: ") + e.what();
      r.r_star = r.R_star = r.R_abs_error = std::numeric_limits<double>::quiet_NaN();
    }
  });
  normalize_rows(rows, p.axis);
  return rows;
}

}  // namespace spdc
