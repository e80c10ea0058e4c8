#include "spdc/commands.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "spdc/optimize.hpp"
#include "spdc/thinlimit.hpp"
#include "spdc/wavefunction.hpp"

namespace spdc {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDeg = 180.0 / kPi;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return csv_escape(std::get<std::string>(c));
}

std::vector<std::string> provenance_of(const RunConfig& cfg, const std::string& command) {
  std::vector<std::string> p{"spdc " + command};
  for (auto& line : cfg.describe()) p.push_back(line);
  return p;
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

// Evenly spaced frequencies covering a wavelength range.
std::vector<double> omega_grid(double lambda_lo, double lambda_hi, int points) {
  const double w0 = wavelength_to_omega(lambda_hi), w1 = wavelength_to_omega(lambda_lo);
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = w0 + (w1 - w0) * i / (points - 1);
  return g;
}

}  // namespace

OutputFormat parse_output_format(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw std::invalid_argument("unknown format '" + name + "' (expected csv or json)");
}

void write_csv(const Table& table, std::ostream& out) {
  for (const auto& line : table.provenance) out << "# " << line << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << '\n';
  }
}

void write_json(const Table& table, std::ostream& out) {
  nlohmann::ordered_json j;
  j["provenance"] = table.provenance;
  j["columns"] = table.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r;
    for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i) {
      const auto& c = row[i];
      if (const auto* d = std::get_if<double>(&c))
        r[table.columns[i]] = std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr);
      else if (const auto* n = std::get_if<long long>(&c))
        r[table.columns[i]] = *n;
      else
        r[table.columns[i]] = std::get<std::string>(c);
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  out << j.dump(2) << '\n';
}

void write_table(const Table& table, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::Csv)
    write_csv(table, out);
  else
    write_json(table, out);
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols{"figure",     "model",    "axis",    "axis_value", "alpha_deg",
                                             "w_um",       "L_um",     "r_star",  "R_star",     "R_norm",
                                             "R_abs_error", "evaluations", "status"};
  return cols;
}

ValidationReport validate_config(const RunConfig& cfg) {
  ValidationReport rep;
  for (auto& line : cfg.describe()) rep.lines.push_back(line);
  rep.lines.push_back("integration window used: " + fmt(omega_to_wavelength(cfg.crystal.window.omega_max)) +
                      " um to " + fmt(omega_to_wavelength(cfg.crystal.window.omega_min)) + " um");
  SourceSetup setup;
  try {
    setup = cfg.setup();
  } catch (const std::exception& e) {
    rep.errors.push_back(std::string("setup: ") + e.what());
    return rep;
  }
  const auto check = check_setup(setup);
  rep.errors.insert(rep.errors.end(), check.errors.begin(), check.errors.end());
  rep.warnings.insert(rep.warnings.end(), check.warnings.begin(), check.warnings.end());
  rep.lines.push_back("cut angle theta = " + fmt(setup.crystal.cut_angle * kDeg, 10) + " deg" +
                      (cfg.auto_cut_angle ? " (phase matched)" : " (fixed)"));
  if (!check.ok()) return rep;
  try {
    const auto b = paraxial_params(setup, setup.idler.omega, setup.signal.omega);
    const char* names[3] = {"pump", "idler", "signal"};
    for (int k = 0; k < 3; ++k) {
      const auto& be = b.beams[k];
      rep.lines.push_back(std::string(names[k]) + ": xi_x = " + fmt(be.xi[0]) + ", xi_y = " + fmt(be.xi[1]) +
                          ", nu_x = " + fmt(be.nu[0]) + ", nu_y = " + fmt(be.nu[1]));
    }
    for (int mu = 0; mu < 2; ++mu) {
      const auto& a = b.axes[mu];
      const std::string ax = mu == 0 ? "x" : "y";
      rep.lines.push_back("axis " + ax + ": xi = " + fmt(a.xi) + ", A = " + fmt(a.A) + ", B = " + fmt(a.B) +
                          ", C = " + fmt(a.C));
    }
    rep.lines.push_back("delta k at expansion centre = " + fmt(b.delta_kz) + " 1/um");
    double xi_max = 0.0, a_max = 0.0;
    for (const auto& a : b.axes) {
      xi_max = std::max(xi_max, std::abs(a.xi));
      a_max = std::max(a_max, std::abs(a.A));
    }
    if (xi_max > 0.1 || a_max > 0.1)
      rep.warnings.push_back("thin-crystal expansion parameters exceed 0.1 (xi = " + fmt(xi_max, 3) +
                             ", A = " + fmt(a_max, 3) + "); use the full model");
  } catch (const std::exception& e) {
    rep.errors.push_back(std::string("paraxial expansion: ") + e.what());
  }
  return rep;
}

ValidationReport cmd_validate(const std::filesystem::path& config_path) {
  try {
    return validate_config(load_run_config(config_path));
  } catch (const ConfigError& e) {
    ValidationReport rep;
    rep.errors = e.problems();
    return rep;
  }
}

CommandResult cmd_jsa(const RunConfig& cfg) {
  if (!cfg.jsa) throw ConfigError({"computation.jsa: missing (required by the jsa command)"});
  const auto& spec = *cfg.jsa;
  CommandResult res;
  res.table.provenance = provenance_of(cfg, "jsa");
  const SourceSetup setup = cfg.setup();
  res.table.provenance.push_back("theta = " + format_double(setup.crystal.cut_angle * kDeg) + " deg");

  if (spec.mode == JsaMode::TransverseMap) {
    const double wi = wavelength_to_omega(spec.map_idler_um), ws = wavelength_to_omega(spec.map_signal_um);
    res.table.provenance.push_back("mode = transverse-map, omega_i = " + format_double(wi) +
                                   " rad/fs, omega_s = " + format_double(ws) + " rad/fs");
    res.table.columns = {"kind", "k_ix_per_um", "k_sx_per_um", "overlap_norm", "integrand_norm"};
    const auto map = integrand_map(setup, wi, ws, spec.points, spec.map_widths);
    for (const auto& c : map.cells)
      res.table.rows.push_back({std::string("cell"), c.k_ix, c.k_sx, c.overlap, c.with_phase});
    res.table.rows.push_back({std::string("kbar"), map.kbar_ix, map.kbar_sx, kNaN, kNaN});
    res.table.rows.push_back({std::string("k0"), map.k0_ix, map.k0_sx, kNaN, kNaN});
    return res;
  }

  res.table.provenance.push_back("mode = spectral, " + std::to_string(spec.points) + " x " +
                                 std::to_string(spec.points) + " points uniform in omega");
  res.table.columns = {"omega_i_rad_per_fs", "omega_s_rad_per_fs", "lambda_i_um", "lambda_s_um",
                       "abs_psi", "re_psi", "im_psi", "status"};
  const auto gi = omega_grid(spec.idler_lo_um, spec.idler_hi_um, spec.points);
  const auto gs = omega_grid(spec.signal_lo_um, spec.signal_hi_um, spec.points);
  ZIntegralOptions z;
  z.rel_tol = std::min(1e-8, cfg.tolerance * 1e-2);
  const AmplitudeModel model = amplitude_model(cfg.model, setup, z);
  const std::size_t n = gi.size() * gs.size();
  std::vector<std::complex<double>> values(n);
  std::vector<std::string> status(n, "ok");
  parallel_for(n, cfg.workers, [&](std::size_t k) {
    const double wi = gi[k / gs.size()], ws = gs[k % gs.size()];
    try {
      auto v = model.phi(wi, ws);
      if (model.pump) v *= pump_spectral_amplitude(wi + ws, model.pump->omega0, model.pump->tau);
      values[k] = v;
    } catch (const std::exception& e) {
      values[k] = {kNaN, kNaN};
      status[k] = std::string("error: ") + e.what();
    }
  });
  for (std::size_t k = 0; k < n; ++k) {
    const double wi = gi[k / gs.size()], ws = gs[k % gs.size()];
    if (status[k] != "ok") ++res.failures;
    const double mag = status[k] == "ok" ? std::abs(values[k]) : kNaN;
    res.table.rows.push_back({wi, ws, omega_to_wavelength(wi), omega_to_wavelength(ws), mag, values[k].real(),
                              values[k].imag(), status[k]});
  }
  if (res.failures) res.messages.push_back(std::to_string(res.failures) + " of " + std::to_string(n) + " cells failed");
  return res;
}

CommandResult cmd_brightness(const RunConfig& cfg) {
  CommandResult res;
  res.table.provenance = provenance_of(cfg, "brightness");
  res.table.columns = {"model", "r", "R", "R_abs_error", "evaluations", "domain", "status"};
  const Scenario sc = cfg.scenario();
  try {
    const auto obj = make_ratio_objective(cfg.model, sc, cfg.alpha, cfg.waist, cfg.crystal.length);
    const auto e = obj.evaluate(cfg.ratio);
    res.table.rows.push_back({model_tag_name(cfg.model), cfg.ratio, e.value, e.abs_error, 1LL,
                              scenario_domain(sc).describe(), std::string("ok")});
  } catch (const std::exception& e) {
    ++res.failures;
    res.table.rows.push_back({model_tag_name(cfg.model), cfg.ratio, kNaN, kNaN, 0LL, scenario_domain(sc).describe(),
                              std::string("error: ") + e.what()});
  }
  return res;
}

namespace {

std::vector<Cell> sweep_cells(const SweepRow& r, const std::string& axis, double axis_value) {
  return {static_cast<long long>(r.figure), model_tag_name(r.model), axis, axis_value, r.alpha * kDeg, r.w, r.L,
          r.r_star, r.R_star, r.R_norm, r.R_abs_error, static_cast<long long>(r.evaluations), r.status};
}

double axis_value_of(const SweepRow& r, const std::string& axis) {
  if (axis == "alpha") return r.alpha * kDeg;
  if (axis == "w") return r.w;
  if (axis == "L") return r.L;
  return r.r_star;
}

}  // namespace

CommandResult cmd_sweep(const RunConfig& cfg) {
  if (!cfg.sweep) throw ConfigError({"computation.sweep: missing (required by the sweep command)"});
  const auto& spec = *cfg.sweep;
  CommandResult res;
  res.table.provenance = provenance_of(cfg, "sweep");
  res.table.columns = sweep_columns();
  const Scenario sc = cfg.scenario();
  const char* axis = spec.axis == SweepAxis::Alpha   ? "alpha"
                     : spec.axis == SweepAxis::Waist ? "w"
                     : spec.axis == SweepAxis::Length ? "L"
                                                      : "r";
  std::vector<SweepRow> rows(spec.values.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    r.model = cfg.model;
    r.alpha = cfg.alpha;
    r.w = cfg.waist;
    r.L = cfg.crystal.length;
    r.r_star = cfg.ratio;
    const double v = spec.values[i];
    switch (spec.axis) {
      case SweepAxis::Alpha: r.alpha = v; break;
      case SweepAxis::Waist: r.w = v; break;
      case SweepAxis::Length: r.L = v; break;
      case SweepAxis::Ratio: r.r_star = v; break;
    }
  }
  const bool optimize = spec.optimize_ratio && spec.axis != SweepAxis::Ratio;
  parallel_for(rows.size(), cfg.workers, [&](std::size_t i) {
    auto& r = rows[i];
    try {
      if (optimize) {
        const auto opt = optimal_ratio(r.model, sc, r.alpha, r.w, r.L);
        r.r_star = opt.r_star;
        r.R_star = opt.R_star;
        r.R_abs_error = opt.R_abs_error;
        r.evaluations = opt.evaluations;
        if (opt.degenerate) r.status = "degenerate";
        if (opt.at_edge) r.status = "bracket-edge";
      } else {
        const auto e = make_ratio_objective(r.model, sc, r.alpha, r.w, r.L).evaluate(r.r_star);
        r.R_star = e.value;
        r.R_abs_error = e.abs_error;
        r.evaluations = 1;
      }
    } catch (const std::exception& e) {
      r.status = std::string("error: ") + e.what();
      r.R_star = r.R_abs_error = kNaN;
    }
  });
  // One curve: normalize to the sweep maximum.
  double best = 0.0;
  for (const auto& r : rows)
    if (r.status == "ok") best = std::max(best, r.R_star);
  for (auto& r : rows) {
    r.R_norm = (r.status == "ok" && best > 0.0) ? r.R_star / best : kNaN;
    if (r.status.rfind("error", 0) == 0) ++res.failures;
    res.table.rows.push_back(sweep_cells(r, axis, axis_value_of(r, axis)));
  }
  if (res.failures) res.messages.push_back(std::to_string(res.failures) + " sweep points failed");
  return res;
}

CommandResult cmd_sweep_figure(int figure, const RunConfig& cfg) {
  const auto preset = figure_preset(figure);
  CommandResult res;
  res.table.provenance = provenance_of(cfg, "sweep --figure " + std::to_string(figure));
  std::string models;
  for (auto m : preset.models) models += (models.empty() ? "" : " ") + model_tag_name(m);
  res.table.provenance.push_back("preset: figure " + std::to_string(figure) + ", axis " + preset.axis +
                                 ", models " + models + ", tau " + format_double(preset.tau) +
                                 " fs, pump " + format_double(preset.pump_wavelength_um) + " um");
  res.table.columns = sweep_columns();
  Scenario sc = cfg.scenario();
  sc.filter_half_width.reset();
  const auto rows = figure_sweep(figure, sc, {}, cfg.workers);
  for (const auto& r : rows) {
    if (r.status.rfind("error", 0) == 0) ++res.failures;
    res.table.rows.push_back(sweep_cells(r, preset.axis, axis_value_of(r, preset.axis)));
  }
  if (res.failures) res.messages.push_back(std::to_string(res.failures) + " sweep points failed");
  return res;
}

}  // namespace spdc
