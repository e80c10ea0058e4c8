#include "spdc/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "spdc/thinlimit.hpp"
#include "spdc/units.hpp"

namespace spdc {
namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::ostringstream os;
  os << problems.size() << " configuration problem" << (problems.size() == 1 ? "" : "s") << ":";
  for (const auto& p : problems) os << "\n  - " << p;
  return os.str();
}

// Collects problems instead of throwing at the first one.
class Reader {
 public:
  std::vector<std::string> problems;

  void unknown_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
    if (!node.IsMap()) return;
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) problems.push_back(where + ": unknown key '" + key + "'");
    }
  }

  std::optional<std::string> text(const YAML::Node& node, const std::string& key, const std::string& where,
                                  bool required) {
    const auto v = node[key];
    if (!v) {
      if (required) problems.push_back(where + "." + key + ": missing");
      return std::nullopt;
    }
    if (!v.IsScalar()) {
      problems.push_back(where + "." + key + ": expected a scalar");
      return std::nullopt;
    }
    return v.as<std::string>();
  }

  template <typename Parse>
  std::optional<double> quantity(const YAML::Node& node, const std::string& key, const std::string& where,
                                 bool required, Parse parse) {
    const auto t = text(node, key, where, required);
    if (!t) return std::nullopt;
    try {
      return parse(*t);
    } catch (const std::exception& e) {
      problems.push_back(where + "." + key + ": " + e.what());
      return std::nullopt;
    }
  }

  std::optional<double> number(const YAML::Node& node, const std::string& key, const std::string& where,
                               bool required) {
    return quantity(node, key, where, required, [](const std::string& s) {
      const auto q = units::parse_quantity(s);
      if (q.dimension != units::Dimension::Dimensionless)
        throw std::invalid_argument("expected a plain number, got '" + s + "'");
      return q.value;
    });
  }

  std::optional<SellmeierCoefficients> sellmeier(const YAML::Node& node, const std::string& where) {
    if (!node || !node.IsMap()) {
      problems.push_back(where + ": missing or not a mapping");
      return std::nullopt;
    }
    unknown_keys(node, where, {"a", "poles", "poly"});
    SellmeierCoefficients s;
    try {
      s.a = node["a"].as<double>();
      if (node["poles"])
        for (const auto& p : node["poles"]) {
          if (!p.IsSequence() || p.size() != 2) throw std::invalid_argument("each pole is [b, c]");
          s.poles.emplace_back(p[0].as<double>(), p[1].as<double>());
        }
      if (node["poly"])
        for (const auto& p : node["poly"]) s.poly.push_back(p.as<double>());
    } catch (const std::exception& e) {
      problems.push_back(where + ": " + e.what());
      return std::nullopt;
    }
    return s;
  }
};

YAML::Node load_yaml_file(const std::filesystem::path& path, const std::string& what) {
  if (!std::filesystem::exists(path)) throw ConfigError({what + " not found: " + path.string()});
  try {
    return YAML::LoadFile(path.string());
  } catch (const YAML::Exception& e) {
    throw ConfigError({what + " " + path.string() + ": " + e.what()});
  }
}

CrystalModel read_crystal(const YAML::Node& root, const std::string& where, Reader& r, bool* auto_cut) {
  CrystalModel c;
  r.unknown_keys(root, where,
                 {"name", "sellmeier_ordinary", "sellmeier_extraordinary", "transmission_window", "length",
                  "poling_period", "poling_order", "cut_angle"});
  c.name = r.text(root, "name", where, false).value_or("crystal");
  if (auto s = r.sellmeier(root["sellmeier_ordinary"], where + ".sellmeier_ordinary")) c.ordinary = *s;
  if (auto s = r.sellmeier(root["sellmeier_extraordinary"], where + ".sellmeier_extraordinary")) c.extraordinary = *s;
  const auto win = root["transmission_window"];
  if (!win || !win.IsSequence() || win.size() != 2) {
    r.problems.push_back(where + ".transmission_window: expected [lambda_min, lambda_max]");
  } else {
    try {
      const double l0 = units::parse_length_um(win[0].as<std::string>());
      const double l1 = units::parse_length_um(win[1].as<std::string>());
      if (!(l0 > 0.0 && l0 < l1)) throw std::invalid_argument("need 0 < lambda_min < lambda_max");
      c.window = {wavelength_to_omega(l1), wavelength_to_omega(l0)};
    } catch (const std::exception& e) {
      r.problems.push_back(where + ".transmission_window: " + e.what());
    }
  }
  c.length = r.quantity(root, "length", where, true, units::parse_length_um).value_or(0.0);
  const auto poling = r.text(root, "poling_period", where, false);
  if (poling && *poling != "none")
    c.poling_period = r.quantity(root, "poling_period", where, true, units::parse_length_um);
  if (auto m = r.number(root, "poling_order", where, false)) c.poling_order = static_cast<int>(std::lround(*m));
  const auto cut = r.text(root, "cut_angle", where, false);
  const bool is_auto = !cut || *cut == "auto";
  if (!is_auto) c.cut_angle = r.quantity(root, "cut_angle", where, true, units::parse_angle_rad).value_or(0.0);
  if (auto_cut) *auto_cut = is_auto;
  return c;
}

std::vector<double> read_grid(const YAML::Node& node, const std::string& where, Reader& r,
                              const std::function<double(const std::string&)>& parse) {
  std::vector<double> out;
  if (node["values"]) {
    if (!node["values"].IsSequence()) {
      r.problems.push_back(where + ".values: expected a list");
      return out;
    }
    for (const auto& v : node["values"]) {
      try {
        out.push_back(parse(v.as<std::string>()));
      } catch (const std::exception& e) {
        r.problems.push_back(where + ".values: " + e.what());
      }
    }
  } else if (node["range"]) {
    const auto range = node["range"];
    r.unknown_keys(range, where + ".range", {"from", "to", "points"});
    const auto lo = r.quantity(range, "from", where + ".range", true, parse);
    const auto hi = r.quantity(range, "to", where + ".range", true, parse);
    const auto n = r.number(range, "points", where + ".range", true);
    if (lo && hi && n) {
      const int points = static_cast<int>(std::lround(*n));
      if (points < 2) {
        r.problems.push_back(where + ".range.points: need at least 2");
      } else {
        for (int i = 0; i < points; ++i) out.push_back(*lo + (*hi - *lo) * i / (points - 1));
      }
    }
  } else {
    r.problems.push_back(where + ": give either 'values' or 'range'");
  }
  return out;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

CrystalModel load_crystal_file(const std::filesystem::path& path, bool* auto_cut) {
  const auto root = load_yaml_file(path, "crystal file");
  Reader r;
  auto c = read_crystal(root, path.filename().string(), r, auto_cut);
  if (!r.problems.empty()) throw ConfigError(r.problems);
  return c;
}

std::filesystem::path bundled_bbo_path() { return std::filesystem::path(SPDC_DATA_DIR) / "bbo.yaml"; }

CrystalModel bundled_bbo() { return load_crystal_file(bundled_bbo_path()); }

RunConfig parse_run_config(const std::string& yaml_text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError({std::string("YAML syntax: ") + e.what()});
  }
  if (!root.IsMap()) throw ConfigError({"top level must be a mapping"});
  Reader r;
  RunConfig cfg;
  r.unknown_keys(root, "config", {"crystal", "setup", "computation"});

  if (const auto path = r.text(root, "crystal", "config", true)) {
    std::filesystem::path p(*path);
    if (p.is_relative()) p = base_dir / p;
    cfg.crystal_path = p.lexically_normal();
    try {
      cfg.crystal = load_crystal_file(cfg.crystal_path, &cfg.auto_cut_angle);
    } catch (const ConfigError& e) {
      for (const auto& pr : e.problems()) r.problems.push_back(pr);
    }
  }

  const auto setup = root["setup"];
  if (!setup || !setup.IsMap()) {
    r.problems.push_back("setup: missing or not a mapping");
  } else {
    const std::string w = "setup";
    r.unknown_keys(setup, w,
                   {"pump_wavelength", "pump_duration", "waist", "ratio", "pump_waist", "alpha", "phi", "pm_type",
                    "exact_sine", "length", "cut_angle", "poling_period", "poling_order"});
    if (auto v = r.quantity(setup, "pump_wavelength", w, true, units::parse_length_um)) cfg.pump_wavelength_um = *v;
    if (auto v = r.quantity(setup, "pump_duration", w, true, units::parse_time_fs)) cfg.tau = *v;
    if (auto v = r.quantity(setup, "waist", w, true, units::parse_length_um)) cfg.waist = *v;
    const bool has_ratio = static_cast<bool>(setup["ratio"]), has_wp = static_cast<bool>(setup["pump_waist"]);
    if (has_ratio && has_wp) r.problems.push_back("setup: give either 'ratio' or 'pump_waist', not both");
    if (has_ratio) {
      if (auto v = r.number(setup, "ratio", w, true)) cfg.ratio = *v;
    } else if (has_wp) {
      if (auto v = r.quantity(setup, "pump_waist", w, true, units::parse_length_um)) cfg.ratio = *v / cfg.waist;
    }
    if (auto v = r.quantity(setup, "alpha", w, false, units::parse_angle_rad)) cfg.alpha = *v;
    if (auto v = r.quantity(setup, "phi", w, false, units::parse_angle_rad)) cfg.phi = *v;
    if (auto t = r.text(setup, "pm_type", w, false)) {
      try {
        cfg.pm = PhaseMatchingType::parse(*t);
      } catch (const std::exception& e) {
        r.problems.push_back("setup.pm_type: " + std::string(e.what()));
      }
    }
    if (setup["exact_sine"]) {
      try {
        cfg.exact_sine = setup["exact_sine"].as<bool>();
      } catch (const std::exception&) {
        r.problems.push_back("setup.exact_sine: expected true or false");
      }
    }
    if (auto v = r.quantity(setup, "length", w, false, units::parse_length_um)) cfg.crystal.length = *v;
    if (auto t = r.text(setup, "cut_angle", w, false)) {
      if (*t == "auto") {
        cfg.auto_cut_angle = true;
      } else if (auto v = r.quantity(setup, "cut_angle", w, true, units::parse_angle_rad)) {
        cfg.crystal.cut_angle = *v;
        cfg.auto_cut_angle = false;
      }
    }
    if (auto t = r.text(setup, "poling_period", w, false)) {
      if (*t == "none")
        cfg.crystal.poling_period.reset();
      else
        cfg.crystal.poling_period = r.quantity(setup, "poling_period", w, true, units::parse_length_um);
    }
    if (auto v = r.number(setup, "poling_order", w, false)) cfg.crystal.poling_order = static_cast<int>(std::lround(*v));
    if (!(cfg.ratio > 0.0)) r.problems.push_back("setup.ratio: must be positive");
    if (!(cfg.tau > 0.0)) r.problems.push_back("setup.pump_duration: must be positive");
    if (!(cfg.waist > 0.0)) r.problems.push_back("setup.waist: must be positive");
    if (cfg.alpha < 0.0) r.problems.push_back("setup.alpha: must be non-negative");
  }

  const auto comp = root["computation"];
  if (comp) {
    const std::string w = "computation";
    if (!comp.IsMap()) {
      r.problems.push_back("computation: not a mapping");
    } else {
      r.unknown_keys(comp, w, {"model", "filter", "sweep", "jsa", "output", "tolerance", "workers"});
      if (auto t = r.text(comp, "model", w, false)) {
        try {
          cfg.model = parse_model_tag(*t);
        } catch (const std::exception& e) {
          r.problems.push_back("computation.model: " + std::string(e.what()));
        }
      }
      if (const auto f = comp["filter"]) {
        r.unknown_keys(f, w + ".filter", {"center", "width"});
        cfg.filter_center_um = r.quantity(f, "center", w + ".filter", true, units::parse_length_um);
        cfg.filter_width_um = r.quantity(f, "width", w + ".filter", true, units::parse_length_um);
        if (cfg.filter_center_um &&
            std::abs(*cfg.filter_center_um - 2.0 * cfg.pump_wavelength_um) > 1e-6 * *cfg.filter_center_um)
          r.problems.push_back("computation.filter.center: must equal twice the pump wavelength (degenerate filter)");
        if (cfg.filter_width_um && !(*cfg.filter_width_um > 0.0))
          r.problems.push_back("computation.filter.width: must be positive");
      }
      if (const auto s = comp["sweep"]) {
        const std::string ws = w + ".sweep";
        r.unknown_keys(s, ws, {"axis", "values", "range", "optimize_ratio"});
        SweepSpec spec;
        std::function<double(const std::string&)> parse = units::parse_angle_rad;
        const auto axis = r.text(s, "axis", ws, true).value_or("alpha");
        if (axis == "alpha") {
          spec.axis = SweepAxis::Alpha;
        } else if (axis == "w") {
          spec.axis = SweepAxis::Waist;
          parse = units::parse_length_um;
        } else if (axis == "L") {
          spec.axis = SweepAxis::Length;
          parse = units::parse_length_um;
        } else if (axis == "r") {
          spec.axis = SweepAxis::Ratio;
          parse = [](const std::string& t) {
            const auto q = units::parse_quantity(t);
            if (q.dimension != units::Dimension::Dimensionless)
              throw std::invalid_argument("ratio values are plain numbers");
            return q.value;
          };
        } else {
          r.problems.push_back(ws + ".axis: expected alpha, w, L or r, got '" + axis + "'");
        }
        spec.values = read_grid(s, ws, r, parse);
        if (s["optimize_ratio"]) {
          try {
            spec.optimize_ratio = s["optimize_ratio"].as<bool>();
          } catch (const std::exception&) {
            r.problems.push_back(ws + ".optimize_ratio: expected true or false");
          }
        }
        cfg.sweep = spec;
      }
      if (const auto j = comp["jsa"]) {
        const std::string wj = w + ".jsa";
        r.unknown_keys(j, wj, {"mode", "points", "idler_range", "signal_range", "idler_wavelength",
                               "signal_wavelength", "widths"});
        JsaSpec spec;
        const auto mode = r.text(j, "mode", wj, false).value_or("spectral");
        if (auto n = r.number(j, "points", wj, false)) spec.points = static_cast<int>(std::lround(*n));
        if (spec.points < 2) r.problems.push_back(wj + ".points: need at least 2");
        auto pair = [&](const char* key, double& lo, double& hi) {
          const auto n = j[key];
          if (!n || !n.IsSequence() || n.size() != 2) {
            r.problems.push_back(wj + "." + key + ": expected [lambda_lo, lambda_hi]");
            return;
          }
          try {
            lo = units::parse_length_um(n[0].as<std::string>());
            hi = units::parse_length_um(n[1].as<std::string>());
            if (!(lo < hi)) throw std::invalid_argument("need lambda_lo < lambda_hi");
          } catch (const std::exception& e) {
            r.problems.push_back(wj + "." + key + ": " + e.what());
          }
        };
        if (mode == "spectral") {
          spec.mode = JsaMode::Spectral;
          pair("idler_range", spec.idler_lo_um, spec.idler_hi_um);
          pair("signal_range", spec.signal_lo_um, spec.signal_hi_um);
        } else if (mode == "transverse-map") {
          spec.mode = JsaMode::TransverseMap;
          spec.map_idler_um = r.quantity(j, "idler_wavelength", wj, true, units::parse_length_um).value_or(0.0);
          spec.map_signal_um = r.quantity(j, "signal_wavelength", wj, true, units::parse_length_um).value_or(0.0);
          if (auto v = r.number(j, "widths", wj, false)) spec.map_widths = *v;
        } else {
          r.problems.push_back(wj + ".mode: expected spectral or transverse-map, got '" + mode + "'");
        }
        cfg.jsa = spec;
      }
      cfg.output = r.text(comp, "output", w, false).value_or("");
      if (auto v = r.number(comp, "tolerance", w, false)) {
        cfg.tolerance = *v;
        if (!(cfg.tolerance > 0.0 && cfg.tolerance < 1.0)) r.problems.push_back("computation.tolerance: need 0 < tol < 1");
      }
      if (auto v = r.number(comp, "workers", w, false)) {
        cfg.workers = static_cast<int>(std::lround(*v));
        if (cfg.workers < 1) r.problems.push_back("computation.workers: need at least 1");
      }
    }
  }
  if (!r.problems.empty()) throw ConfigError(r.problems);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError({"config file not found: " + path.string()});
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto cfg = parse_run_config(ss.str(), path.parent_path());
  cfg.source = path;
  return cfg;
}

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.crystal_path = bundled_bbo_path();
  cfg.crystal = load_crystal_file(cfg.crystal_path, &cfg.auto_cut_angle);
  return cfg;
}

SourceSetup RunConfig::setup() const {
  auto s = degenerate_setup(crystal, pump_wavelength_um, tau, waist, ratio, alpha, phi, pm);
  s.geometry.exact_sine = exact_sine;
  if (auto_cut_angle) s = with_phase_matched_cut(s);
  return s;
}

Scenario RunConfig::scenario() const {
  Scenario sc;
  sc.crystal = crystal;
  sc.pump_wavelength_um = pump_wavelength_um;
  sc.tau = tau;
  sc.pm = pm;
  sc.phi = phi;
  sc.solve_cut_angle = auto_cut_angle;
  sc.exact_sine = exact_sine;
  if (filter_center_um && filter_width_um) sc.filter_half_width = filter_half_width(*filter_center_um, *filter_width_um);
  sc.quadrature.rel_tol = tolerance;
  sc.quadrature.inner_rel_tol = std::min(1e-8, tolerance * 1e-2);
  sc.z_integral.rel_tol = std::min(1e-8, tolerance * 1e-2);
  return sc;
}

std::vector<std::string> RunConfig::describe() const {
  const double deg = 180.0 / kPi;
  std::vector<std::string> out;
  auto add = [&](const std::string& k, const std::string& v) { out.push_back(k + " = " + v); };
  if (!source.empty()) add("config", source.string());
  add("crystal", crystal_path.string() + " (" + crystal.name + ")");
  add("crystal.length", fmt_double(crystal.length) + " um");
  add("crystal.cut_angle", auto_cut_angle ? "auto" : fmt_double(crystal.cut_angle * deg) + " deg");
  add("crystal.poling_period", crystal.poling_period ? fmt_double(*crystal.poling_period) + " um" : "none");
  add("window", fmt_double(omega_to_wavelength(crystal.window.omega_max)) + " um .. " +
                    fmt_double(omega_to_wavelength(crystal.window.omega_min)) + " um (omega " +
                    fmt_double(crystal.window.omega_min) + " .. " + fmt_double(crystal.window.omega_max) + " rad/fs)");
  add("pump_wavelength", fmt_double(pump_wavelength_um) + " um");
  add("pump_duration", fmt_double(tau) + " fs");
  add("waist", fmt_double(waist) + " um");
  add("ratio", fmt_double(ratio));
  add("alpha", fmt_double(alpha * deg) + " deg");
  add("phi", fmt_double(phi * deg) + " deg");
  add("pm_type", pm.code());
  add("exact_sine", exact_sine ? "true" : "false");
  add("model", model_tag_name(model));
  if (filter_center_um && filter_width_um)
    add("filter", fmt_double(*filter_center_um) + " um center, " + fmt_double(*filter_width_um) + " um width");
  add("tolerance", fmt_double(tolerance));
  add("workers", std::to_string(workers));
  return out;
}

}  // namespace spdc
