#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spdc/brightness.hpp"
#include "spdc/dispersion.hpp"
#include "spdc/geometry.hpp"
#include "spdc/optimize.hpp"
#include "spdc/wavefunction.hpp"

namespace spdc {

/// Lists every schema violation found in one pass.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Reads a crystal definition (see data/bbo.yaml for the field names).
/// Throws ConfigError naming the path when the file is missing.
/// `auto_cut`, when given, reports whether the file asks for a solved cut
/// angle ("cut_angle: auto").
CrystalModel load_crystal_file(const std::filesystem::path& path, bool* auto_cut = nullptr);

/// The BBO definition shipped in the data directory.
CrystalModel bundled_bbo();
std::filesystem::path bundled_bbo_path();

enum class JsaMode { Spectral, TransverseMap };

struct JsaSpec {
  JsaMode mode = JsaMode::Spectral;
  int points = 41;
  // Spectral mode: wavelength ranges of each photon.
  double idler_lo_um = 0.0, idler_hi_um = 0.0;
  double signal_lo_um = 0.0, signal_hi_um = 0.0;
  // Transverse map mode: one frequency pair and the half-width in mode widths.
  double map_idler_um = 0.0, map_signal_um = 0.0;
  double map_widths = 4.0;
};

enum class SweepAxis { Alpha, Waist, Ratio, Length };

struct SweepSpec {
  SweepAxis axis = SweepAxis::Alpha;
  std::vector<double> values;  // internal units
  bool optimize_ratio = true;  // ignored for the ratio axis
};

struct RunConfig {
  std::filesystem::path source;  // config file, empty for presets
  std::filesystem::path crystal_path;
  CrystalModel crystal;
  bool auto_cut_angle = true;

  double pump_wavelength_um = 0.405;
  double tau = 100.0;
  double waist = 30.0;      // w_i = w_s
  double ratio = 0.7071067811865476;  // w_p / w
  double alpha = 0.0;
  double phi = 0.0;
  bool exact_sine = false;
  PhaseMatchingType pm;

  ModelTag model = ModelTag::FullFactorized;
  std::optional<double> filter_center_um;
  std::optional<double> filter_width_um;
  std::optional<SweepSpec> sweep;
  std::optional<JsaSpec> jsa;
  std::string output;
  double tolerance = 1e-6;
  int workers = 1;

  /// Pump setup at the configured (w, r, alpha); the cut angle is solved
  /// when `auto_cut_angle`.
  SourceSetup setup() const;
  Scenario scenario() const;
  /// Resolved values, one "key = value unit" line each, for output headers.
  std::vector<std::string> describe() const;
};

/// Parses and schema-validates a YAML run configuration. The crystal path
/// is resolved relative to the config file. ConfigError lists all problems.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& yaml_text, const std::filesystem::path& base_dir);

/// Default run configuration with the bundled BBO data.
RunConfig default_run_config();

}  // namespace spdc
