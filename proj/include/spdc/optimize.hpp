#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spdc/brightness.hpp"
#include "spdc/geometry.hpp"
#include "spdc/thinlimit.hpp"
#include "spdc/wavefunction.hpp"

namespace spdc {

enum class ModelTag { ThinPerfectPM, ThinSinc, FullFactorized, WalkoffClosedForm };

std::string model_tag_name(ModelTag tag);
ModelTag parse_model_tag(const std::string& name);

/// Everything fixed across an (alpha, w, L, r) scan of a degenerate
/// symmetric source.
struct Scenario {
  CrystalModel crystal;
  double pump_wavelength_um = 0.405;
  double tau = 100.0;
  PhaseMatchingType pm;
  double phi = 0.0;
  std::optional<double> filter_half_width;  // rad/fs around omega0 / 2
  bool solve_cut_angle = true;              // re-solve theta for every alpha
  bool exact_sine = false;
  BrightnessOptions quadrature;
  ZIntegralOptions z_integral;
};

struct Evaluation {
  double value = 0.0;
  double abs_error = 0.0;
};

/// Brightness as a function of r at fixed (alpha, w, L). For the thin-sinc
/// and full models the cut angle is solved once for alpha.
struct RatioObjective {
  std::function<Evaluation(double)> evaluate;
  /// Same brightness after one refinement doubling of every quadrature.
  std::function<Evaluation(double)> evaluate_refined;
  double r_min = 0.2;  // raised when the pump waist would cross the paraxial floor
  double theta = 0.0;
};

RatioObjective make_ratio_objective(ModelTag tag, const Scenario& base, double alpha, double w, double L);

/// Degenerate setup at ratio r used by the wavefunction-based models.
SourceSetup scenario_setup(const Scenario& base, double alpha, double w, double L, double r);

/// AmplitudeModel for the thin-sinc and full models, with the symmetry and
/// v-truncation hints filled in.
AmplitudeModel amplitude_model(ModelTag tag, const SourceSetup& setup, const ZIntegralOptions& z = {});

FrequencyDomain scenario_domain(const Scenario& base);
ThinConfig scenario_thin_config(const Scenario& base, double alpha, double w, double L);

struct MaximizeOptions {
  double lo = 0.2;
  double hi = 2.0;
  int coarse_points = 25;
  double x_tol = 1e-4;
  int workers = 1;
};

struct ScalarOptimum {
  double x = 0.0;
  double f = 0.0;
  int evaluations = 0;
  bool degenerate = false;  // objective flat across the bracket
  bool at_edge = false;     // coarse maximum on a bracket end
};

/// Coarse scan followed by golden-section refinement of the bracketing
/// triple. The objective is assumed unimodal on that triple.
ScalarOptimum maximize_scalar(const std::function<double(double)>& f, const MaximizeOptions& opts = {});

struct RatioOptimum {
  double r_star = 0.0;
  double R_star = 0.0;
  double R_abs_error = 0.0;
  int evaluations = 0;
  bool degenerate = false;
  bool at_edge = false;
  double theta = 0.0;
};

RatioOptimum optimal_ratio(ModelTag tag, const Scenario& base, double alpha, double w, double L,
                           const MaximizeOptions& opts = {});

struct WaistSample {
  double w = 0.0;
  RatioOptimum optimum;
};

struct WaistOptimum {
  double w_star = 0.0;
  double r_star = 0.0;
  double R_star = 0.0;
  bool at_edge = false;
  bool near_floor = false;  // w_star below 20 signal wavelengths
  std::vector<WaistSample> samples;
};

/// For each w the ratio is optimized first; the best w is then refined by
/// golden section in log w.
WaistOptimum optimal_waist(ModelTag tag, const Scenario& base, double alpha, double L, double w_lo, double w_hi,
                           int coarse_points = 9, double rel_tol = 0.01, const MaximizeOptions& ratio_opts = {});

struct SweepRow {
  int figure = 0;
  ModelTag model = ModelTag::ThinPerfectPM;
  double alpha = 0.0;  // rad
  double w = 0.0;      // um
  double L = 0.0;      // um
  double r_star = 0.0;
  double R_star = 0.0;
  double R_norm = 0.0;  // R_star over the maximum of its curve
  double R_abs_error = 0.0;
  int evaluations = 0;
  std::string status = "ok";
};

struct FigurePreset {
  int figure = 0;
  std::string axis;  // "alpha" or "w"
  std::vector<ModelTag> models;
  std::vector<double> lengths;
  std::vector<double> waists;
  std::vector<double> alphas;
  double tau = 100.0;
  double pump_wavelength_um = 0.405;
};

struct FigureOverrides {
  std::optional<std::vector<double>> lengths;
  std::optional<std::vector<double>> waists;
  std::optional<std::vector<double>> alphas;
  std::optional<double> tau;
  std::optional<BrightnessOptions> quadrature;
};

/// Presets for figures 3, 5, 6, 7, 8 and 9. std::invalid_argument for any
/// other id.
FigurePreset figure_preset(int figure);
std::vector<int> figure_ids();

/// Rows for every (model, L, w, alpha) point of the preset. Failures are
/// recorded in the row status; the sweep continues.
std::vector<SweepRow> figure_sweep(int figure, const Scenario& base, const FigureOverrides& overrides = {},
                                   int workers = 1);

/// Fills R_norm: each row divided by the largest R_star among rows that
/// share (model, L) and, when the axis is alpha, w.
void normalize_rows(std::vector<SweepRow>& rows, const std::string& axis);

}  // namespace spdc
