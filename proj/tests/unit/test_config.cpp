#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "fixtures.hpp"
#include "spdc/commands.hpp"
#include "spdc/config.hpp"
#include "spdc/thinlimit.hpp"
#include "spdc/units.hpp"

using namespace spdc;
using fixtures::deg;

namespace {

const std::filesystem::path kData = std::filesystem::path(SPDC_SOURCE_DIR) / "data";
const std::filesystem::path kConfigs = std::filesystem::path(SPDC_SOURCE_DIR) / "configs";

std::string minimal(const std::string& extra_setup = "", const std::string& computation = "") {
  std::string y = "crystal: bbo.yaml\nsetup:\n  pump_wavelength: 405 nm\n  pump_duration: 100 fs\n  waist: 30 um\n"
                  "  ratio: 0.7\n  length: 100 um\n  pm_type: eoo\n" +
                  extra_setup;
  if (!computation.empty()) y += "computation:\n" + computation;
  return y;
}

std::vector<std::string> problems_of(const std::string& yaml) {
  try {
    parse_run_config(yaml, kData);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  return std::any_of(problems.begin(), problems.end(),
                     [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("quantities with units") {
  CHECK(units::parse_length_um("405 nm") == doctest::Approx(0.405));
  CHECK(units::parse_length_um("1.5mm") == doctest::Approx(1500.0));
  CHECK(units::parse_length_um("3 um") == doctest::Approx(3.0));
  CHECK(units::parse_time_fs("1 ps") == doctest::Approx(1000.0));
  CHECK(units::parse_angle_rad("2.8 deg") == doctest::Approx(deg(2.8)));
  CHECK(units::parse_angle_rad("0.1 rad") == doctest::Approx(0.1));
  CHECK_THROWS_AS(units::parse_length_um("405"), std::invalid_argument);
  CHECK_THROWS_AS(units::parse_length_um("405 fs"), std::invalid_argument);
  CHECK_THROWS_AS(units::parse_time_fs("ten fs"), std::invalid_argument);
  CHECK_THROWS_AS(units::parse_angle_rad("3 furlongs"), std::invalid_argument);
}

TEST_CASE("minimal config parses") {
  const auto cfg = parse_run_config(minimal(), kData);
  CHECK(cfg.crystal.length == doctest::Approx(100.0));
  CHECK(cfg.waist == doctest::Approx(30.0));
  CHECK(cfg.ratio == doctest::Approx(0.7));
  CHECK(cfg.auto_cut_angle);
  CHECK(cfg.model == ModelTag::FullFactorized);
  const auto s = cfg.setup();
  CHECK(s.crystal.cut_angle == doctest::Approx(0.50039294479387962).epsilon(1e-9));
  CHECK(s.pump.waist.x == doctest::Approx(21.0));
}

TEST_CASE("pump waist may be given instead of the ratio") {
  const auto yaml = std::string("crystal: bbo.yaml\nsetup:\n  pump_wavelength: 405 nm\n  pump_duration: 100 fs\n"
                                "  waist: 30 um\n  pump_waist: 15 um\n  pm_type: eoo\n");
  CHECK(parse_run_config(yaml, kData).ratio == doctest::Approx(0.5));
  CHECK(mentions(problems_of(minimal("  pump_waist: 15 um\n")), "either 'ratio' or 'pump_waist'"));
}

TEST_CASE("missing crystal file names the path") {
  auto yaml = minimal();
  yaml.replace(yaml.find("bbo.yaml"), 8, "nowhere.yaml");
  const auto p = problems_of(yaml);
  REQUIRE_FALSE(p.empty());
  CHECK(mentions(p, "nowhere.yaml"));
}

TEST_CASE("all problems are listed at once") {
  const std::string yaml = "crystal: bbo.yaml\nsetup:\n  pump_wavelength: 405\n  pump_duration: 100 fs\n"
                           "  waist: 30 um\n  ratio: 0.7\n  pm_type: xyz\n  colour: blue\n"
                           "computation:\n  model: best\n  tolerance: 2\n  workers: 0\n";
  const auto p = problems_of(yaml);
  CHECK(p.size() >= 6);
  CHECK(mentions(p, "setup.pump_wavelength"));
  CHECK(mentions(p, "setup.pm_type"));
  CHECK(mentions(p, "unknown key 'colour'"));
  CHECK(mentions(p, "computation.model"));
  CHECK(mentions(p, "computation.tolerance"));
  CHECK(mentions(p, "computation.workers"));
  try {
    parse_run_config(yaml, kData);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("configuration problems") != std::string::npos);
  }
}

TEST_CASE("dimensioned fields require units") {
  CHECK(mentions(problems_of(minimal("  alpha: 2.8\n")), "setup.alpha"));
  CHECK(problems_of(minimal("  alpha: 2.8 deg\n")).empty());
  auto bare = minimal();
  bare.replace(bare.find("30 um"), 5, "30");
  CHECK(mentions(problems_of(bare), "setup.waist"));
}

TEST_CASE("missing required fields") {
  const auto p = problems_of("crystal: bbo.yaml\nsetup:\n  pm_type: eoo\n");
  CHECK(mentions(p, "setup.pump_wavelength: missing"));
  CHECK(mentions(p, "setup.pump_duration: missing"));
  CHECK(mentions(p, "setup.waist: missing"));
  CHECK(mentions(problems_of("setup:\n  pm_type: eoo\n"), "config.crystal: missing"));
}

TEST_CASE("filter and sweep blocks") {
  const auto ok = parse_run_config(
      minimal("", "  filter:\n    center: 810 nm\n    width: 3 nm\n  sweep:\n    axis: alpha\n"
                  "    range:\n      from: 0 deg\n      to: 2 deg\n      points: 5\n"),
      kData);
  REQUIRE(ok.sweep);
  CHECK(ok.sweep->values.size() == 5);
  CHECK(ok.sweep->values.back() == doctest::Approx(deg(2.0)));
  CHECK(ok.filter_width_um.value() == doctest::Approx(0.003));
  CHECK(ok.scenario().filter_half_width.value() == doctest::Approx(filter_half_width(0.81, 0.003)));

  CHECK(mentions(problems_of(minimal("", "  filter:\n    center: 800 nm\n    width: 3 nm\n")), "filter.center"));
  CHECK(mentions(problems_of(minimal("", "  sweep:\n    axis: beta\n    values: [1, 2]\n")), "axis"));
  CHECK(mentions(problems_of(minimal("", "  sweep:\n    axis: w\n")), "either 'values' or 'range'"));
  CHECK(mentions(problems_of(minimal("", "  sweep:\n    axis: w\n    values: [30 um]\n    optimize_ratio: maybe\n")),
                 "optimize_ratio"));
  const auto rs = parse_run_config(minimal("", "  sweep:\n    axis: r\n    values: [0.5, 0.7]\n"), kData);
  CHECK(rs.sweep->axis == SweepAxis::Ratio);
}

TEST_CASE("waists below the paraxial floor are rejected") {
  auto yaml = minimal();
  yaml.replace(yaml.find("30 um"), 5, "1.62 um");  // 2 signal wavelengths
  const auto rep = validate_config(parse_run_config(yaml, kData));
  CHECK_FALSE(rep.ok());
  CHECK(mentions(rep.errors, "paraxial floor"));
}

TEST_CASE("validation echoes the expansion parameters of the sample config") {
  const auto rep = cmd_validate(kConfigs / "collinear_100um.yaml");
  REQUIRE(rep.ok());
  CHECK(mentions(rep.lines, "integration window used: 0.2 um to 2.2 um"));
  const auto cfg = load_run_config(kConfigs / "collinear_100um.yaml");
  const auto b = paraxial_params(cfg.setup(), cfg.setup().idler.omega, cfg.setup().signal.omega);
  CHECK(b.axes[1].xi == doctest::Approx(0.0745).epsilon(1e-3));
  CHECK(b.axes[1].A == doctest::Approx(0.1118).epsilon(1e-3));
  // A_y for equal collection waists against the walk-off closed form.
  const double beta = walkoff_slope(cfg.setup().pump.omega0, cfg.setup().crystal);
  const double L = 100.0, w = 10.0, r = cfg.ratio;
  CHECK(b.axes[1].A == doctest::Approx(L * L * beta * beta / (2 * w * w * (1 + 2 * r * r))).epsilon(1e-8));
  CHECK(mentions(rep.warnings, "exceed 0.1"));
  CHECK(mentions(rep.lines, "axis y: xi = 0.07445"));
}

TEST_CASE("config files on disk") {
  const auto tmp = std::filesystem::temp_directory_path() / "spdc_config_test";
  std::filesystem::create_directories(tmp);
  std::filesystem::copy_file(kData / "bbo.yaml", tmp / "crystal.yaml", std::filesystem::copy_options::overwrite_existing);
  {
    std::ofstream f(tmp / "run.yaml");
    auto y = minimal();
    y.replace(y.find("bbo.yaml"), 8, "crystal.yaml");
    f << y;
  }
  const auto cfg = load_run_config(tmp / "run.yaml");
  CHECK(cfg.crystal_path == (tmp / "crystal.yaml").lexically_normal());
  CHECK_THROWS_AS(load_run_config(tmp / "absent.yaml"), ConfigError);
  std::filesystem::remove_all(tmp);
}

TEST_CASE("bundled crystal") {
  const auto c = bundled_bbo();
  CHECK(c.window.omega_min == doctest::Approx(0.856205257868).epsilon(1e-10));
  CHECK(std::filesystem::exists(bundled_bbo_path()));
  const auto d = default_run_config();
  CHECK(d.crystal.name == c.name);
}
