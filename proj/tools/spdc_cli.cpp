#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "spdc/commands.hpp"

namespace {

int emit(const spdc::CommandResult& res, const std::string& out_path, spdc::OutputFormat format) {
  if (out_path.empty() || out_path == "-") {
    spdc::write_table(res.table, format, std::cout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << out_path << '\n';
      return 2;
    }
    spdc::write_table(res.table, format, out);
    std::cerr << "wrote " << out_path << '\n';
  }
  for (const auto& m : res.messages) std::cerr << m << '\n';
  return res.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SPDC biphoton wavefunction, brightness and focusing optimizer"};
  app.require_subcommand(1);

  std::string config_path, out_path, format_name = "csv";
  std::optional<int> workers, figure;
  std::optional<double> tolerance;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Output file (stdout when omitted)");
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tolerance", tolerance, "Relative quadrature tolerance")->check(CLI::Range(1e-14, 0.5));
    sub->add_option("--format", format_name, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* validate = app.add_subcommand("validate", "Schema and physics sanity report");
  validate->add_option("--config", config_path, "Run configuration (YAML)")->required();

  auto* jsa = app.add_subcommand("jsa", "Joint spectral amplitude grid or transverse integrand map");
  jsa->add_option("--config", config_path, "Run configuration (YAML)")->required();
  add_common(jsa);

  auto* sweep = app.add_subcommand("sweep", "Optimal-ratio sweep from a config or a figure preset");
  sweep->add_option("--config", config_path, "Run configuration (YAML)");
  sweep->add_option("--figure", figure, "Figure preset (3, 5, 6, 7, 8 or 9)");
  add_common(sweep);

  auto* bright = app.add_subcommand("brightness", "Total brightness at the configured point");
  bright->add_option("--config", config_path, "Run configuration (YAML)")->required();
  add_common(bright);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      const auto rep = spdc::cmd_validate(config_path);
      for (const auto& l : rep.lines) std::cout << l << '\n';
      for (const auto& w : rep.warnings) std::cout << "warning: " << w << '\n';
      for (const auto& e : rep.errors) std::cout << "error: " << e << '\n';
      std::cout << (rep.ok() ? "valid" : "invalid") << '\n';
      return rep.ok() ? 0 : 1;
    }

    spdc::RunConfig cfg = config_path.empty() ? spdc::default_run_config() : spdc::load_run_config(config_path);
    if (workers) cfg.workers = *workers;
    if (tolerance) cfg.tolerance = *tolerance;
    const auto format = spdc::parse_output_format(format_name);
    if (out_path.empty() && !cfg.output.empty()) out_path = cfg.output;

    if (jsa->parsed()) return emit(spdc::cmd_jsa(cfg), out_path, format);
    if (bright->parsed()) return emit(spdc::cmd_brightness(cfg), out_path, format);
    if (sweep->parsed()) {
      if (figure) return emit(spdc::cmd_sweep_figure(*figure, cfg), out_path, format);
      if (config_path.empty()) {
        std::cerr << "error: sweep needs --config or --figure\n";
        return 2;
      }
      return emit(spdc::cmd_sweep(cfg), out_path, format);
    }
  } catch (const spdc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
