#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "spdc/config.hpp"

namespace spdc {

enum class OutputFormat { Csv, Json };
OutputFormat parse_output_format(const std::string& name);

using Cell = std::variant<double, long long, std::string>;

/// Tabular command output. `provenance` lines become `#` comments in CSV and
/// a "provenance" array in JSON.
struct Table {
  std::vector<std::string> provenance;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// CSV: `#` comment lines, one header row, comma separated; doubles are
/// printed with 17 significant digits so reruns compare byte for byte.
void write_csv(const Table& table, std::ostream& out);
void write_json(const Table& table, std::ostream& out);
void write_table(const Table& table, OutputFormat format, std::ostream& out);

struct CommandResult {
  Table table;
  std::vector<std::string> messages;  // human-readable summary, stderr
  int failures = 0;                   // failed cells / points
};

struct ValidationReport {
  std::vector<std::string> lines;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

ValidationReport cmd_validate(const std::filesystem::path& config_path);
/// Report for an already-parsed config (schema errors cannot occur here).
ValidationReport validate_config(const RunConfig& cfg);

CommandResult cmd_jsa(const RunConfig& cfg);
CommandResult cmd_brightness(const RunConfig& cfg);
/// Sweep described by the config's computation.sweep block.
CommandResult cmd_sweep(const RunConfig& cfg);
/// Figure preset; `cfg` supplies the crystal, tolerance and workers.
CommandResult cmd_sweep_figure(int figure, const RunConfig& cfg);

/// Columns of every sweep table, in order.
const std::vector<std::string>& sweep_columns();

}  // namespace spdc
