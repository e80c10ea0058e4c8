#include "spdc/units.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <stdexcept>
#include <utility>

#include "spdc/constants.hpp"

namespace spdc::units {
namespace {

struct UnitEntry {
  std::string_view symbol;
  double scale;
  Dimension dimension;
};

constexpr std::array<UnitEntry, 15> kUnits = {{
    {"nm", 1e-3, Dimension::Length},
    {"um", 1.0, Dimension::Length},
    {"µm", 1.0, Dimension::Length},
    {"micron", 1.0, Dimension::Length},
    {"mm", 1e3, Dimension::Length},
    {"cm", 1e4, Dimension::Length},
    {"m", 1e6, Dimension::Length},
    {"as", 1e-3, Dimension::Time},
    {"fs", 1.0, Dimension::Time},
    {"ps", 1e3, Dimension::Time},
    {"ns", 1e6, Dimension::Time},
    {"rad", 1.0, Dimension::Angle},
    {"mrad", 1e-3, Dimension::Angle},
    {"deg", kPi / 180.0, Dimension::Angle},
    {"°", kPi / 180.0, Dimension::Angle},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double require(std::string_view text, Dimension expected) {
  const auto q = parse_quantity(text);
  if (q.dimension != expected)
    throw std::invalid_argument("expected a " + dimension_name(expected) + " with explicit unit, got '" +
                                std::string(text) + "'");
  return q.value;
}

}  // namespace

std::string dimension_name(Dimension d) {
  switch (d) {
    case Dimension::Length: return "length";
    case Dimension::Time: return "time";
    case Dimension::Angle: return "angle";
    case Dimension::Dimensionless: return "dimensionless number";
  }
  return "?";
}

Quantity parse_quantity(std::string_view text) {
  const auto s = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr == s.data())
    throw std::invalid_argument("cannot parse quantity '" + std::string(text) + "'");
  const auto unit = trim(std::string_view(ptr, static_cast<std::size_t>(s.data() + s.size() - ptr)));
  if (unit.empty()) return {value, Dimension::Dimensionless};
  for (const auto& entry : kUnits)
    if (entry.symbol == unit) return {value * entry.scale, entry.dimension};
  throw std::invalid_argument("unknown unit '" + std::string(unit) + "' in '" + std::string(text) + "'");
}

double parse_length_um(std::string_view text) { return require(text, Dimension::Length); }
double parse_time_fs(std::string_view text) { return require(text, Dimension::Time); }
double parse_angle_rad(std::string_view text) { return require(text, Dimension::Angle); }

}  // namespace spdc::units
