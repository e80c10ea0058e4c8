#pragma once

#include <string>
#include <string_view>

namespace spdc::units {

enum class Dimension { Length, Time, Angle, Dimensionless };

struct Quantity {
  double value = 0.0;  // in internal units (um, fs, rad)
  Dimension dimension = Dimension::Dimensionless;
};

/// Parses "405 nm", "100fs", "2.8 deg", "0.5" ... into internal units.
/// Throws std::invalid_argument on malformed text or unknown unit.
Quantity parse_quantity(std::string_view text);

/// Parses and checks the dimension; a bare number is rejected when a
/// dimension is required.
double parse_length_um(std::string_view text);
double parse_time_fs(std::string_view text);
double parse_angle_rad(std::string_view text);

std::string dimension_name(Dimension d);

}  // namespace spdc::units
