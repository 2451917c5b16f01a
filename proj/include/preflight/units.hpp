#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "preflight/errors.hpp"

namespace preflight {

namespace constants {
inline constexpr double kEarthRadiusKm = 6378.137;
inline constexpr double kEarthMuKm3s2 = 398600.4418;
inline constexpr double kStefanBoltzmann = 5.670374e-8;  // W/(m^2 K^4)
inline constexpr double kStandardGravity = 9.80665;      // m/s^2
inline constexpr double kZeroCelsius = 273.15;
}  // namespace constants

inline constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }
inline constexpr double celsius_to_kelvin(double c) { return c + constants::kZeroCelsius; }
inline constexpr double kelvin_to_celsius(double k) { return k - constants::kZeroCelsius; }

/// Physical dimension of a configuration quantity.
enum class Dimension {
  kLength,       // m
  kArea,         // m^2
  kMass,         // kg
  kTemperature,  // K
  kPressure,     // Pa
  kPower,        // W
  kDensity,      // kg/m^3
  kFrequency,    // Hz
  kDimensionless,
};

namespace detail {

struct UnitScale {
  std::string_view symbol;
  double scale;
  double offset = 0.0;
};

inline const UnitScale* find_unit(Dimension dim, std::string_view symbol) {
  static constexpr UnitScale kLength[] = {{"m", 1.0}, {"mm", 1e-3}, {"cm", 1e-2}, {"km", 1e3}};
  static constexpr UnitScale kArea[] = {{"m2", 1.0}, {"mm2", 1e-6}, {"cm2", 1e-4}};
  static constexpr UnitScale kMass[] = {{"kg", 1.0}, {"g", 1e-3}};
  static constexpr UnitScale kTemp[] = {{"K", 1.0}, {"C", 1.0, constants::kZeroCelsius}};
  static constexpr UnitScale kPressure[] = {{"Pa", 1.0}, {"kPa", 1e3}, {"MPa", 1e6}, {"GPa", 1e9}};
  static constexpr UnitScale kPower[] = {{"W", 1.0}, {"mW", 1e-3}};
  static constexpr UnitScale kDensity[] = {{"kg/m3", 1.0}, {"g/cm3", 1e3}};
  static constexpr UnitScale kFreq[] = {{"Hz", 1.0}, {"kHz", 1e3}};
  auto scan = [&](const auto& table) -> const UnitScale* {
    for (const auto& u : table) {
      if (u.symbol == symbol) return &u;
    }
    return nullptr;
  };
  switch (dim) {
    case Dimension::kLength: return scan(kLength);
    case Dimension::kArea: return scan(kArea);
    case Dimension::kMass: return scan(kMass);
    case Dimension::kTemperature: return scan(kTemp);
    case Dimension::kPressure: return scan(kPressure);
    case Dimension::kPower: return scan(kPower);
    case Dimension::kDensity: return scan(kDensity);
    case Dimension::kFrequency: return scan(kFreq);
    case Dimension::kDimensionless: return nullptr;
  }
  return nullptr;
}

}  // namespace detail

/// Parses "<number> <unit>" into SI, e.g. "261 mm" -> 0.261, "-40 C" -> 233.15.
/// A bare number is taken to be SI already.
inline double parse_quantity(std::string_view text, Dimension dim) {
  std::string s(text);
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw SchemaError("expected a quantity, got '" + s + "'");
  }
  while (pos < s.size() && s[pos] == ' ') ++pos;
  std::string_view unit = std::string_view(s).substr(pos);
  if (unit.empty()) return value;
  const auto* u = detail::find_unit(dim, unit);
  if (u == nullptr) throw SchemaError("unit '" + std::string(unit) + "' not valid in '" + s + "'");
  return value * u->scale + u->offset;
}

}  // namespace preflight
