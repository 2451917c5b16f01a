#pragma once

// Small hand-built models for the thermal oracles, plus the path of the
// shipped reference configuration.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

#include "preflight/preflight.hpp"

namespace preflight::testing {

inline std::string reference_model_path() { return std::string(PREFLIGHT_SOURCE_DIR) + "/config/hokushin1.json"; }

inline const SatelliteModel& reference_model() {
  static const SatelliteModel model = load_model(reference_model_path());
  return model;
}

// Single gray finish so alpha = epsilon = value everywhere.
inline SatelliteModel gray_model(double value) {
  SatelliteModel m;
  m.name = "gray";
  m.finishes["gray"] = {"gray", value, value};
  return m;
}

inline void add_node(SatelliteModel& m, const std::string& name, double heat_capacity) {
  ThermalNodeSpec n;
  n.name = name;
  n.mass = 1.0;
  n.specific_heat = heat_capacity;
  m.nodes.push_back(n);
}

inline void add_patch(SatelliteModel& m, const std::string& node, const std::string& name, double area,
                      const Eigen::Vector3d& normal) {
  SurfacePatch p;
  p.name = name;
  p.node = node;
  p.area = area;
  p.normal = normal.normalized();
  p.finish_fractions = {{"gray", 1.0}};
  m.patches.push_back(p);
  for (auto& n : m.nodes) {
    if (n.name == node) n.patches.push_back(name);
  }
}

/// Faceted sphere: `facets` equal-area patches on a Fibonacci lattice.
inline SatelliteModel gray_sphere(double value, double radius, int facets, double heat_capacity) {
  SatelliteModel m = gray_model(value);
  add_node(m, "SPHERE", heat_capacity);
  const double area = 4.0 * std::numbers::pi * radius * radius / facets;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < facets; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / facets;
    const double r = std::sqrt(1.0 - z * z);
    const double phi = golden * i;
    add_patch(m, "SPHERE", "f" + std::to_string(i), area, {r * std::cos(phi), r * std::sin(phi), z});
  }
  return m;
}

/// Thin plate with two opposite faces along +-X.
inline SatelliteModel gray_plate(double value, double area, double heat_capacity) {
  SatelliteModel m = gray_model(value);
  add_node(m, "PLATE", heat_capacity);
  add_patch(m, "PLATE", "front", area, Eigen::Vector3d::UnitX());
  add_patch(m, "PLATE", "back", area, -Eigen::Vector3d::UnitX());
  return m;
}

/// Sun-only environment on a beta = 90 deg orbit (never eclipsed).
inline ThermalScenario sun_only(double solar_flux, AttitudeMode mode) {
  ThermalScenario sc;
  sc.name = "sun-only";
  sc.env = {"sun-only", solar_flux, 0.0, 0.0, 0.998, 90.0};
  sc.orbit.altitude_km = 400.0;
  sc.orbit.inclination_deg = 51.6;
  sc.orbit.sun_direction = sun_for_beta(sc.orbit, 90.0);
  sc.mode = std::move(mode);
  sc.lock_spin_to_orbit = false;
  return sc;
}

}  // namespace preflight::testing
