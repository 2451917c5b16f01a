#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

#include "preflight/errors.hpp"
#include "preflight/model.hpp"
#include "preflight/units.hpp"

namespace preflight {

struct OrbitState {
  double time = 0.0;                   // s since the run epoch
  Eigen::Vector3d position;            // unit vector from Earth centre to the satellite
  Eigen::Vector3d sun_direction;       // unit vector towards the Sun
  bool in_eclipse = false;
};

/// Circular-orbit period [s] for an altitude in km.
inline double orbital_period(double altitude_km) {
  const double a = constants::kEarthRadiusKm + altitude_km;
  if (!(a > 0.0)) throw DomainError("non-physical altitude " + std::to_string(altitude_km) + " km");
  return 2.0 * std::numbers::pi * std::sqrt(a * a * a / constants::kEarthMuKm3s2);
}

/// Earth view factor (R/(R+h))^2 used for IR and albedo.
inline double earth_view_factor(double altitude_km) {
  if (altitude_km < 0.0) throw DomainError("altitude must be non-negative");
  const double ratio = constants::kEarthRadiusKm / (constants::kEarthRadiusKm + altitude_km);
  return ratio * ratio;
}

inline Eigen::Vector3d orbit_normal(const OrbitSpec& orbit) {
  const double i = deg2rad(orbit.inclination_deg);
  const double raan = deg2rad(orbit.raan_deg);
  return {std::sin(i) * std::sin(raan), -std::sin(i) * std::cos(raan), std::cos(i)};
}

inline Eigen::Vector3d ascending_node(const OrbitSpec& orbit) {
  const double raan = deg2rad(orbit.raan_deg);
  return {std::cos(raan), std::sin(raan), 0.0};
}

/// Sun elevation above the orbital plane [deg], in [-90, 90].
inline double beta_angle(const OrbitSpec& orbit) {
  const double s = std::clamp(orbit.sun_direction.normalized().dot(orbit_normal(orbit)), -1.0, 1.0);
  return rad2deg(std::asin(s));
}

/// Sun direction with the requested beta angle; `azimuth_deg` places its in-plane
/// projection relative to the ascending node.
inline Eigen::Vector3d sun_for_beta(const OrbitSpec& orbit, double beta_deg, double azimuth_deg = 0.0) {
  const Eigen::Vector3d n = orbit_normal(orbit);
  const Eigen::Vector3d e1 = ascending_node(orbit);
  const Eigen::Vector3d e2 = n.cross(e1);
  const double b = deg2rad(beta_deg);
  const double az = deg2rad(azimuth_deg);
  return (std::cos(b) * (std::cos(az) * e1 + std::sin(az) * e2) + std::sin(b) * n).normalized();
}

/// Cylindrical umbra test: anti-sunward and within one Earth radius of the shadow axis.
inline bool eclipse_state(const Eigen::Vector3d& position, const Eigen::Vector3d& sun_direction, double altitude_km) {
  const double along = position.dot(sun_direction);
  if (along >= 0.0) return false;
  const double r = constants::kEarthRadiusKm + altitude_km;
  const double perpendicular = (position - along * sun_direction).norm() * r;
  return perpendicular < constants::kEarthRadiusKm;
}

/// Half-angle of the shadow arc for a circular orbit at beta = 0.
inline double shadow_half_angle(double altitude_km) {
  return std::asin(constants::kEarthRadiusKm / (constants::kEarthRadiusKm + altitude_km));
}

/// Position on the circular orbit `arg_latitude` radians past the ascending node.
inline Eigen::Vector3d orbit_position(const OrbitSpec& orbit, double arg_latitude) {
  const Eigen::Vector3d e1 = ascending_node(orbit);
  const Eigen::Vector3d e2 = orbit_normal(orbit).cross(e1);
  return std::cos(arg_latitude) * e1 + std::sin(arg_latitude) * e2;
}

/// Propagates the circular orbit. The epoch is the point closest to the Sun
/// (noon), so eclipse sits symmetrically around half a period.
class CircularOrbit {
 public:
  explicit CircularOrbit(OrbitSpec spec, EclipseModel eclipse = EclipseModel::kGeometric)
      : spec_(std::move(spec)), eclipse_(eclipse), period_(orbital_period(spec_.altitude_km)) {
    spec_.sun_direction.normalize();
    const Eigen::Vector3d e1 = ascending_node(spec_);
    const Eigen::Vector3d e2 = orbit_normal(spec_).cross(e1);
    const Eigen::Vector2d proj(spec_.sun_direction.dot(e1), spec_.sun_direction.dot(e2));
    epoch_angle_ = proj.norm() > 1e-12 ? std::atan2(proj.y(), proj.x()) : 0.0;
  }

  const OrbitSpec& spec() const { return spec_; }
  double period() const { return period_; }
  EclipseModel eclipse_model() const { return eclipse_; }

  OrbitState state(double t) const {
    OrbitState s;
    s.time = t;
    const double phase = 2.0 * std::numbers::pi * t / period_;
    s.position = orbit_position(spec_, epoch_angle_ + phase);
    s.sun_direction = spec_.sun_direction;
    if (eclipse_ == EclipseModel::kGeometric) {
      s.in_eclipse = eclipse_state(s.position, s.sun_direction, spec_.altitude_km);
    } else {
      // 60 min sun / 30 min eclipse split, centred on midnight.
      const double frac = std::fmod(t / period_, 1.0);
      const double f = frac < 0.0 ? frac + 1.0 : frac;
      s.in_eclipse = std::abs(f - 0.5) < (1.0 / 3.0) / 2.0;
    }
    return s;
  }

 private:
  OrbitSpec spec_;
  EclipseModel eclipse_;
  double period_;
  double epoch_angle_ = 0.0;
};

/// Built-in environment cases; config-defined cases take precedence.
inline EnvCase env_case(const std::string& name) {
  // hot: continuous sun (beta beyond the eclipse limit); cold: beta = 0.
  if (name == "hot") return {"hot", 1414.0, 258.0, 0.35, 0.998, 75.0};
  if (name == "cold") return {"cold", 1318.0, 216.0, 0.25, 0.998, 0.0};
  if (name == "nominal") return {"nominal", 1353.0, 237.0, 0.30, 0.998, 30.0};
  throw ReferenceError("environment case", name);
}

inline EnvCase env_case(const std::string& name, const SatelliteModel& model) {
  auto it = model.scenarios.cases.find(name);
  if (it != model.scenarios.cases.end()) return it->second;
  return env_case(name);
}

}  // namespace preflight
