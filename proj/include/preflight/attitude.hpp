#pragma once

#include <Eigen/Geometry>
#include <cmath>
#include <string>
#include <variant>

#include "preflight/errors.hpp"
#include "preflight/orbit.hpp"
#include "preflight/units.hpp"

namespace preflight {

using Rotation = Eigen::Matrix3d;  // body -> inertial

struct FreeRotation {
  double rate_deg_s = 2.0;
  Eigen::Vector3d axis = Eigen::Vector3d(1.0, 1.0, 1.0).normalized();  // body frame
  Rotation initial = Rotation::Identity();
};

struct SunPointing {
  std::string pointing_patch;
  Eigen::Vector3d patch_normal = Eigen::Vector3d::UnitX();
};

struct NadirPointing {
  std::string pointing_patch;
  Eigen::Vector3d patch_normal = Eigen::Vector3d::UnitX();
};

using AttitudeMode = std::variant<FreeRotation, SunPointing, NadirPointing>;

namespace detail {

inline Rotation align(const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
  return Eigen::Quaterniond::FromTwoVectors(from, to).normalized().toRotationMatrix();
}

}  // namespace detail

inline Rotation attitude_at(const AttitudeMode& mode, const OrbitState& state, double t) {
  return std::visit(
      [&](const auto& m) -> Rotation {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, FreeRotation>) {
          return m.initial * Eigen::AngleAxisd(deg2rad(m.rate_deg_s) * t, m.axis.normalized()).toRotationMatrix();
        } else if constexpr (std::is_same_v<M, SunPointing>) {
          return detail::align(m.patch_normal, state.sun_direction);
        } else {
          return detail::align(m.patch_normal, -state.position);
        }
      },
      mode);
}

/// Cosine-law illumination of a body-frame normal, clamped to zero for back-lit faces.
inline double incidence_cosine(const Eigen::Vector3d& patch_normal, const Rotation& attitude,
                               const Eigen::Vector3d& sun_direction) {
  return std::clamp((attitude * patch_normal).dot(sun_direction), 0.0, 1.0);
}

/// Mean illumination factor of the pointing patch under each mode.
/// Free rotation is treated as isotropic tumbling. Nadir pointing is averaged
/// numerically over one orbit, eclipse included.
inline double spin_average_factor(const AttitudeMode& mode, const CircularOrbit* orbit = nullptr,
                                  int samples = 3600) {
  if (std::holds_alternative<FreeRotation>(mode)) return 0.25;
  if (std::holds_alternative<SunPointing>(mode)) return 1.0;
  if (orbit == nullptr) throw DomainError("nadir-pointing average needs an orbit");
  double sum = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = orbit->period() * (k + 0.5) / samples;
    const OrbitState s = orbit->state(t);
    if (s.in_eclipse) continue;
    sum += incidence_cosine(std::get<NadirPointing>(mode).patch_normal, attitude_at(mode, s, t), s.sun_direction);
  }
  return sum / samples;
}

}  // namespace preflight
