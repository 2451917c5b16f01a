#include <gtest/gtest.h>

#include <cmath>

#include "preflight/preflight.hpp"

using namespace preflight;

namespace {

double eclipse_fraction(const OrbitSpec& spec, EclipseModel model = EclipseModel::kGeometric, int samples = 20000) {
  CircularOrbit orbit(spec, model);
  int dark = 0;
  for (int k = 0; k < samples; ++k) {
    if (orbit.state(orbit.period() * (k + 0.5) / samples).in_eclipse) ++dark;
  }
  return static_cast<double>(dark) / samples;
}

OrbitSpec orbit_at_beta(double beta) {
  OrbitSpec s;
  s.altitude_km = 400.0;
  s.inclination_deg = 51.6;
  s.raan_deg = 30.0;
  s.sun_direction = sun_for_beta(s, beta, 40.0);
  return s;
}

}  // namespace

TEST(OrbitalPeriod, LowEarthOrbit) {
  const double minutes = orbital_period(400.0) / 60.0;
  EXPECT_NEAR(minutes, 92.6, 92.6 * 0.002);
  EXPECT_NEAR(orbital_period(400.0), 5553.0, 1.0);
}

TEST(OrbitalPeriod, Geostationary) { EXPECT_NEAR(orbital_period(35786.0), 86164.0, 10.0); }

TEST(OrbitalPeriod, DegenerateRadius) {
  EXPECT_THROW(orbital_period(-constants::kEarthRadiusKm), DomainError);
  EXPECT_THROW(orbital_period(-7000.0), DomainError);
}

TEST(OrbitalPeriod, IncreasesWithAltitude) {
  double last = 0.0;
  for (double h = 0.0; h < 40000.0; h += 500.0) {
    const double p = orbital_period(h);
    EXPECT_GT(p, last);
    last = p;
  }
}

TEST(EarthViewFactor, Examples) {
  EXPECT_NEAR(earth_view_factor(400.0), 0.885, 0.001);
  EXPECT_DOUBLE_EQ(earth_view_factor(0.0), 1.0);
  EXPECT_LT(earth_view_factor(1e9), 1e-9);
  EXPECT_GT(earth_view_factor(1e9), 0.0);
  EXPECT_THROW(earth_view_factor(-1.0), DomainError);
}

TEST(EarthViewFactor, DecreasesWithAltitude) {
  for (double h = 0.0; h < 5000.0; h += 100.0) EXPECT_GT(earth_view_factor(h), earth_view_factor(h + 100.0));
}

TEST(BetaAngle, SunInPlaneIsZero) {
  OrbitSpec s;
  s.raan_deg = 20.0;
  s.sun_direction = ascending_node(s);
  EXPECT_NEAR(beta_angle(s), 0.0, 1e-12);
}

TEST(BetaAngle, SunAlongNormalIsNinety) {
  OrbitSpec s;
  s.raan_deg = 20.0;
  s.sun_direction = orbit_normal(s);
  EXPECT_NEAR(beta_angle(s), 90.0, 1e-9);
  s.sun_direction = -orbit_normal(s);
  EXPECT_NEAR(beta_angle(s), -90.0, 1e-9);
}

TEST(BetaAngle, HandComputedCase) {
  // i = 51.6, RAAN = 90: node along +Y, so h = r x v is (sin i, 0, cos i).
  OrbitSpec s;
  s.inclination_deg = 51.6;
  s.raan_deg = 90.0;
  s.sun_direction = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d r0(0.0, 1.0, 0.0);  // ascending node
  const double i = deg2rad(51.6);
  const Eigen::Vector3d v0(-std::cos(i), 0.0, std::sin(i));  // direction of motion there
  const Eigen::Vector3d h = r0.cross(v0);
  const double expected = rad2deg(std::asin(h.dot(s.sun_direction)));
  EXPECT_NEAR(beta_angle(s), expected, 1e-9);
  EXPECT_NEAR(beta_angle(s), 51.6, 1e-9);
}

TEST(BetaAngle, SunForBetaRoundTrips) {
  for (double b : {-75.0, -10.0, 0.0, 33.3, 70.5, 89.0}) EXPECT_NEAR(beta_angle(orbit_at_beta(b)), b, 1e-9);
}

TEST(EclipseState, AntiSunwardIsDark) {
  const Eigen::Vector3d sun = Eigen::Vector3d::UnitX();
  EXPECT_TRUE(eclipse_state(-sun, sun, 400.0));
  EXPECT_FALSE(eclipse_state(sun, sun, 400.0));
  EXPECT_FALSE(eclipse_state(Eigen::Vector3d::UnitY(), sun, 400.0));
}

TEST(EclipseState, ShadowEdge) {
  const Eigen::Vector3d sun = Eigen::Vector3d::UnitX();
  const double half = shadow_half_angle(400.0);
  const auto at = [](double a) { return Eigen::Vector3d(-std::cos(a), std::sin(a), 0.0); };
  EXPECT_TRUE(eclipse_state(at(half - 1e-6), sun, 400.0));
  EXPECT_FALSE(eclipse_state(at(half + 1e-6), sun, 400.0));
}

TEST(EclipseFraction, BetaZeroMatchesClosedForm) {
  const double expected = std::asin(constants::kEarthRadiusKm / (constants::kEarthRadiusKm + 400.0)) /
                          std::numbers::pi;
  EXPECT_NEAR(expected, 0.390, 0.001);
  EXPECT_NEAR(eclipse_fraction(orbit_at_beta(0.0)), expected, 0.005);
  EXPECT_NEAR(eclipse_fraction(orbit_at_beta(0.0)) * orbital_period(400.0) / 60.0, 36.1, 0.5);
}

TEST(EclipseFraction, HighBetaIsSunlit) {
  EXPECT_EQ(eclipse_fraction(orbit_at_beta(80.0)), 0.0);
  const double limit = rad2deg(shadow_half_angle(400.0));
  EXPECT_EQ(eclipse_fraction(orbit_at_beta(limit + 0.5)), 0.0);
  EXPECT_GT(eclipse_fraction(orbit_at_beta(limit - 2.0)), 0.0);
}

TEST(EclipseFraction, FixedSplitIsOneThird) {
  EXPECT_NEAR(eclipse_fraction(orbit_at_beta(0.0), EclipseModel::kFixed60_30), 1.0 / 3.0, 1e-3);
  EXPECT_NEAR(eclipse_fraction(orbit_at_beta(80.0), EclipseModel::kFixed60_30), 1.0 / 3.0, 1e-3);
}

TEST(CircularOrbit, EclipseSymmetricAboutMidnight) {
  CircularOrbit orbit(orbit_at_beta(0.0));
  const double dt = 0.5;
  double first = -1.0, last = -1.0;
  for (double t = 0.0; t < orbit.period(); t += dt) {
    if (orbit.state(t).in_eclipse) {
      if (first < 0.0) first = t;
      last = t;
    }
  }
  ASSERT_GT(first, 0.0);
  EXPECT_NEAR(0.5 * (first + last), 0.5 * orbit.period(), dt);
  // midnight is anti-solar
  EXPECT_NEAR(orbit.state(0.5 * orbit.period()).position.dot(orbit.spec().sun_direction), -1.0, 1e-9);
}

TEST(CircularOrbit, PositionsAreUnit) {
  CircularOrbit orbit(orbit_at_beta(25.0));
  for (double t = 0.0; t < orbit.period(); t += 97.0) EXPECT_NEAR(orbit.state(t).position.norm(), 1.0, 1e-9);
}

TEST(EnvCase, BuiltIns) {
  const auto hot = env_case("hot");
  EXPECT_EQ(hot.solar_flux, 1414.0);
  EXPECT_EQ(hot.earth_ir, 258.0);
  EXPECT_EQ(hot.albedo, 0.35);
  EXPECT_EQ(hot.albedo_correction, 0.998);
  const auto cold = env_case("cold");
  EXPECT_EQ(cold.solar_flux, 1318.0);
  EXPECT_EQ(cold.earth_ir, 216.0);
  EXPECT_EQ(cold.albedo, 0.25);
  EXPECT_EQ(env_case("nominal").solar_flux, 1353.0);
  EXPECT_THROW(env_case("lukewarm"), ReferenceError);
}
