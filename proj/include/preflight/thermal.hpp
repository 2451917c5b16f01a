#pragma once

// Single-node orbital thermal balance.
//
// Each node is one isothermal mass exchanging heat radiatively with the
// environment only:
//
//   m c dT/dt = Q_solar + Q_ir + Q_albedo + Q_internal - Q_space
//
// Nodes never exchange heat with each other, so a run integrates them side
// by side against a shared orbit/attitude history.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "preflight/attitude.hpp"
#include "preflight/errors.hpp"
#include "preflight/model.hpp"
#include "preflight/orbit.hpp"
#include "preflight/power.hpp"
#include "preflight/units.hpp"

namespace preflight {

inline constexpr double kMaxStepChangeK = 50.0;

struct FluxBreakdown {
  double q_solar = 0.0;     // absorbed solar, net of electrical extraction
  double q_ir = 0.0;
  double q_albedo = 0.0;
  double q_internal = 0.0;
  double q_space = 0.0;     // loss magnitude
  double p_electric = 0.0;  // electrical power drawn from the node's cells

  double net() const { return q_solar + q_ir + q_albedo + q_internal - q_space; }
};

struct TemperatureSample {
  double time = 0.0;
  double temperature = 0.0;  // K
  FluxBreakdown flux;
  bool in_eclipse = false;
};

struct TemperatureHistory {
  std::string node;
  std::vector<TemperatureSample> samples;
  double orbit_period = 0.0;
};

// ---------------------------------------------------------------------------
// Flux terms

/// Direct solar absorption minus the electrical power taken out by the cells.
inline double q_solar(double area, double alpha_avg, double cos_incidence, double solar_flux, bool in_eclipse,
                      double p_electric = 0.0) {
  if (cos_incidence < 0.0 || cos_incidence > 1.0) throw DomainError("incidence cosine outside [0,1]");
  if (in_eclipse) return 0.0;
  const double absorbed = alpha_avg * area * cos_incidence * solar_flux;
  if (p_electric > absorbed + 1e-12) {
    throw DomainError("electrical extraction " + std::to_string(p_electric) + " W exceeds absorbed " +
                      std::to_string(absorbed) + " W");
  }
  return std::max(0.0, absorbed - p_electric);
}

inline double q_earth_ir(double area, double epsilon_avg, double view_factor, double earth_ir, double earth_weight) {
  if (!(view_factor > 0.0 && view_factor <= 1.0)) throw DomainError("view factor outside (0,1]");
  return epsilon_avg * area * view_factor * earth_ir * earth_weight;
}

inline double q_albedo(double area, double alpha_avg, double view_factor, double albedo_correction, double albedo,
                       double solar_flux, double sun_zenith_cos, double earth_weight) {
  return alpha_avg * area * view_factor * albedo_correction * albedo * solar_flux * std::max(sun_zenith_cos, 0.0) *
         earth_weight;
}

/// Radiative loss to deep space; `emissive_area` is the sum of epsilon * area over the node.
inline double q_space(double temperature, double emissive_area) {
  if (temperature < 0.0) throw DomainError("temperature below 0 K");
  const double t2 = temperature * temperature;
  return constants::kStefanBoltzmann * t2 * t2 * emissive_area;
}

/// One classical RK4 step of dT/dt = net_flux(t, T) / heat_capacity.
template <class NetFlux>
double step_temperature(double heat_capacity, double temperature, double t, double dt, NetFlux&& net_flux) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const double k1 = net_flux(t, temperature) / heat_capacity;
  const double k2 = net_flux(t + 0.5 * dt, temperature + 0.5 * dt * k1) / heat_capacity;
  const double k3 = net_flux(t + 0.5 * dt, temperature + 0.5 * dt * k2) / heat_capacity;
  const double k4 = net_flux(t + dt, temperature + dt * k3) / heat_capacity;
  const double delta = dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
  if (std::abs(delta) > kMaxStepChangeK) {
    throw DomainError("temperature change of " + std::to_string(delta) + " K in one step; reduce dt");
  }
  if (!std::isfinite(delta)) throw ConvergenceError("non-finite temperature derivative");
  return temperature + delta;
}

/// Constant-flux step.
inline double step_temperature(double heat_capacity, double temperature, double total_flux, double dt) {
  return step_temperature(heat_capacity, temperature, 0.0, dt, [&](double, double) { return total_flux; });
}

// ---------------------------------------------------------------------------
// Scenario and simulator

struct ThermalScenario {
  std::string name;
  EnvCase env;
  OrbitSpec orbit;
  AttitudeMode mode = FreeRotation{};
  bool lock_spin_to_orbit = true;
  PowerState power = PowerState::kMinimum;
  ThermalSettings settings;
  double standby_share_w = 0.0;  // per-string electrical demand in standby
};

struct NodeSummary {
  std::string node;
  double t_min_k = 0.0;
  double t_max_k = 0.0;
  double t_mean_k = 0.0;
  struct BandCheck {
    std::string band;
    double min_k = 0.0;
    double max_k = 0.0;
    bool pass = true;
    bool below = false;
    bool above = false;
  };
  std::vector<BandCheck> bands;
  bool pass() const {
    return std::all_of(bands.begin(), bands.end(), [](const BandCheck& b) { return b.pass; });
  }
};

struct PeriodicResult {
  std::vector<TemperatureHistory> histories;
  int orbits = 0;
  std::vector<double> final_deviation_k;  // per node, last orbit-to-orbit deviation
  double spin_rate_deg_s = 0.0;           // effective rate after orbit locking
  double dt = 0.0;
};

class ThermalSimulator {
 public:
  struct ResolvedPatch {
    std::string name;
    double area = 0.0;
    Eigen::Vector3d normal;
    double alpha = 0.0;
    double epsilon = 0.0;
    struct StringShare {
      const PowerString* string = nullptr;
      double share = 1.0;  // fraction of the string on this patch
    };
    std::vector<StringShare> strings;
  };

  struct ResolvedNode {
    std::string name;
    double heat_capacity = 0.0;
    double emissive_area = 0.0;
    Dissipation dissipation;
    std::vector<ResolvedPatch> patches;
  };

  /// Instantaneous environment seen by every node.
  struct Environment {
    OrbitState state;
    Rotation attitude;
  };

  ThermalSimulator(const SatelliteModel& model, ThermalScenario scenario)
      : scenario_(std::move(scenario)),
        orbit_(scenario_.orbit, scenario_.settings.eclipse),
        view_factor_(earth_view_factor(scenario_.orbit.altitude_km)) {
    if (auto* spin = std::get_if<FreeRotation>(&scenario_.mode); spin && scenario_.lock_spin_to_orbit) {
      // Whole number of turns per orbit so the forced response is orbit-periodic.
      const double turns = spin->rate_deg_s * orbit_.period() / 360.0;
      if (turns > 0.0) spin->rate_deg_s = std::max(1.0, std::round(turns)) * 360.0 / orbit_.period();
    }
    for (const auto& spec : model.nodes) {
      ResolvedNode node;
      node.name = spec.name;
      node.heat_capacity = spec.mass * spec.specific_heat;
      node.dissipation = spec.dissipation;
      for (const auto& pn : spec.patches) {
        const SurfacePatch& p = model.patch(pn);
        const auto optics = effective_optical_properties(p, model.finishes);
        ResolvedPatch rp{p.name, p.area, p.normal.normalized(), optics.alpha, optics.epsilon, {}};
        for (const auto& s : model.strings) {
          const auto hits = std::count(s.patches.begin(), s.patches.end(), p.name);
          if (hits > 0) rp.strings.push_back({&s, static_cast<double>(hits) / static_cast<double>(s.patches.size())});
        }
        node.emissive_area += optics.epsilon * p.area;
        node.patches.push_back(std::move(rp));
      }
      nodes_.push_back(std::move(node));
    }
  }

  const std::vector<ResolvedNode>& nodes() const { return nodes_; }
  const CircularOrbit& orbit() const { return orbit_; }
  const ThermalScenario& scenario() const { return scenario_; }
  double spin_rate() const {
    const auto* spin = std::get_if<FreeRotation>(&scenario_.mode);
    return spin ? spin->rate_deg_s : 0.0;
  }

  Environment environment(double t) const {
    Environment env;
    env.state = orbit_.state(t);
    env.attitude = attitude_at(scenario_.mode, env.state, t);
    return env;
  }

  FluxBreakdown fluxes(const ResolvedNode& node, const Environment& env, double temperature) const {
    const auto& e = scenario_.env;
    FluxBreakdown f;
    const Eigen::Vector3d nadir = -env.state.position;
    const double sun_zenith_cos = env.state.position.dot(env.state.sun_direction);
    for (const auto& p : node.patches) {
      const Eigen::Vector3d n = env.attitude * p.normal;
      const double cos_sun = std::clamp(n.dot(env.state.sun_direction), 0.0, 1.0);
      const double earth_weight = std::max(0.0, n.dot(nadir));
      double p_elec = 0.0;
      if (!env.state.in_eclipse) {
        for (const auto& sh : p.strings) {
          p_elec += sh.share * string_extraction(*sh.string, scenario_.power, cos_sun, e.solar_flux,
                                                 scenario_.standby_share_w);
        }
      }
      f.q_solar += q_solar(p.area, p.alpha, cos_sun, e.solar_flux, env.state.in_eclipse, p_elec);
      f.p_electric += p_elec;
      f.q_ir += q_earth_ir(p.area, p.epsilon, view_factor_, e.earth_ir, earth_weight);
      if (!env.state.in_eclipse) {
        f.q_albedo += q_albedo(p.area, p.alpha, view_factor_, e.albedo_correction, e.albedo, e.solar_flux,
                               sun_zenith_cos, earth_weight);
      }
    }
    f.q_internal = env.state.in_eclipse ? node.dissipation.eclipse : node.dissipation.sunlit;
    f.q_space = q_space(temperature, node.emissive_area);
    return f;
  }

  /// Steps per orbit and the matching uniform step.
  std::pair<int, double> orbit_grid() const {
    const int n = std::max(1, static_cast<int>(std::ceil(orbit_.period() / scenario_.settings.dt - 1e-9)));
    return {n, orbit_.period() / n};
  }

  /// Integrates `orbits` whole orbits from the initial temperature and returns every sample.
  std::vector<TemperatureHistory> simulate(int orbits) const {
    const auto [steps, dt] = orbit_grid();
    std::vector<double> temps(nodes_.size(), scenario_.settings.initial_temperature_k);
    auto out = empty_histories();
    Environment env = environment(0.0);
    record(out, env, temps, 0.0);
    for (int k = 0; k < orbits * steps; ++k) {
      const double t = k * dt;
      env = advance(temps, t, dt, env);
      record(out, env, temps, t + dt);
    }
    return out;
  }

  /// Integrates orbit after orbit until consecutive orbits agree within tolerance.
  PeriodicResult run_periodic() const {
    const auto [steps, dt] = orbit_grid();
    const auto& settings = scenario_.settings;
    std::vector<double> temps(nodes_.size(), settings.initial_temperature_k);
    std::vector<std::vector<double>> previous;
    PeriodicResult result;
    result.spin_rate_deg_s = spin_rate();
    result.dt = dt;
    for (int orbit = 1; orbit <= settings.max_orbits; ++orbit) {
      std::vector<std::vector<double>> current(nodes_.size(), std::vector<double>(steps + 1));
      auto histories = empty_histories();
      Environment env = environment(0.0);
      for (std::size_t i = 0; i < nodes_.size(); ++i) current[i][0] = temps[i];
      record(histories, env, temps, 0.0);
      for (int k = 0; k < steps; ++k) {
        const double t = k * dt;
        env = advance(temps, t, dt, env);
        for (std::size_t i = 0; i < nodes_.size(); ++i) current[i][k + 1] = temps[i];
        record(histories, env, temps, t + dt);
      }
      if (!previous.empty()) {
        result.final_deviation_k.assign(nodes_.size(), 0.0);
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
          for (int k = 0; k <= steps; ++k) {
            result.final_deviation_k[i] =
                std::max(result.final_deviation_k[i], std::abs(current[i][k] - previous[i][k]));
          }
        }
        const bool converged = std::all_of(result.final_deviation_k.begin(), result.final_deviation_k.end(),
                                           [&](double d) { return d < settings.tolerance_k; });
        if (converged) {
          result.histories = std::move(histories);
          result.orbits = orbit;
          return result;
        }
      }
      previous = std::move(current);
    }
    std::ostringstream msg;
    msg << "thermal run '" << scenario_.name << "' did not converge within " << settings.max_orbits << " orbits;";
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      msg << " " << nodes_[i].name << " deviation "
          << (result.final_deviation_k.empty() ? 0.0 : result.final_deviation_k[i]) << " K";
    }
    throw ConvergenceError(msg.str());
  }

 private:
  std::vector<TemperatureHistory> empty_histories() const {
    std::vector<TemperatureHistory> out;
    for (const auto& n : nodes_) out.push_back({n.name, {}, orbit_.period()});
    return out;
  }

  void record(std::vector<TemperatureHistory>& out, const Environment& env, const std::vector<double>& temps,
              double t) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      out[i].samples.push_back({t, temps[i], fluxes(nodes_[i], env, temps[i]), env.state.in_eclipse});
    }
  }

  // Advances every node by one RK4 step; returns the environment at t + dt.
  Environment advance(std::vector<double>& temps, double t, double dt, const Environment& start) const {
    const Environment mid = environment(t + 0.5 * dt);
    Environment end = environment(t + dt);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& node = nodes_[i];
      temps[i] = step_temperature(node.heat_capacity, temps[i], t, dt, [&](double ts, double temp) {
        const Environment& env = ts == t ? start : (ts == t + dt ? end : mid);
        return fluxes(node, env, temp).net();
      });
    }
    return end;
  }

  ThermalScenario scenario_;
  CircularOrbit orbit_;
  double view_factor_;
  std::vector<ResolvedNode> nodes_;
};

/// Min/max over the history and pass/fail against the bands that apply to the node.
inline NodeSummary summarize(const TemperatureHistory& history, const std::vector<TemperatureBand>& bands) {
  if (history.samples.empty()) throw DomainError("empty temperature history");
  NodeSummary s;
  s.node = history.node;
  s.t_min_k = s.t_max_k = history.samples.front().temperature;
  double sum = 0.0;
  for (const auto& sample : history.samples) {
    s.t_min_k = std::min(s.t_min_k, sample.temperature);
    s.t_max_k = std::max(s.t_max_k, sample.temperature);
    sum += sample.temperature;
  }
  s.t_mean_k = sum / static_cast<double>(history.samples.size());
  for (const auto& band : bands) {
    if (!band.nodes.empty() && std::find(band.nodes.begin(), band.nodes.end(), history.node) == band.nodes.end()) {
      continue;
    }
    NodeSummary::BandCheck check{band.name, band.min_k, band.max_k};
    check.below = s.t_min_k < band.min_k;
    check.above = s.t_max_k > band.max_k;
    check.pass = !check.below && !check.above;
    s.bands.push_back(check);
  }
  return s;
}

/// Resolves attitude mode names ("spin", "sun", "nadir") against the model defaults.
inline AttitudeMode attitude_mode(const SatelliteModel& model, const std::string& name) {
  const auto& a = model.scenarios.attitude;
  if (name == "spin") return FreeRotation{a.spin_rate_deg_s, a.spin_axis, Rotation::Identity()};
  if (name == "sun" || name == "nadir") {
    const std::string& patch = name == "sun" ? a.sun_patch : a.nadir_patch;
    if (patch.empty()) throw SchemaError("scenarios.attitude." + name + "_patch is not configured");
    const Eigen::Vector3d normal = model.patch(patch).normal;
    if (name == "sun") return SunPointing{patch, normal};
    return NadirPointing{patch, normal};
  }
  throw ReferenceError("attitude mode", name);
}

inline PowerState power_state(const std::string& name) {
  if (name == "min") return PowerState::kMinimum;
  if (name == "max") return PowerState::kMaximum;
  throw ReferenceError("power state", name);
}

/// Builds a scenario from model defaults and named selections.
inline ThermalScenario make_scenario(const SatelliteModel& model, const std::string& case_name,
                                     const std::string& mode_name, const std::string& power_name = "min") {
  ThermalScenario sc;
  sc.env = env_case(case_name, model);
  const auto& od = model.scenarios.orbit;
  sc.orbit.altitude_km = od.altitude_km;
  sc.orbit.inclination_deg = od.inclination_deg;
  sc.orbit.raan_deg = od.raan_deg;
  sc.orbit.sun_direction = sun_for_beta(sc.orbit, sc.env.beta_deg.value_or(0.0), od.sun_azimuth_deg);
  sc.mode = attitude_mode(model, mode_name);
  sc.lock_spin_to_orbit = model.scenarios.attitude.lock_spin_to_orbit;
  sc.power = power_state(power_name);
  sc.settings = model.scenarios.thermal;
  const auto& pw = model.scenarios.power;
  sc.standby_share_w =
      model.strings.empty()
          ? 0.0
          : required_generation(pw.standby_consumption_w, pw.sun_minutes, pw.eclipse_minutes) / model.strings.size();
  sc.name = case_name + "/" + mode_name + "/" + power_name;
  return sc;
}

}  // namespace preflight
