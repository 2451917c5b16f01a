#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "preflight/errors.hpp"
#include "preflight/units.hpp"

namespace preflight {

struct Material {
  std::string name;
  double youngs_modulus = 0.0;    // Pa
  double density = 0.0;           // kg/m^3
  double tensile_strength = 0.0;  // Pa
  double specific_heat = 0.0;     // J/(kg K)
  double conductivity = 0.0;      // W/(m K), informational only
  double allowable_factor = 0.30;

  bool operator==(const Material&) const = default;
};

struct SurfaceFinish {
  std::string name;
  double alpha = 0.0;
  double epsilon = 0.0;

  bool operator==(const SurfaceFinish&) const = default;
};

struct FinishFraction {
  std::string finish;
  double fraction = 0.0;

  bool operator==(const FinishFraction&) const = default;
};

struct SurfacePatch {
  std::string name;
  std::string node;  // owning thermal node; empty for power-only geometry
  double area = 0.0;
  Eigen::Vector3d normal = Eigen::Vector3d::UnitX();
  std::vector<FinishFraction> finish_fractions;
  double cell_fraction = 0.0;
  std::optional<std::string> string_id;

  bool operator==(const SurfacePatch&) const = default;
};

struct Dissipation {
  double sunlit = 0.0;   // W
  double eclipse = 0.0;  // W

  bool operator==(const Dissipation&) const = default;
};

struct ThermalNodeSpec {
  std::string name;
  double mass = 0.0;           // kg
  double specific_heat = 0.0;  // J/(kg K)
  std::string material;        // optional provenance of specific_heat
  std::vector<std::string> patches;
  Dissipation dissipation;

  bool operator==(const ThermalNodeSpec&) const = default;
};

struct PowerString {
  std::string id;
  int cells_in_series = 1;
  double cell_area = 0.0;  // m^2
  double efficiency = 0.0;
  std::vector<std::string> patches;
  // Datasheet peak power per cell (V_mp * I_mp); used for the maximum-generation figure.
  std::optional<double> rated_cell_power;
  bool sun_orientable = false;

  bool operator==(const PowerString&) const = default;
};

struct PanelSpec {
  std::string name;
  double length = 0.0;
  double width = 0.0;
  double thickness = 0.0;
  std::string material;
  double total_mass = 0.0;

  bool operator==(const PanelSpec&) const = default;
};

struct HingeSpec {
  int joint = 0;  // 0 = root (chain start), k = between panel k-1 and k, n = tip
  std::optional<double> torsional_stiffness;  // N m/rad; nullopt = rigid

  bool operator==(const HingeSpec&) const = default;
};

enum class BoundaryCondition { kClampedFree, kPinnedPinned, kClampedClamped, kFreeFree };

struct ChainSpec {
  std::string name;
  std::vector<std::string> panels;
  std::vector<HingeSpec> hinges;
  double gap = 0.0;
  BoundaryCondition bc = BoundaryCondition::kClampedFree;
  int elements_per_panel = 16;

  bool operator==(const ChainSpec&) const = default;
};

struct TemperatureBand {
  std::string name;
  double min_k = 0.0;
  double max_k = 0.0;
  std::vector<std::string> nodes;  // empty = every node

  bool operator==(const TemperatureBand&) const = default;
};

struct Requirements {
  double min_frequency_hz = 60.0;
  double allowable_factor = 0.30;
  double quasi_static_g = 9.0;
  double rail_load_n = 46.6;
  double rail_section_width = 8.5e-3;
  double rail_section_depth = 8.5e-3;
  std::string rail_material;
  double envelope_m = 6.5e-3;
  std::vector<TemperatureBand> temperature_bands;
  std::optional<double> reference_first_frequency_hz;
  std::optional<double> reference_max_stress_pa;

  bool operator==(const Requirements&) const = default;
};

/// One external thermal environment.
struct EnvCase {
  std::string name;
  double solar_flux = 0.0;  // W/m^2
  double earth_ir = 0.0;    // W/m^2
  double albedo = 0.0;
  double albedo_correction = 0.998;
  std::optional<double> beta_deg;  // orbit geometry bound to the case

  bool operator==(const EnvCase&) const = default;
};

struct OrbitSpec {
  double altitude_km = 400.0;
  double inclination_deg = 51.6;
  double raan_deg = 0.0;
  Eigen::Vector3d sun_direction = Eigen::Vector3d::UnitX();

  bool operator==(const OrbitSpec&) const = default;
};

struct OrbitDefaults {
  double altitude_km = 400.0;
  double inclination_deg = 51.6;
  double raan_deg = 0.0;
  double sun_azimuth_deg = 0.0;  // in-plane angle of the sun projection from the ascending node

  bool operator==(const OrbitDefaults&) const = default;
};

/// Per-patch finish override for a named surface configuration.
struct SurfaceConfig {
  std::string name;
  std::map<std::string, std::vector<FinishFraction>> overrides;

  bool operator==(const SurfaceConfig&) const = default;
};

struct AttitudeDefaults {
  double spin_rate_deg_s = 2.0;
  Eigen::Vector3d spin_axis = Eigen::Vector3d(1.0, 1.0, 1.0).normalized();
  bool lock_spin_to_orbit = true;
  std::string sun_patch;
  std::string nadir_patch;

  bool operator==(const AttitudeDefaults&) const = default;
};

enum class EclipseModel { kGeometric, kFixed60_30 };

struct ThermalSettings {
  double dt = 1.0;
  double tolerance_k = 0.1;
  int max_orbits = 60;
  double initial_temperature_k = 293.15;
  EclipseModel eclipse = EclipseModel::kGeometric;

  bool operator==(const ThermalSettings&) const = default;
};

struct PowerSettings {
  double standby_consumption_w = 2.1;
  double sun_minutes = 60.0;
  double eclipse_minutes = 30.0;
  double nominal_flux = 1353.0;

  bool operator==(const PowerSettings&) const = default;
};

struct Scenarios {
  OrbitDefaults orbit;
  std::map<std::string, EnvCase> cases;
  std::map<std::string, SurfaceConfig> surfaces;
  AttitudeDefaults attitude;
  ThermalSettings thermal;
  PowerSettings power;

  bool operator==(const Scenarios&) const = default;
};

struct SatelliteModel {
  std::string name;
  int schema_version = 1;
  std::map<std::string, Material> materials;
  std::map<std::string, SurfaceFinish> finishes;
  std::vector<ThermalNodeSpec> nodes;
  std::vector<SurfacePatch> patches;
  std::vector<PowerString> strings;
  std::map<std::string, PanelSpec> panels;
  std::map<std::string, ChainSpec> chains;
  Requirements requirements;
  Scenarios scenarios;
  std::string finish_catalog_note;

  bool operator==(const SatelliteModel&) const = default;

  const SurfacePatch& patch(const std::string& patch_name) const {
    for (const auto& p : patches) {
      if (p.name == patch_name) return p;
    }
    throw ReferenceError("patch", patch_name);
  }
  const ThermalNodeSpec& node(const std::string& node_name) const {
    for (const auto& n : nodes) {
      if (n.name == node_name) return n;
    }
    throw ReferenceError("node", node_name);
  }
  const PowerString& string(const std::string& id) const {
    for (const auto& s : strings) {
      if (s.id == id) return s;
    }
    throw ReferenceError("string", id);
  }
  const Material& material(const std::string& material_name) const {
    auto it = materials.find(material_name);
    if (it == materials.end()) throw ReferenceError("material", material_name);
    return it->second;
  }
  double total_node_mass() const {
    double m = 0.0;
    for (const auto& n : nodes) m += n.mass;
    return m;
  }
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool usable() const { return errors.empty(); }
};

struct OpticalProperties {
  double alpha = 0.0;
  double epsilon = 0.0;
};

/// Area-weighted absorptivity and emissivity of a patch.
inline OpticalProperties effective_optical_properties(const SurfacePatch& patch,
                                                      const std::map<std::string, SurfaceFinish>& finishes) {
  OpticalProperties out;
  for (const auto& ff : patch.finish_fractions) {
    auto it = finishes.find(ff.finish);
    if (it == finishes.end()) throw ReferenceError("finish", ff.finish);
    out.alpha += ff.fraction * it->second.alpha;
    out.epsilon += ff.fraction * it->second.epsilon;
  }
  return out;
}

inline double allowable_stress(const Material& material, double factor) {
  if (!(factor > 0.0 && factor <= 1.0)) {
    throw DomainError("allowable-stress factor must lie in (0, 1], got " + std::to_string(factor));
  }
  return factor * material.tensile_strength;
}

inline double allowable_stress(const Material& material) {
  return allowable_stress(material, material.allowable_factor);
}

/// Combines solar-cell coverage with a coating mix into full-area finish fractions.
inline std::vector<FinishFraction> compose_finish(const std::string& cell_finish, double cell_fraction,
                                                  const std::vector<FinishFraction>& coating) {
  std::vector<FinishFraction> out;
  if (cell_fraction > 0.0) out.push_back({cell_finish, cell_fraction});
  for (const auto& c : coating) out.push_back({c.finish, (1.0 - cell_fraction) * c.fraction});
  return out;
}

/// Returns a copy of the model with the named surface configuration applied.
inline SatelliteModel with_surface(const SatelliteModel& model, const std::string& surface) {
  auto it = model.scenarios.surfaces.find(surface);
  if (it == model.scenarios.surfaces.end()) throw ReferenceError("surface configuration", surface);
  SatelliteModel out = model;
  for (const auto& [patch_name, fractions] : it->second.overrides) {
    auto p = std::find_if(out.patches.begin(), out.patches.end(),
                          [&](const SurfacePatch& sp) { return sp.name == patch_name; });
    if (p == out.patches.end()) throw ReferenceError("patch", patch_name);
    p->finish_fractions = fractions;
  }
  return out;
}

namespace detail {

inline void check_fractions(const std::string& where, const std::vector<FinishFraction>& fractions,
                            const std::map<std::string, SurfaceFinish>& finishes, ValidationReport& report) {
  double sum = 0.0;
  for (const auto& ff : fractions) {
    if (!finishes.contains(ff.finish)) report.errors.push_back(where + ": unknown finish '" + ff.finish + "'");
    if (ff.fraction < 0.0 || ff.fraction > 1.0) {
      report.errors.push_back(where + ": finish fraction for '" + ff.finish + "' outside [0,1]");
    }
    sum += ff.fraction;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    report.errors.push_back(where + ": finish fractions sum to " + std::to_string(sum) + ", expected 1");
  }
}

}  // namespace detail

inline ValidationReport validate_model(const SatelliteModel& model) {
  ValidationReport report;
  auto& err = report.errors;
  auto& warn = report.warnings;

  for (const auto& [name, m] : model.materials) {
    if (!(m.youngs_modulus > 0 && m.density > 0 && m.tensile_strength > 0 && m.specific_heat > 0 &&
          m.conductivity > 0)) {
      err.push_back("material '" + name + "': all numeric fields must be positive");
    }
    if (!(m.allowable_factor > 0.0 && m.allowable_factor <= 1.0)) {
      err.push_back("material '" + name + "': allowable factor outside (0,1]");
    }
  }
  for (const auto& [name, f] : model.finishes) {
    if (f.alpha < 0.0 || f.alpha > 1.0) err.push_back("finish '" + name + "': alpha outside [0,1]");
    if (f.epsilon < 0.0 || f.epsilon > 1.0) err.push_back("finish '" + name + "': epsilon outside [0,1]");
    if (f.alpha > 0.98) warn.push_back("finish '" + name + "': alpha above 0.98 is unusual");
    if (f.epsilon > 0.98) warn.push_back("finish '" + name + "': epsilon above 0.98 is unusual");
  }

  std::set<std::string> patch_names;
  for (const auto& p : model.patches) {
    const std::string where = "patch '" + p.name + "'";
    if (!patch_names.insert(p.name).second) err.push_back(where + ": duplicate name");
    if (!(p.area > 0.0)) err.push_back(where + ": area must be positive");
    if (std::abs(p.normal.norm() - 1.0) > 1e-9) err.push_back(where + ": normal is not unit length");
    if (p.cell_fraction < 0.0 || p.cell_fraction > 1.0) err.push_back(where + ": cell fraction outside [0,1]");
    detail::check_fractions(where, p.finish_fractions, model.finishes, report);
    if (!p.node.empty() &&
        std::none_of(model.nodes.begin(), model.nodes.end(), [&](const auto& n) { return n.name == p.node; })) {
      err.push_back(where + ": unknown node '" + p.node + "'");
    }
    if (p.string_id && std::none_of(model.strings.begin(), model.strings.end(),
                                    [&](const auto& s) { return s.id == *p.string_id; })) {
      err.push_back(where + ": unknown string '" + *p.string_id + "'");
    }
  }

  for (const auto& n : model.nodes) {
    const std::string where = "node '" + n.name + "'";
    if (!(n.mass > 0.0)) err.push_back(where + ": mass must be positive");
    if (!(n.specific_heat > 0.0)) err.push_back(where + ": specific heat must be positive");
    if (n.dissipation.sunlit < 0.0 || n.dissipation.eclipse < 0.0) {
      err.push_back(where + ": internal dissipation must be non-negative");
    }
    if (n.patches.empty()) err.push_back(where + ": no surface patches");
    for (const auto& pn : n.patches) {
      if (!patch_names.contains(pn)) err.push_back(where + ": unknown patch '" + pn + "'");
    }
  }

  std::set<std::string> string_ids;
  for (const auto& s : model.strings) {
    const std::string where = "string '" + s.id + "'";
    if (!string_ids.insert(s.id).second) err.push_back(where + ": duplicate id");
    if (s.cells_in_series < 1) err.push_back(where + ": needs at least one cell");
    if (!(s.efficiency > 0.0 && s.efficiency < 1.0)) err.push_back(where + ": efficiency outside (0,1)");
    if (!(s.cell_area > 0.0)) err.push_back(where + ": cell area must be positive");
    if (s.patches.empty()) err.push_back(where + ": references no patch");
    for (const auto& pn : s.patches) {
      if (!patch_names.contains(pn)) err.push_back(where + ": unknown patch '" + pn + "'");
    }
  }

  for (const auto& [name, panel] : model.panels) {
    const std::string where = "panel '" + name + "'";
    if (!(panel.length > 0 && panel.width > 0 && panel.thickness > 0 && panel.total_mass > 0)) {
      err.push_back(where + ": dimensions and mass must be positive");
    }
    if (!model.materials.contains(panel.material)) err.push_back(where + ": unknown material '" + panel.material + "'");
  }
  for (const auto& [name, chain] : model.chains) {
    const std::string where = "chain '" + name + "'";
    if (chain.panels.empty()) err.push_back(where + ": needs at least one panel");
    if (chain.elements_per_panel < 8) err.push_back(where + ": elements per panel must be >= 8");
    if (chain.gap < 0.0) err.push_back(where + ": gap must be non-negative");
    for (const auto& pn : chain.panels) {
      if (!model.panels.contains(pn)) err.push_back(where + ": unknown panel '" + pn + "'");
    }
    for (const auto& h : chain.hinges) {
      if (h.joint < 0 || h.joint > static_cast<int>(chain.panels.size())) {
        err.push_back(where + ": hinge joint index " + std::to_string(h.joint) + " out of range");
      }
      if (h.torsional_stiffness && !(*h.torsional_stiffness > 0.0)) {
        err.push_back(where + ": hinge stiffness must be positive");
      }
    }
  }

  const auto& req = model.requirements;
  if (!(req.min_frequency_hz > 0.0)) err.push_back("requirements: minimum frequency must be positive");
  if (!(req.allowable_factor > 0.0 && req.allowable_factor <= 1.0)) {
    err.push_back("requirements: allowable factor outside (0,1]");
  }
  if (!(req.envelope_m > 0.0)) err.push_back("requirements: envelope must be positive");
  if (!req.rail_material.empty() && !model.materials.contains(req.rail_material)) {
    err.push_back("requirements: unknown rail material '" + req.rail_material + "'");
  }
  for (const auto& band : req.temperature_bands) {
    if (!(band.min_k < band.max_k)) err.push_back("temperature band '" + band.name + "': min must be below max");
  }

  for (const auto& [name, c] : model.scenarios.cases) {
    const std::string where = "case '" + name + "'";
    if (!(c.solar_flux > 0.0)) err.push_back(where + ": solar flux must be positive");
    if (c.earth_ir < 0.0) err.push_back(where + ": Earth IR must be non-negative");
    if (c.albedo < 0.0 || c.albedo > 1.0) err.push_back(where + ": albedo outside [0,1]");
    if (!(c.albedo_correction > 0.0 && c.albedo_correction <= 1.0)) {
      err.push_back(where + ": albedo correction outside (0,1]");
    }
    if (c.beta_deg && std::abs(*c.beta_deg) > 90.0) err.push_back(where + ": beta outside [-90,90]");
  }
  for (const auto& [name, s] : model.scenarios.surfaces) {
    for (const auto& [pn, fractions] : s.overrides) {
      const std::string where = "surface '" + name + "' patch '" + pn + "'";
      if (!patch_names.contains(pn)) err.push_back(where + ": unknown patch");
      detail::check_fractions(where, fractions, model.finishes, report);
    }
  }
  const auto& att = model.scenarios.attitude;
  if (att.spin_rate_deg_s < 0.0) err.push_back("attitude: spin rate must be non-negative");
  if (std::abs(att.spin_axis.norm() - 1.0) > 1e-9) err.push_back("attitude: spin axis is not unit length");
  for (const auto* pn : {&att.sun_patch, &att.nadir_patch}) {
    if (!pn->empty() && !patch_names.contains(*pn)) err.push_back("attitude: unknown patch '" + *pn + "'");
  }
  const auto& th = model.scenarios.thermal;
  if (!(th.dt > 0.0)) err.push_back("thermal: dt must be positive");
  if (!(th.tolerance_k > 0.0)) err.push_back("thermal: tolerance must be positive");
  if (th.max_orbits < 1) err.push_back("thermal: max_orbits must be >= 1");
  if (!(th.initial_temperature_k > 0.0)) err.push_back("thermal: initial temperature must be above 0 K");
  if (!(model.scenarios.orbit.altitude_km > 0.0)) err.push_back("orbit: altitude must be positive");
  if (model.scenarios.orbit.inclination_deg < 0.0 || model.scenarios.orbit.inclination_deg > 180.0) {
    err.push_back("orbit: inclination outside [0,180]");
  }
  return report;
}

}  // namespace preflight
