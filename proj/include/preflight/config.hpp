#pragma once

// Configuration loading and serialization.
//
// The model file is JSON with a top-level `schema_version`. Quantities are
// either bare SI numbers or strings carrying a unit suffix ("261 mm",
// "-40 C", "3518 g"). Unknown keys are rejected everywhere.

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "preflight/errors.hpp"
#include "preflight/model.hpp"
#include "preflight/units.hpp"

namespace preflight {

inline constexpr int kSchemaVersion = 1;

namespace config_detail {

using nlohmann::json;

/// Object view that records which keys were read so leftovers can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw SchemaError(path_ + ": missing key '" + key + "'");
    return j_.at(key);
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string child(const std::string& key) const { return path_ + "." + key; }
  const std::string& path() const { return path_; }

  double quantity(const std::string& key, Dimension dim) { return to_quantity(at(key), dim, child(key)); }

  double quantity_or(const std::string& key, Dimension dim, double fallback) {
    const json* v = find(key);
    return v ? to_quantity(*v, dim, child(key)) : fallback;
  }

  std::string text(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw SchemaError(child(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::string text_or(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) throw SchemaError(child(key) + ": expected a string");
    return v->get<std::string>();
  }

  int integer(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_integer()) throw SchemaError(child(key) + ": expected an integer");
    return v.get<int>();
  }

  int integer_or(const std::string& key, int fallback) { return has(key) ? integer(key) : (find(key), fallback); }

  bool boolean_or(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw SchemaError(child(key) + ": expected true/false");
    return v->get<bool>();
  }

  Eigen::Vector3d vector3(const std::string& key) { return to_vector3(at(key), child(key)); }

  std::vector<std::string> names(const std::string& key) {
    const json& v = at(key);
    return to_names(v, child(key));
  }

  std::vector<std::string> names_or_empty(const std::string& key) {
    const json* v = find(key);
    return v ? to_names(*v, child(key)) : std::vector<std::string>{};
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) throw SchemaError(path_ + ": unknown key '" + it.key() + "'");
    }
  }

  static double to_quantity(const json& v, Dimension dim, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      try {
        return parse_quantity(v.get<std::string>(), dim);
      } catch (const SchemaError& e) {
        throw SchemaError(where + ": " + e.what());
      }
    }
    throw SchemaError(where + ": expected a number or quantity string");
  }

  static Eigen::Vector3d to_vector3(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) throw SchemaError(where + ": expected a 3-element array");
    Eigen::Vector3d out;
    for (int i = 0; i < 3; ++i) {
      if (!v[i].is_number()) throw SchemaError(where + ": vector components must be numbers");
      out[i] = v[i].get<double>();
    }
    return out;
  }

  static std::vector<std::string> to_names(const json& v, const std::string& where) {
    if (!v.is_array()) throw SchemaError(where + ": expected an array of names");
    std::vector<std::string> out;
    for (const auto& e : v) {
      if (!e.is_string()) throw SchemaError(where + ": expected string entries");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline std::vector<FinishFraction> read_fractions(const json& v, const std::string& where) {
  if (!v.is_object()) throw SchemaError(where + ": expected an object of finish fractions");
  std::vector<FinishFraction> out;
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (!it.value().is_number()) throw SchemaError(where + ": fraction for '" + it.key() + "' must be a number");
    out.push_back({it.key(), it.value().get<double>()});
  }
  return out;
}

/// Reads either `finish_fractions` or a `coating` mix combined with `cell_fraction`.
inline std::vector<FinishFraction> read_patch_finish(Section& s, double cell_fraction,
                                                     const std::string& cell_finish) {
  const bool direct = s.has("finish_fractions");
  const bool coated = s.has("coating");
  if (direct == coated) {
    throw SchemaError(s.path() + ": exactly one of 'finish_fractions' or 'coating' is required");
  }
  std::vector<FinishFraction> out;
  if (direct) {
    out = read_fractions(s.at("finish_fractions"), s.child("finish_fractions"));
  } else {
    auto coating = read_fractions(s.at("coating"), s.child("coating"));
    if (cell_fraction > 0.0 && cell_finish.empty()) {
      throw SchemaError(s.path() + ": 'coating' with solar cells needs finishes.cell_finish");
    }
    out = compose_finish(cell_finish, cell_fraction, coating);
  }
  // canonical order, so a written model reads back identical
  std::ranges::sort(out, {}, &FinishFraction::finish);
  return out;
}

inline BoundaryCondition parse_bc(const std::string& text, const std::string& where) {
  if (text == "clamped_free") return BoundaryCondition::kClampedFree;
  if (text == "pinned_pinned") return BoundaryCondition::kPinnedPinned;
  if (text == "clamped_clamped") return BoundaryCondition::kClampedClamped;
  if (text == "free_free") return BoundaryCondition::kFreeFree;
  throw SchemaError(where + ": unknown boundary condition '" + text + "'");
}

inline std::string bc_name(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::kClampedFree: return "clamped_free";
    case BoundaryCondition::kPinnedPinned: return "pinned_pinned";
    case BoundaryCondition::kClampedClamped: return "clamped_clamped";
    case BoundaryCondition::kFreeFree: return "free_free";
  }
  return "clamped_free";
}

inline EclipseModel parse_eclipse(const std::string& text, const std::string& where) {
  if (text == "geom") return EclipseModel::kGeometric;
  if (text == "fixed60_30") return EclipseModel::kFixed60_30;
  throw SchemaError(where + ": unknown eclipse model '" + text + "'");
}

inline std::string eclipse_name(EclipseModel m) {
  return m == EclipseModel::kGeometric ? "geom" : "fixed60_30";
}

inline void read_materials(const json& j, SatelliteModel& model) {
  if (!j.is_object()) throw SchemaError("materials: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    Section s(it.value(), "materials." + it.key());
    Material m;
    m.name = it.key();
    m.youngs_modulus = s.quantity("youngs_modulus", Dimension::kPressure);
    m.density = s.quantity("density", Dimension::kDensity);
    m.tensile_strength = s.quantity("tensile_strength", Dimension::kPressure);
    m.specific_heat = s.quantity("specific_heat", Dimension::kDimensionless);
    m.conductivity = s.quantity("conductivity", Dimension::kDimensionless);
    m.allowable_factor = s.quantity_or("allowable_factor", Dimension::kDimensionless, 0.30);
    s.finish();
    model.materials.emplace(m.name, m);
  }
}

inline std::string read_finishes(const json& j, SatelliteModel& model) {
  Section s(j, "finishes");
  model.finish_catalog_note = s.text_or("note", "");
  std::string cell_finish = s.text_or("cell_finish", "");
  const json& items = s.at("items");
  if (!items.is_object()) throw SchemaError("finishes.items: expected an object");
  for (auto it = items.begin(); it != items.end(); ++it) {
    Section f(it.value(), "finishes.items." + it.key());
    SurfaceFinish finish{it.key(), f.quantity("alpha", Dimension::kDimensionless),
                         f.quantity("epsilon", Dimension::kDimensionless)};
    f.text_or("note", "");
    f.finish();
    model.finishes.emplace(finish.name, finish);
  }
  s.finish();
  if (!cell_finish.empty() && !model.finishes.contains(cell_finish)) throw ReferenceError("finish", cell_finish);
  return cell_finish;
}

inline void read_nodes(const json& j, SatelliteModel& model) {
  if (!j.is_object()) throw SchemaError("nodes: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    Section s(it.value(), "nodes." + it.key());
    ThermalNodeSpec n;
    n.name = it.key();
    n.mass = s.quantity("mass", Dimension::kMass);
    n.material = s.text_or("material", "");
    if (s.has("specific_heat")) {
      n.specific_heat = s.quantity("specific_heat", Dimension::kDimensionless);
    } else if (!n.material.empty()) {
      auto m = model.materials.find(n.material);
      if (m == model.materials.end()) throw ReferenceError("material", n.material);
      n.specific_heat = m->second.specific_heat;
    } else {
      throw SchemaError(s.path() + ": needs 'specific_heat' or 'material'");
    }
    if (const json* d = s.find("dissipation")) {
      if (d->is_object()) {
        Section ds(*d, s.child("dissipation"));
        n.dissipation.sunlit = ds.quantity("sunlit", Dimension::kPower);
        n.dissipation.eclipse = ds.quantity("eclipse", Dimension::kPower);
        ds.finish();
      } else {
        n.dissipation.sunlit = n.dissipation.eclipse =
            Section::to_quantity(*d, Dimension::kPower, s.child("dissipation"));
      }
    }
    s.finish();
    model.nodes.push_back(std::move(n));
  }
}

inline void read_patches(const json& j, SatelliteModel& model, const std::string& cell_finish) {
  if (!j.is_object()) throw SchemaError("patches: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    Section s(it.value(), "patches." + it.key());
    SurfacePatch p;
    p.name = it.key();
    p.node = s.text_or("node", "");
    if (s.has("area") == s.has("size")) throw SchemaError(s.path() + ": exactly one of 'area' or 'size' is required");
    if (s.has("area")) {
      p.area = s.quantity("area", Dimension::kArea);
    } else {
      const json& size = s.at("size");
      if (!size.is_array() || size.size() != 2) throw SchemaError(s.child("size") + ": expected [length, width]");
      p.area = Section::to_quantity(size[0], Dimension::kLength, s.child("size")) *
               Section::to_quantity(size[1], Dimension::kLength, s.child("size"));
    }
    p.normal = s.vector3("normal");
    p.cell_fraction = s.quantity_or("cell_fraction", Dimension::kDimensionless, 0.0);
    p.finish_fractions = read_patch_finish(s, p.cell_fraction, cell_finish);
    if (const json* sid = s.find("string")) {
      if (!sid->is_string()) throw SchemaError(s.child("string") + ": expected a string id");
      p.string_id = sid->get<std::string>();
    }
    s.finish();
    for (const auto& ff : p.finish_fractions) {
      if (!model.finishes.contains(ff.finish)) throw ReferenceError("finish", ff.finish);
    }
    model.patches.push_back(std::move(p));
  }
  // Node membership follows from each patch's owner.
  for (auto& n : model.nodes) {
    for (const auto& p : model.patches) {
      if (p.node == n.name) n.patches.push_back(p.name);
    }
  }
  for (const auto& p : model.patches) {
    if (!p.node.empty() &&
        std::none_of(model.nodes.begin(), model.nodes.end(), [&](const auto& n) { return n.name == p.node; })) {
      throw ReferenceError("node", p.node);
    }
  }
}

inline void read_strings(const json& j, SatelliteModel& model) {
  if (!j.is_object()) throw SchemaError("strings: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    Section s(it.value(), "strings." + it.key());
    PowerString ps;
    ps.id = it.key();
    ps.cells_in_series = s.integer("cells_in_series");
    ps.cell_area = s.quantity("cell_area", Dimension::kArea);
    ps.efficiency = s.quantity("efficiency", Dimension::kDimensionless);
    ps.patches = s.names("patches");
    if (s.has("rated_cell_power")) ps.rated_cell_power = s.quantity("rated_cell_power", Dimension::kPower);
    ps.sun_orientable = s.boolean_or("sun_orientable", false);
    s.finish();
    for (const auto& pn : ps.patches) {
      if (std::none_of(model.patches.begin(), model.patches.end(), [&](const auto& p) { return p.name == pn; })) {
        throw ReferenceError("patch", pn);
      }
    }
    model.strings.push_back(std::move(ps));
  }
}

inline void read_panels(const json& j, SatelliteModel& model) {
  Section s(j, "panels");
  if (const json* items = s.find("items")) {
    if (!items->is_object()) throw SchemaError("panels.items: expected an object");
    for (auto it = items->begin(); it != items->end(); ++it) {
      Section ps(it.value(), "panels.items." + it.key());
      PanelSpec p;
      p.name = it.key();
      p.length = ps.quantity("length", Dimension::kLength);
      p.width = ps.quantity("width", Dimension::kLength);
      p.thickness = ps.quantity("thickness", Dimension::kLength);
      p.material = ps.text("material");
      p.total_mass = ps.quantity("total_mass", Dimension::kMass);
      ps.finish();
      if (!model.materials.contains(p.material)) throw ReferenceError("material", p.material);
      model.panels.emplace(p.name, p);
    }
  }
  if (const json* chains = s.find("chains")) {
    if (!chains->is_object()) throw SchemaError("panels.chains: expected an object");
    for (auto it = chains->begin(); it != chains->end(); ++it) {
      Section cs(it.value(), "panels.chains." + it.key());
      ChainSpec c;
      c.name = it.key();
      c.panels = cs.names("panels");
      c.gap = cs.quantity_or("gap", Dimension::kLength, 0.0);
      c.bc = parse_bc(cs.text_or("bc", "clamped_free"), cs.child("bc"));
      c.elements_per_panel = cs.integer_or("elements_per_panel", 16);
      if (const json* hinges = cs.find("hinges")) {
        if (!hinges->is_array()) throw SchemaError(cs.child("hinges") + ": expected an array");
        for (const auto& h : *hinges) {
          Section hs(h, cs.child("hinges[]"));
          HingeSpec hinge;
          hinge.joint = hs.integer("joint");
          const json& k = hs.at("stiffness");
          if (k.is_string() && k.get<std::string>() == "rigid") {
            hinge.torsional_stiffness.reset();
          } else {
            hinge.torsional_stiffness = Section::to_quantity(k, Dimension::kDimensionless, hs.child("stiffness"));
          }
          hs.finish();
          c.hinges.push_back(hinge);
        }
      }
      cs.finish();
      for (const auto& pn : c.panels) {
        if (!model.panels.contains(pn)) throw ReferenceError("panel", pn);
      }
      model.chains.emplace(c.name, c);
    }
  }
  s.finish();
}

inline void read_requirements(const json& j, SatelliteModel& model) {
  Section s(j, "requirements");
  auto& r = model.requirements;
  r.min_frequency_hz = s.quantity_or("min_frequency", Dimension::kFrequency, r.min_frequency_hz);
  r.allowable_factor = s.quantity_or("allowable_factor", Dimension::kDimensionless, r.allowable_factor);
  r.quasi_static_g = s.quantity_or("quasi_static_g", Dimension::kDimensionless, r.quasi_static_g);
  r.rail_load_n = s.quantity_or("rail_load", Dimension::kDimensionless, r.rail_load_n);
  if (const json* sec = s.find("rail_section")) {
    if (!sec->is_array() || sec->size() != 2) throw SchemaError(s.child("rail_section") + ": expected [width, depth]");
    r.rail_section_width = Section::to_quantity((*sec)[0], Dimension::kLength, s.child("rail_section"));
    r.rail_section_depth = Section::to_quantity((*sec)[1], Dimension::kLength, s.child("rail_section"));
  }
  r.rail_material = s.text_or("rail_material", "");
  if (!r.rail_material.empty() && !model.materials.contains(r.rail_material)) {
    throw ReferenceError("material", r.rail_material);
  }
  r.envelope_m = s.quantity_or("envelope", Dimension::kLength, r.envelope_m);
  if (const json* bands = s.find("temperature_bands")) {
    if (!bands->is_object()) throw SchemaError(s.child("temperature_bands") + ": expected an object");
    for (auto it = bands->begin(); it != bands->end(); ++it) {
      Section bs(it.value(), s.child("temperature_bands." + it.key()));
      TemperatureBand b;
      b.name = it.key();
      b.min_k = bs.quantity("min", Dimension::kTemperature);
      b.max_k = bs.quantity("max", Dimension::kTemperature);
      b.nodes = bs.names_or_empty("nodes");
      bs.finish();
      r.temperature_bands.push_back(std::move(b));
    }
  }
  if (const json* ref = s.find("reference_results")) {
    Section rs(*ref, s.child("reference_results"));
    if (rs.has("first_frequency")) r.reference_first_frequency_hz = rs.quantity("first_frequency", Dimension::kFrequency);
    if (rs.has("max_stress")) r.reference_max_stress_pa = rs.quantity("max_stress", Dimension::kPressure);
    rs.finish();
  }
  s.finish();
}

inline void read_scenarios(const json& j, SatelliteModel& model, const std::string& cell_finish) {
  Section s(j, "scenarios");
  auto& sc = model.scenarios;
  if (const json* o = s.find("orbit")) {
    Section os(*o, "scenarios.orbit");
    sc.orbit.altitude_km = os.quantity_or("altitude", Dimension::kLength, sc.orbit.altitude_km * 1e3) / 1e3;
    sc.orbit.inclination_deg = os.quantity_or("inclination", Dimension::kDimensionless, sc.orbit.inclination_deg);
    sc.orbit.raan_deg = os.quantity_or("raan", Dimension::kDimensionless, sc.orbit.raan_deg);
    sc.orbit.sun_azimuth_deg = os.quantity_or("sun_azimuth", Dimension::kDimensionless, sc.orbit.sun_azimuth_deg);
    os.finish();
  }
  if (const json* cases = s.find("cases")) {
    if (!cases->is_object()) throw SchemaError("scenarios.cases: expected an object");
    for (auto it = cases->begin(); it != cases->end(); ++it) {
      Section cs(it.value(), "scenarios.cases." + it.key());
      EnvCase c;
      c.name = it.key();
      c.solar_flux = cs.quantity("solar_flux", Dimension::kDimensionless);
      c.earth_ir = cs.quantity_or("earth_ir", Dimension::kDimensionless, 0.0);
      c.albedo = cs.quantity_or("albedo", Dimension::kDimensionless, 0.0);
      c.albedo_correction = cs.quantity_or("albedo_correction", Dimension::kDimensionless, 0.998);
      if (cs.has("beta")) c.beta_deg = cs.quantity("beta", Dimension::kDimensionless);
      cs.finish();
      sc.cases[c.name] = c;
    }
  }
  if (const json* surfaces = s.find("surfaces")) {
    if (!surfaces->is_object()) throw SchemaError("scenarios.surfaces: expected an object");
    for (auto it = surfaces->begin(); it != surfaces->end(); ++it) {
      SurfaceConfig cfg;
      cfg.name = it.key();
      const std::string where = "scenarios.surfaces." + it.key();
      if (!it.value().is_object()) throw SchemaError(where + ": expected an object");
      for (auto pit = it.value().begin(); pit != it.value().end(); ++pit) {
        auto patch = std::find_if(model.patches.begin(), model.patches.end(),
                                  [&](const auto& p) { return p.name == pit.key(); });
        if (patch == model.patches.end()) throw ReferenceError("patch", pit.key());
        Section ps(pit.value(), where + "." + pit.key());
        auto fractions = read_patch_finish(ps, patch->cell_fraction, cell_finish);
        ps.finish();
        for (const auto& ff : fractions) {
          if (!model.finishes.contains(ff.finish)) throw ReferenceError("finish", ff.finish);
        }
        cfg.overrides[pit.key()] = std::move(fractions);
      }
      sc.surfaces[cfg.name] = std::move(cfg);
    }
  }
  if (const json* a = s.find("attitude")) {
    Section as(*a, "scenarios.attitude");
    sc.attitude.spin_rate_deg_s = as.quantity_or("spin_rate", Dimension::kDimensionless, sc.attitude.spin_rate_deg_s);
    if (as.has("spin_axis")) {
      Eigen::Vector3d axis = as.vector3("spin_axis");
      if (!(axis.norm() > 0.0)) throw SchemaError("scenarios.attitude.spin_axis: zero vector");
      sc.attitude.spin_axis = std::abs(axis.norm() - 1.0) > 1e-12 ? Eigen::Vector3d(axis.normalized()) : axis;
    }
    sc.attitude.lock_spin_to_orbit = as.boolean_or("lock_spin_to_orbit", sc.attitude.lock_spin_to_orbit);
    sc.attitude.sun_patch = as.text_or("sun_patch", "");
    sc.attitude.nadir_patch = as.text_or("nadir_patch", "");
    as.finish();
  }
  if (const json* t = s.find("thermal")) {
    Section ts(*t, "scenarios.thermal");
    auto& th = sc.thermal;
    th.dt = ts.quantity_or("dt", Dimension::kDimensionless, th.dt);
    th.tolerance_k = ts.quantity_or("tolerance", Dimension::kDimensionless, th.tolerance_k);
    th.max_orbits = ts.integer_or("max_orbits", th.max_orbits);
    th.initial_temperature_k = ts.quantity_or("initial_temperature", Dimension::kTemperature, th.initial_temperature_k);
    th.eclipse = parse_eclipse(ts.text_or("eclipse", "geom"), "scenarios.thermal.eclipse");
    ts.finish();
  }
  if (const json* p = s.find("power")) {
    Section ps(*p, "scenarios.power");
    auto& pw = sc.power;
    pw.standby_consumption_w = ps.quantity_or("standby_consumption", Dimension::kPower, pw.standby_consumption_w);
    pw.sun_minutes = ps.quantity_or("sun_minutes", Dimension::kDimensionless, pw.sun_minutes);
    pw.eclipse_minutes = ps.quantity_or("eclipse_minutes", Dimension::kDimensionless, pw.eclipse_minutes);
    pw.nominal_flux = ps.quantity_or("nominal_flux", Dimension::kDimensionless, pw.nominal_flux);
    ps.finish();
  }
  s.finish();
}

inline json fractions_json(const std::vector<FinishFraction>& fractions) {
  json out = json::object();
  for (const auto& ff : fractions) out[ff.finish] = ff.fraction;
  return out;
}

inline json vec_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace config_detail

/// Parses a model from configuration text.
inline SatelliteModel parse_model(const std::string& text) {
  using config_detail::json;
  using config_detail::Section;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed configuration: ") + e.what());
  }
  Section s(root, "model");
  SatelliteModel model;
  model.schema_version = s.integer("schema_version");
  if (model.schema_version != kSchemaVersion) {
    throw SchemaError("unsupported schema_version " + std::to_string(model.schema_version));
  }
  model.name = s.text_or("name", "");
  config_detail::read_materials(s.at("materials"), model);
  const std::string cell_finish = config_detail::read_finishes(s.at("finishes"), model);
  config_detail::read_nodes(s.at("nodes"), model);
  config_detail::read_patches(s.at("patches"), model, cell_finish);
  if (const auto* j = s.find("strings")) config_detail::read_strings(*j, model);
  for (const auto& p : model.patches) {
    if (p.string_id && std::none_of(model.strings.begin(), model.strings.end(),
                                    [&](const auto& ps) { return ps.id == *p.string_id; })) {
      throw ReferenceError("string", *p.string_id);
    }
  }
  if (const auto* j = s.find("panels")) config_detail::read_panels(*j, model);
  if (const auto* j = s.find("requirements")) config_detail::read_requirements(*j, model);
  if (const auto* j = s.find("scenarios")) config_detail::read_scenarios(*j, model, cell_finish);
  s.finish();
  return model;
}

inline SatelliteModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

/// Serializes a model to configuration JSON (SI units, explicit finish fractions).
inline nlohmann::json model_to_json(const SatelliteModel& model) {
  using config_detail::fractions_json;
  using config_detail::json;
  using config_detail::vec_json;
  json root;
  root["schema_version"] = model.schema_version;
  root["name"] = model.name;
  json& materials = root["materials"] = json::object();
  for (const auto& [name, m] : model.materials) {
    materials[name] = {{"youngs_modulus", m.youngs_modulus}, {"density", m.density},
                       {"tensile_strength", m.tensile_strength}, {"specific_heat", m.specific_heat},
                       {"conductivity", m.conductivity}, {"allowable_factor", m.allowable_factor}};
  }
  json finishes = {{"items", json::object()}};
  if (!model.finish_catalog_note.empty()) finishes["note"] = model.finish_catalog_note;
  for (const auto& [name, f] : model.finishes) finishes["items"][name] = {{"alpha", f.alpha}, {"epsilon", f.epsilon}};
  root["finishes"] = finishes;
  json& nodes = root["nodes"] = json::object();
  for (const auto& n : model.nodes) {
    json jn = {{"mass", n.mass}, {"specific_heat", n.specific_heat},
               {"dissipation", {{"sunlit", n.dissipation.sunlit}, {"eclipse", n.dissipation.eclipse}}}};
    if (!n.material.empty()) jn["material"] = n.material;
    nodes[n.name] = jn;
  }
  json& patches = root["patches"] = json::object();
  for (const auto& p : model.patches) {
    json jp = {{"area", p.area}, {"normal", vec_json(p.normal)}, {"cell_fraction", p.cell_fraction},
               {"finish_fractions", fractions_json(p.finish_fractions)}};
    if (!p.node.empty()) jp["node"] = p.node;
    if (p.string_id) jp["string"] = *p.string_id;
    patches[p.name] = jp;
  }
  json& strings = root["strings"] = json::object();
  for (const auto& s : model.strings) {
    json js = {{"cells_in_series", s.cells_in_series}, {"cell_area", s.cell_area}, {"efficiency", s.efficiency},
               {"patches", s.patches}, {"sun_orientable", s.sun_orientable}};
    if (s.rated_cell_power) js["rated_cell_power"] = *s.rated_cell_power;
    strings[s.id] = js;
  }
  json panels = {{"items", json::object()}, {"chains", json::object()}};
  for (const auto& [name, p] : model.panels) {
    panels["items"][name] = {{"length", p.length}, {"width", p.width}, {"thickness", p.thickness},
                             {"material", p.material}, {"total_mass", p.total_mass}};
  }
  for (const auto& [name, c] : model.chains) {
    json hinges = json::array();
    for (const auto& h : c.hinges) {
      hinges.push_back({{"joint", h.joint},
                        {"stiffness", h.torsional_stiffness ? json(*h.torsional_stiffness) : json("rigid")}});
    }
    panels["chains"][name] = {{"panels", c.panels}, {"gap", c.gap}, {"bc", config_detail::bc_name(c.bc)},
                              {"elements_per_panel", c.elements_per_panel}, {"hinges", hinges}};
  }
  root["panels"] = panels;
  const auto& r = model.requirements;
  json req = {{"min_frequency", r.min_frequency_hz},
              {"allowable_factor", r.allowable_factor},
              {"quasi_static_g", r.quasi_static_g},
              {"rail_load", r.rail_load_n},
              {"rail_section", {r.rail_section_width, r.rail_section_depth}},
              {"envelope", r.envelope_m},
              {"temperature_bands", json::object()}};
  if (!r.rail_material.empty()) req["rail_material"] = r.rail_material;
  for (const auto& b : r.temperature_bands) {
    req["temperature_bands"][b.name] = {{"min", b.min_k}, {"max", b.max_k}, {"nodes", b.nodes}};
  }
  if (r.reference_first_frequency_hz || r.reference_max_stress_pa) {
    json ref = json::object();
    if (r.reference_first_frequency_hz) ref["first_frequency"] = *r.reference_first_frequency_hz;
    if (r.reference_max_stress_pa) ref["max_stress"] = *r.reference_max_stress_pa;
    req["reference_results"] = ref;
  }
  root["requirements"] = req;
  const auto& sc = model.scenarios;
  json scen;
  scen["orbit"] = {{"altitude", sc.orbit.altitude_km * 1e3},
                   {"inclination", sc.orbit.inclination_deg},
                   {"raan", sc.orbit.raan_deg},
                   {"sun_azimuth", sc.orbit.sun_azimuth_deg}};
  scen["cases"] = json::object();
  for (const auto& [name, c] : sc.cases) {
    json jc = {{"solar_flux", c.solar_flux}, {"earth_ir", c.earth_ir}, {"albedo", c.albedo},
               {"albedo_correction", c.albedo_correction}};
    if (c.beta_deg) jc["beta"] = *c.beta_deg;
    scen["cases"][name] = jc;
  }
  scen["surfaces"] = json::object();
  for (const auto& [name, cfg] : sc.surfaces) {
    json js = json::object();
    for (const auto& [pn, fractions] : cfg.overrides) js[pn] = {{"finish_fractions", fractions_json(fractions)}};
    scen["surfaces"][name] = js;
  }
  json att = {{"spin_rate", sc.attitude.spin_rate_deg_s},
              {"spin_axis", vec_json(sc.attitude.spin_axis)},
              {"lock_spin_to_orbit", sc.attitude.lock_spin_to_orbit}};
  if (!sc.attitude.sun_patch.empty()) att["sun_patch"] = sc.attitude.sun_patch;
  if (!sc.attitude.nadir_patch.empty()) att["nadir_patch"] = sc.attitude.nadir_patch;
  scen["attitude"] = att;
  scen["thermal"] = {{"dt", sc.thermal.dt},
                     {"tolerance", sc.thermal.tolerance_k},
                     {"max_orbits", sc.thermal.max_orbits},
                     {"initial_temperature", sc.thermal.initial_temperature_k},
                     {"eclipse", config_detail::eclipse_name(sc.thermal.eclipse)}};
  scen["power"] = {{"standby_consumption", sc.power.standby_consumption_w},
                   {"sun_minutes", sc.power.sun_minutes},
                   {"eclipse_minutes", sc.power.eclipse_minutes},
                   {"nominal_flux", sc.power.nominal_flux}};
  root["scenarios"] = scen;
  return root;
}

}  // namespace preflight
