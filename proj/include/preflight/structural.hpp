#pragma once

// Hinged panel chain as a 1D Euler-Bernoulli beam: modal and static solves,
// plus the simple strength/envelope gates.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "preflight/errors.hpp"
#include "preflight/model.hpp"
#include "preflight/units.hpp"

namespace preflight {

struct BeamElement {
  double x0 = 0.0;
  double length = 0.0;
  double ei = 0.0;              // N m^2
  double mu = 0.0;              // kg/m
  double half_thickness = 0.0;  // m, outer fibre distance
  double inertia = 0.0;         // m^4
  int panel = -1;               // -1 for a gap element
};

struct BeamChainModel {
  std::string name;
  BoundaryCondition bc = BoundaryCondition::kClampedFree;
  std::vector<double> node_x;
  std::vector<BeamElement> elements;
  // A value at node i splits the rotation there into two DOFs joined by a
  // torsional spring of that stiffness [N m/rad].
  std::vector<std::optional<double>> release;
  // Elastic rotational restraint replacing a clamp at either end.
  std::optional<double> root_spring;
  std::optional<double> tip_spring;
  double span = 0.0;
  double total_mass = 0.0;

  std::size_t node_count() const { return node_x.size(); }
};

namespace struct_detail {

inline Eigen::Matrix4d element_stiffness(const BeamElement& e) {
  const double l = e.length, c = e.ei / (l * l * l);
  Eigen::Matrix4d k;
  k << 12, 6 * l, -12, 6 * l,
       6 * l, 4 * l * l, -6 * l, 2 * l * l,
       -12, -6 * l, 12, -6 * l,
       6 * l, 2 * l * l, -6 * l, 4 * l * l;
  return c * k;
}

// Consistent mass.
inline Eigen::Matrix4d element_mass(const BeamElement& e) {
  const double l = e.length, c = e.mu * l / 420.0;
  Eigen::Matrix4d m;
  m << 156, 22 * l, 54, -13 * l,
       22 * l, 4 * l * l, 13 * l, -3 * l * l,
       54, 13 * l, 156, -22 * l,
       -13 * l, -3 * l * l, -22 * l, 4 * l * l;
  return c * m;
}

// Consistent nodal loads for a uniform line load q [N/m].
inline Eigen::Vector4d element_load(const BeamElement& e, double q) {
  const double l = e.length;
  return q * l * Eigen::Vector4d(0.5, l / 12.0, 0.5, -l / 12.0);
}

struct DofMap {
  std::vector<int> w;
  std::vector<int> theta_left;   // rotation seen by the element ending at the node
  std::vector<int> theta_right;  // rotation seen by the element starting at the node
  int count = 0;

  std::array<int, 4> element(std::size_t e) const {
    return {w[e], theta_right[e], w[e + 1], theta_left[e + 1]};
  }
};

inline DofMap number_dofs(const BeamChainModel& m) {
  DofMap d;
  const std::size_t n = m.node_count();
  d.w.resize(n);
  d.theta_left.resize(n);
  d.theta_right.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.w[i] = d.count++;
    d.theta_left[i] = d.count++;
    d.theta_right[i] = m.release[i] ? d.count++ : d.theta_left[i];
  }
  return d;
}

struct Assembly {
  DofMap dofs;
  Eigen::MatrixXd k;
  Eigen::MatrixXd m;
  std::vector<int> free;  // unconstrained DOF indices, ascending
};

inline Assembly assemble(const BeamChainModel& model) {
  Assembly a;
  a.dofs = number_dofs(model);
  const int n = a.dofs.count;
  a.k = Eigen::MatrixXd::Zero(n, n);
  a.m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t e = 0; e < model.elements.size(); ++e) {
    const auto idx = a.dofs.element(e);
    const Eigen::Matrix4d ke = element_stiffness(model.elements[e]);
    const Eigen::Matrix4d me = element_mass(model.elements[e]);
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        a.k(idx[r], idx[c]) += ke(r, c);
        a.m(idx[r], idx[c]) += me(r, c);
      }
    }
  }
  for (std::size_t i = 0; i < model.node_count(); ++i) {
    if (!model.release[i]) continue;
    const double s = *model.release[i];
    const int l = a.dofs.theta_left[i], r = a.dofs.theta_right[i];
    a.k(l, l) += s;
    a.k(r, r) += s;
    a.k(l, r) -= s;
    a.k(r, l) -= s;
  }

  std::set<int> fixed;
  const std::size_t last = model.node_count() - 1;
  auto clamp_end = [&](std::size_t node, int theta, const std::optional<double>& spring) {
    fixed.insert(a.dofs.w[node]);
    if (spring) a.k(theta, theta) += *spring;
    else fixed.insert(theta);
  };
  switch (model.bc) {
    case BoundaryCondition::kClampedFree:
      clamp_end(0, a.dofs.theta_right[0], model.root_spring);
      break;
    case BoundaryCondition::kClampedClamped:
      clamp_end(0, a.dofs.theta_right[0], model.root_spring);
      clamp_end(last, a.dofs.theta_left[last], model.tip_spring);
      break;
    case BoundaryCondition::kPinnedPinned:
      fixed.insert(a.dofs.w[0]);
      fixed.insert(a.dofs.w[last]);
      break;
    case BoundaryCondition::kFreeFree:
      break;
  }
  for (int i = 0; i < n; ++i) {
    if (!fixed.count(i)) a.free.push_back(i);
  }
  return a;
}

inline Eigen::MatrixXd reduce(const Eigen::MatrixXd& full, const std::vector<int>& free) {
  const auto n = static_cast<Eigen::Index>(free.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) out(r, c) = full(free[r], free[c]);
  }
  return out;
}

}  // namespace struct_detail

/// Assembles a chain from panel specs. Each panel gets `elements_per_panel`
/// elements, each gap one element. Joint k sits between panel k-1 and k
/// (0 = chain root, n = tip); a hinge at an inner joint releases the rotation
/// at the end of panel k-1, a hinge at 0 or n softens the clamp there.
inline BeamChainModel build_chain(const std::vector<PanelSpec>& panels, const std::map<std::string, Material>& materials,
                                  const ChainSpec& spec) {
  if (panels.empty()) throw DomainError("chain '" + spec.name + "' has no panels");
  if (spec.elements_per_panel < 8) throw DomainError("chain '" + spec.name + "': need at least 8 elements per panel");
  if (spec.gap < 0.0) throw DomainError("chain '" + spec.name + "': negative gap");
  const int n_panels = static_cast<int>(panels.size());

  std::map<int, std::optional<double>> hinges;
  for (const auto& h : spec.hinges) {
    if (h.joint < 0 || h.joint > n_panels)
      throw DomainError("chain '" + spec.name + "': hinge joint " + std::to_string(h.joint) + " outside 0.." +
                        std::to_string(n_panels));
    if (!hinges.emplace(h.joint, h.torsional_stiffness).second)
      throw DomainError("chain '" + spec.name + "': duplicate hinge at joint " + std::to_string(h.joint));
    if (h.torsional_stiffness && !(*h.torsional_stiffness > 0.0))
      throw DomainError("chain '" + spec.name + "': hinge stiffness must be > 0");
    const bool clamped_root = spec.bc == BoundaryCondition::kClampedFree || spec.bc == BoundaryCondition::kClampedClamped;
    if (h.joint == 0 && !clamped_root)
      throw DomainError("chain '" + spec.name + "': a root hinge needs a clamped root");
    if (h.joint == n_panels && spec.bc != BoundaryCondition::kClampedClamped)
      throw DomainError("chain '" + spec.name + "': a tip hinge needs a clamped tip");
  }

  BeamChainModel m;
  m.name = spec.name;
  m.bc = spec.bc;
  double x = 0.0;
  double raw_mass = 0.0;
  std::vector<std::size_t> joint_node(static_cast<std::size_t>(n_panels) + 1, 0);
  m.node_x.push_back(0.0);
  for (int p = 0; p < n_panels; ++p) {
    const PanelSpec& ps = panels[static_cast<std::size_t>(p)];
    if (!(ps.length > 0.0 && ps.width > 0.0 && ps.thickness > 0.0 && ps.total_mass > 0.0))
      throw DomainError("panel '" + ps.name + "': dimensions and mass must be > 0");
    auto mat = materials.find(ps.material);
    if (mat == materials.end()) throw ReferenceError("material", ps.material);
    BeamElement proto;
    proto.inertia = ps.width * std::pow(ps.thickness, 3) / 12.0;
    proto.ei = mat->second.youngs_modulus * proto.inertia;
    proto.mu = ps.total_mass / ps.length;
    proto.half_thickness = 0.5 * ps.thickness;
    proto.panel = p;

    if (p > 0 && spec.gap > 0.0) {
      const BeamElement& prev = m.elements.back();
      BeamElement gap;
      gap.x0 = x;
      gap.length = spec.gap;
      gap.ei = 0.5 * (prev.ei + proto.ei);
      gap.mu = 0.5 * (prev.mu + proto.mu);
      gap.inertia = 0.5 * (prev.inertia + proto.inertia);
      gap.half_thickness = 0.5 * (prev.half_thickness + proto.half_thickness);
      gap.panel = -1;
      m.elements.push_back(gap);
      raw_mass += gap.mu * gap.length;
      x += spec.gap;
      m.node_x.push_back(x);
    }
    const double le = ps.length / spec.elements_per_panel;
    for (int e = 0; e < spec.elements_per_panel; ++e) {
      BeamElement el = proto;
      el.x0 = x;
      el.length = le;
      m.elements.push_back(el);
      x = (e + 1 == spec.elements_per_panel) ? el.x0 + le : x + le;
      m.node_x.push_back(x);
    }
    raw_mass += ps.total_mass;
    joint_node[static_cast<std::size_t>(p) + 1] = m.node_x.size() - 1;
  }
  m.span = x;

  // Gap mass is smeared back over the chain so the total matches the panels.
  double panel_mass = 0.0;
  for (const auto& ps : panels) panel_mass += ps.total_mass;
  for (auto& e : m.elements) e.mu *= panel_mass / raw_mass;
  m.total_mass = panel_mass;

  m.release.assign(m.node_x.size(), std::nullopt);
  for (const auto& [joint, k] : hinges) {
    if (!k) continue;  // rigid
    if (joint == 0) m.root_spring = k;
    else if (joint == n_panels) m.tip_spring = k;
    else m.release[joint_node[static_cast<std::size_t>(joint)]] = k;
  }
  return m;
}

inline BeamChainModel build_chain(const SatelliteModel& model, const std::string& chain) {
  auto it = model.chains.find(chain);
  if (it == model.chains.end()) throw ReferenceError("chain", chain);
  std::vector<PanelSpec> panels;
  for (const auto& name : it->second.panels) {
    auto p = model.panels.find(name);
    if (p == model.panels.end()) throw ReferenceError("panel", name);
    panels.push_back(p->second);
  }
  return build_chain(panels, model.materials, it->second);
}

/// Uniform beam over the given node positions, used as the rigid-hinge reference.
inline BeamChainModel continuous_beam(const std::vector<double>& node_x, double ei, double mu, double half_thickness,
                                      double inertia, BoundaryCondition bc) {
  if (node_x.size() < 2) throw DomainError("beam needs at least two nodes");
  BeamChainModel m;
  m.name = "continuous";
  m.bc = bc;
  m.node_x = node_x;
  for (std::size_t i = 0; i + 1 < node_x.size(); ++i) {
    BeamElement e;
    e.x0 = node_x[i];
    e.length = node_x[i + 1] - node_x[i];
    if (!(e.length > 0.0)) throw DomainError("beam node positions must increase");
    e.ei = ei;
    e.mu = mu;
    e.half_thickness = half_thickness;
    e.inertia = inertia;
    e.panel = 0;
    m.elements.push_back(e);
  }
  m.release.assign(node_x.size(), std::nullopt);
  m.span = node_x.back() - node_x.front();
  m.total_mass = mu * m.span;
  return m;
}

struct ModalResult {
  std::vector<double> frequencies_hz;           // first n elastic modes, ascending
  std::vector<std::vector<double>> mode_shapes;  // transverse displacement per node, max |w| = 1
  int rigid_body_modes = 0;
};

inline int rigid_body_mode_count(BoundaryCondition bc) { return bc == BoundaryCondition::kFreeFree ? 2 : 0; }

inline ModalResult modal_frequencies(const BeamChainModel& model, int count) {
  if (count < 1) throw DomainError("mode count must be >= 1");
  const auto a = struct_detail::assemble(model);
  const Eigen::MatrixXd k = struct_detail::reduce(a.k, a.free);
  const Eigen::MatrixXd m = struct_detail::reduce(a.m, a.free);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, m);
  if (solver.info() != Eigen::Success) throw ConvergenceError("eigen-solve failed for chain '" + model.name + "'");

  ModalResult r;
  r.rigid_body_modes = rigid_body_mode_count(model.bc);
  const auto total = static_cast<int>(solver.eigenvalues().size());
  for (int i = r.rigid_body_modes; i < total && static_cast<int>(r.frequencies_hz.size()) < count; ++i) {
    const double lambda = std::max(solver.eigenvalues()(i), 0.0);
    r.frequencies_hz.push_back(std::sqrt(lambda) / (2.0 * std::numbers::pi));
    Eigen::VectorXd full = Eigen::VectorXd::Zero(a.dofs.count);
    for (std::size_t j = 0; j < a.free.size(); ++j) full(a.free[j]) = solver.eigenvectors()(static_cast<Eigen::Index>(j), i);
    std::vector<double> shape(model.node_count());
    double peak = 0.0;
    for (std::size_t n = 0; n < shape.size(); ++n) {
      shape[n] = full(a.dofs.w[n]);
      if (std::abs(shape[n]) > std::abs(peak) + 1e-12 * std::abs(peak)) peak = shape[n];
    }
    if (peak != 0.0) {
      for (double& v : shape) v /= peak;
    }
    r.mode_shapes.push_back(std::move(shape));
  }
  return r;
}

struct StaticResult {
  double g_level = 0.0;
  double max_deflection = 0.0;  // m, absolute
  double deflection_x = 0.0;    // m along the chain
  double max_stress = 0.0;      // Pa, outer fibre
  double stress_x = 0.0;
  double max_moment = 0.0;      // N m
  std::vector<double> deflection;  // per node, m
};

/// Uniform out-of-plane inertial load of `g_level` G.
inline StaticResult static_load(const BeamChainModel& model, double g_level) {
  if (model.bc == BoundaryCondition::kFreeFree)
    throw DomainError("singular stiffness: chain '" + model.name + "' is unconstrained");
  const auto a = struct_detail::assemble(model);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(a.dofs.count);
  for (std::size_t e = 0; e < model.elements.size(); ++e) {
    const auto idx = a.dofs.element(e);
    const Eigen::Vector4d fe = struct_detail::element_load(model.elements[e], model.elements[e].mu * g_level * constants::kStandardGravity);
    for (int r = 0; r < 4; ++r) f(idx[r]) += fe(r);
  }
  const Eigen::MatrixXd k = struct_detail::reduce(a.k, a.free);
  Eigen::VectorXd fr(static_cast<Eigen::Index>(a.free.size()));
  for (std::size_t j = 0; j < a.free.size(); ++j) fr(static_cast<Eigen::Index>(j)) = f(a.free[j]);
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) throw DomainError("singular stiffness in chain '" + model.name + "'");
  const Eigen::VectorXd ur = llt.solve(fr);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(a.dofs.count);
  for (std::size_t j = 0; j < a.free.size(); ++j) u(a.free[j]) = ur(static_cast<Eigen::Index>(j));

  StaticResult s;
  s.g_level = g_level;
  s.deflection.resize(model.node_count());
  for (std::size_t n = 0; n < model.node_count(); ++n) {
    s.deflection[n] = u(a.dofs.w[n]);
    if (std::abs(s.deflection[n]) > s.max_deflection) {
      s.max_deflection = std::abs(s.deflection[n]);
      s.deflection_x = model.node_x[n];
    }
  }
  for (std::size_t e = 0; e < model.elements.size(); ++e) {
    const auto& el = model.elements[e];
    const auto idx = a.dofs.element(e);
    Eigen::Vector4d ue;
    for (int r = 0; r < 4; ++r) ue(r) = u(idx[r]);
    const Eigen::Vector4d end_forces =
        struct_detail::element_stiffness(el) * ue - struct_detail::element_load(el, el.mu * g_level * constants::kStandardGravity);
    const double ends[2] = {std::abs(end_forces(1)), std::abs(end_forces(3))};
    for (int side = 0; side < 2; ++side) {
      const double sigma = ends[side] * el.half_thickness / el.inertia;
      if (sigma > s.max_stress) {
        s.max_stress = sigma;
        s.max_moment = ends[side];
        s.stress_x = el.x0 + (side ? el.length : 0.0);
      }
    }
  }
  return s;
}

/// Acceleration [G] at which the stress per G reaches `allowable_stress`.
inline double allowable_acceleration(double stress_per_g, double allowable_stress_pa) {
  if (allowable_stress_pa < 0.0) throw DomainError("allowable stress must be >= 0");
  if (!(stress_per_g > 0.0)) throw DomainError("no bending stress per G in the loaded direction");
  return allowable_stress_pa / stress_per_g;
}

inline double allowable_acceleration(const BeamChainModel& model, double allowable_stress_pa) {
  return allowable_acceleration(static_load(model, 1.0).max_stress, allowable_stress_pa);
}

struct StressCheck {
  double stress = 0.0;     // Pa
  double allowable = 0.0;  // Pa
  bool pass = false;
};

inline StressCheck rail_load_check(double force_n, double section_area_m2, const Material& material, double factor) {
  if (!(section_area_m2 > 0.0)) throw DomainError("rail section area must be > 0");
  StressCheck c;
  c.stress = std::abs(force_n) / section_area_m2;
  c.allowable = allowable_stress(material, factor);
  c.pass = c.stress <= c.allowable;
  return c;
}

/// Strict: the deflected panel must stay inside the envelope.
inline bool envelope_check(double deflection_m, double limit_m, double offset_m = 0.0) {
  if (!(limit_m > 0.0)) throw DomainError("envelope limit must be > 0");
  return std::abs(deflection_m) + offset_m < limit_m;
}

/// Copy of the chain spec with every hinge made rigid.
inline ChainSpec with_rigid_hinges(ChainSpec spec) {
  for (auto& h : spec.hinges) h.torsional_stiffness.reset();
  return spec;
}

struct HingeFit {
  double stiffness = 0.0;  // N m/rad, applied to every hinge of the chain
  double frequency_hz = 0.0;
  double rigid_frequency_hz = 0.0;
};

/// Log-space bisection on one common hinge stiffness so the first mode lands on
/// `target_hz`. The frequency rises monotonically with stiffness toward the rigid value.
inline HingeFit fit_hinge_stiffness(const SatelliteModel& model, const std::string& chain, double target_hz,
                                    double k_lo = 1e-4, double k_hi = 1e7) {
  auto it = model.chains.find(chain);
  if (it == model.chains.end()) throw ReferenceError("chain", chain);
  if (it->second.hinges.empty()) throw DomainError("chain '" + chain + "' has no hinges to fit");
  auto first_mode = [&](std::optional<double> k) {
    SatelliteModel m = model;
    for (auto& h : m.chains.at(chain).hinges) h.torsional_stiffness = k;
    return modal_frequencies(build_chain(m, chain), 1).frequencies_hz.front();
  };
  HingeFit fit;
  fit.rigid_frequency_hz = first_mode(std::nullopt);
  const double f_lo = first_mode(k_lo), f_hi = first_mode(k_hi);
  if (target_hz < f_lo || target_hz > f_hi)
    throw DomainError("target " + std::to_string(target_hz) + " Hz outside the reachable range [" +
                      std::to_string(f_lo) + ", " + std::to_string(f_hi) + "] Hz for chain '" + chain + "'");
  double lo = std::log(k_lo), hi = std::log(k_hi);
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (first_mode(std::exp(mid)) < target_hz) lo = mid;
    else hi = mid;
  }
  fit.stiffness = std::exp(0.5 * (lo + hi));
  fit.frequency_hz = first_mode(fit.stiffness);
  return fit;
}

}  // namespace preflight
