#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "preflight/attitude.hpp"
#include "preflight/errors.hpp"
#include "preflight/model.hpp"

namespace preflight {

inline double cell_peak_power(double efficiency, double solar_flux, double cell_area) {
  if (efficiency < 0.0 || solar_flux < 0.0 || cell_area < 0.0) throw DomainError("cell power inputs must be >= 0");
  return efficiency * solar_flux * cell_area;
}

/// Electrical output of a string at illumination factor `factor` (cosine or orbit average).
inline double string_power(const PowerString& string, double factor, double solar_flux) {
  if (factor < 0.0 || factor > 1.0) throw DomainError("illumination factor must lie in [0,1]");
  return string.cells_in_series * cell_peak_power(string.efficiency, solar_flux, string.cell_area) * factor;
}

/// Sunlit-phase generation needed to carry `consumption` through a whole orbit.
inline double required_generation(double consumption_w, double sun_minutes, double eclipse_minutes) {
  if (!(sun_minutes > 0.0)) throw DomainError("sunlight duration must be positive");
  if (eclipse_minutes < 0.0) throw DomainError("eclipse duration must be non-negative");
  return consumption_w * (sun_minutes + eclipse_minutes) / sun_minutes;
}

/// Rounds half away from zero to a multiple of `step`, tolerating binary representation error.
inline double round_to(double value, double step) {
  const double q = value / step;
  return std::round(q + std::copysign(1e-9, q)) * step;
}

enum class PowerState { kMinimum, kMaximum };

struct StringBudget {
  std::string id;
  double peak_w = 0.0;       // full illumination at nominal flux
  double rated_w = 0.0;      // datasheet peak (falls back to peak_w)
  double spin_average_w = 0.0;
  double standby_extraction_w = 0.0;
  bool sun_orientable = false;
};

struct BudgetReport {
  double nominal_flux = 0.0;
  double max_generation_w = 0.0;
  std::vector<std::string> max_generation_strings;
  double spin_average_generation_w = 0.0;
  double sun_pointing_generation_w = 0.0;
  double consumption_w = 0.0;
  double required_generation_w = 0.0;
  double per_string_required_w = 0.0;
  double margin_w = 0.0;  // spin-average generation minus required sunlit generation
  double max_string_w = 0.0;
  double extraction_gap_w = 0.0;  // one string at full sun minus its standby share
  // Same arithmetic with intermediate values rounded as usually quoted
  // (string and required power to 0.1 W, per-string share to 0.01 W).
  double rounded_string_w = 0.0;
  double rounded_required_w = 0.0;
  double rounded_per_string_w = 0.0;
  double rounded_gap_w = 0.0;
  std::vector<StringBudget> strings;
};

inline BudgetReport budget_report(const SatelliteModel& model) {
  const auto& pw = model.scenarios.power;
  BudgetReport r;
  r.nominal_flux = pw.nominal_flux;
  r.consumption_w = pw.standby_consumption_w;
  r.required_generation_w = required_generation(pw.standby_consumption_w, pw.sun_minutes, pw.eclipse_minutes);
  const auto n = static_cast<double>(model.strings.size());
  r.per_string_required_w = model.strings.empty() ? 0.0 : r.required_generation_w / n;

  const double spin = spin_average_factor(FreeRotation{});
  std::set<std::string> counted;
  for (const auto& s : model.strings) {
    StringBudget sb;
    sb.id = s.id;
    sb.peak_w = string_power(s, 1.0, pw.nominal_flux);
    sb.rated_w = s.rated_cell_power ? s.cells_in_series * *s.rated_cell_power : sb.peak_w;
    sb.spin_average_w = string_power(s, spin, pw.nominal_flux);
    sb.standby_extraction_w = r.per_string_required_w;
    sb.sun_orientable = s.sun_orientable;
    r.spin_average_generation_w += sb.spin_average_w;
    if (s.sun_orientable && counted.insert(s.id).second) {
      r.max_generation_w += sb.rated_w;
      r.sun_pointing_generation_w += sb.peak_w;
      r.max_generation_strings.push_back(s.id);
    }
    r.max_string_w = std::max(r.max_string_w, sb.peak_w);
    r.strings.push_back(sb);
  }
  r.margin_w = r.spin_average_generation_w - r.required_generation_w;
  r.extraction_gap_w = r.max_string_w - r.per_string_required_w;

  r.rounded_string_w = round_to(r.max_string_w, 0.1);
  r.rounded_required_w = round_to(r.required_generation_w, 0.1);
  r.rounded_per_string_w = model.strings.empty() ? 0.0 : round_to(r.rounded_required_w / n, 0.01);
  r.rounded_gap_w = r.rounded_string_w - r.rounded_per_string_w;
  return r;
}

/// Electrical extraction for one string given the instantaneous illumination of
/// its patch. Standby draws the per-string share, capped by what the cells can deliver.
inline double string_extraction(const PowerString& string, PowerState state, double cos_incidence,
                                double solar_flux, double standby_share_w) {
  const double available = string_power(string, cos_incidence, solar_flux);
  return state == PowerState::kMaximum ? available : std::min(available, standby_share_w);
}

}  // namespace preflight
