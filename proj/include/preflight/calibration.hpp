#pragma once

// Finish-catalog calibration against reference temperature ranges.
//
// The surface alpha/epsilon values are fitted so that a handful of converged
// single-node runs land on target min/max temperatures. The fit is a plain
// Nelder-Mead search over a box-bounded parameter vector.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "preflight/model.hpp"
#include "preflight/thermal.hpp"

namespace preflight::calibration {

struct RangeTarget {
  std::string case_name;
  std::string surface;
  std::string node;
  double min_c = 0.0;
  double max_c = 0.0;
  double tolerance_c = 5.0;
};

struct RangeOutcome {
  RangeTarget target;
  double min_c = 0.0;
  double max_c = 0.0;
  bool within() const {
    return std::abs(min_c - target.min_c) <= target.tolerance_c && std::abs(max_c - target.max_c) <= target.tolerance_c;
  }
};

/// Reference ranges: DSAP with configuration (a), BODY with configuration (d),
/// full-sun hot case and beta = 0 cold case, free rotation, standby power.
inline std::vector<RangeTarget> reference_targets() {
  return {
      {"hot", "a", "DSAP", 34.0, 68.0, 5.0},
      {"cold", "a", "DSAP", -43.0, 55.0, 5.0},
      {"hot", "d", "BODY", 46.0, 49.0, 3.0},
      {"cold", "d", "BODY", 0.0, 15.0, 3.0},
  };
}

inline RangeOutcome evaluate(const SatelliteModel& model, const RangeTarget& target) {
  const SatelliteModel m = with_surface(model, target.surface);
  ThermalSimulator sim(m, make_scenario(m, target.case_name, "spin", "min"));
  const auto result = sim.run_periodic();
  for (const auto& h : result.histories) {
    if (h.node == target.node) {
      const auto s = summarize(h, {});
      return {target, kelvin_to_celsius(s.t_min_k), kelvin_to_celsius(s.t_max_k)};
    }
  }
  throw ReferenceError("node", target.node);
}

/// One tunable scalar: either a finish alpha/epsilon or an orbit angle.
struct Parameter {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  std::function<double(const SatelliteModel&)> get;
  std::function<void(SatelliteModel&, double)> set;
};

inline std::vector<Parameter> finish_parameters(const SatelliteModel& model, double lower = 0.05,
                                                double upper = 0.95) {
  std::vector<Parameter> out;
  for (const auto& [name, f] : model.finishes) {
    const std::string n = name;
    out.push_back({n + ".alpha", lower, upper, [n](const SatelliteModel& m) { return m.finishes.at(n).alpha; },
                   [n](SatelliteModel& m, double v) { m.finishes.at(n).alpha = v; }});
    out.push_back({n + ".epsilon", lower, upper, [n](const SatelliteModel& m) { return m.finishes.at(n).epsilon; },
                   [n](SatelliteModel& m, double v) { m.finishes.at(n).epsilon = v; }});
  }
  return out;
}

/// Physically plausible search boxes for the finishes shipped with the
/// reference model, as "name=lower:upper".
inline std::vector<std::string> plausible_bounds() {
  return {
      "solar_cell.alpha=0.85:0.95", "solar_cell.epsilon=0.80:0.90",  // triple-junction cell with cover glass
      "fr4.alpha=0.50:0.95",        "fr4.epsilon=0.80:0.95",
      "aluminum.alpha=0.30:0.60",   "aluminum.epsilon=0.05:0.30",    // chromate-converted aluminum
      "polyimide.alpha=0.30:0.60",  "polyimide.epsilon=0.50:0.85",   // polyimide tape on aluminum
  };
}

/// Sum of squared misses normalised by each target's tolerance.
inline double objective(const std::vector<RangeOutcome>& outcomes) {
  double sum = 0.0;
  for (const auto& o : outcomes) {
    const double a = (o.min_c - o.target.min_c) / o.target.tolerance_c;
    const double b = (o.max_c - o.target.max_c) / o.target.tolerance_c;
    sum += a * a + b * b;
  }
  return sum;
}

struct FitResult {
  std::vector<double> values;
  double cost = 0.0;
  int evaluations = 0;
};

/// Box-constrained Nelder-Mead (the cost is evaluated on clamped coordinates).
inline FitResult nelder_mead(const std::function<double(const std::vector<double>&)>& cost,
                             std::vector<double> start, const std::vector<double>& lower,
                             const std::vector<double>& upper, double step = 0.1, int max_evaluations = 600,
                             double ftol = 1e-6) {
  const std::size_t n = start.size();
  auto clamp = [&](std::vector<double> x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
    return x;
  };
  int evals = 0;
  auto f = [&](const std::vector<double>& x) {
    ++evals;
    return cost(clamp(x));
  };
  std::vector<std::vector<double>> simplex(n + 1, clamp(start));
  for (std::size_t i = 0; i < n; ++i) {
    const double span = (upper[i] - lower[i]) * step;
    simplex[i + 1][i] += simplex[i + 1][i] + span > upper[i] ? -span : span;
  }
  std::vector<double> fx(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fx[i] = f(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  while (evals < max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    if (std::abs(fx[worst] - fx[best]) < ftol) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t d = 0; d < n; ++d) x[d] = clamp(centroid)[d] + t * (simplex[worst][d] - centroid[d]);
      return clamp(x);
    };
    const auto xr = along(-1.0);
    const double fr = f(xr);
    if (fr < fx[best]) {
      const auto xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fx[worst] = fe;
      } else {
        simplex[worst] = xr;
        fx[worst] = fr;
      }
    } else if (fr < fx[second]) {
      simplex[worst] = xr;
      fx[worst] = fr;
    } else {
      const auto xc = fr < fx[worst] ? along(-0.5) : along(0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, fx[worst])) {
        simplex[worst] = xc;
        fx[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t d = 0; d < n; ++d) simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
          simplex[i] = clamp(simplex[i]);
          fx[i] = f(simplex[i]);
        }
      }
    }
  }
  const auto it = std::min_element(fx.begin(), fx.end());
  return {clamp(simplex[static_cast<std::size_t>(it - fx.begin())]), *it, evals};
}

}  // namespace preflight::calibration
