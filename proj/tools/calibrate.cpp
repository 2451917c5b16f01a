// Fits the finish catalog (and optionally the orbit orientation) so the
// reference thermal runs reproduce the target temperature ranges.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "preflight/calibration.hpp"
#include "preflight/config.hpp"

namespace cal = preflight::calibration;

int main(int argc, char** argv) {
  CLI::App app{"Fit surface alpha/epsilon values to reference temperature ranges"};
  std::string model_path;
  std::string write_path;
  double dt = 2.0;
  int max_evals = 800;
  int restarts = 2;
  bool fit_geometry = false;
  double lower = 0.05;
  double upper = 0.95;
  std::vector<std::string> bounds;
  bool unconstrained = false;
  app.add_option("--model", model_path, "model configuration")->required();
  app.add_option("--write", write_path, "write the model with the fitted values to this path");
  app.add_option("--dt", dt, "integration step used during the search [s]");
  app.add_option("--max-evals", max_evals, "objective evaluations per restart");
  app.add_option("--restarts", restarts, "Nelder-Mead restarts from the best point");
  app.add_option("--lower", lower, "lower bound for alpha/epsilon");
  app.add_option("--upper", upper, "upper bound for alpha/epsilon");
  app.add_option("--bound", bounds, "per-parameter box, e.g. solar_cell.alpha=0.85:0.95 (repeatable)");
  app.add_flag("--unconstrained", unconstrained, "use --lower/--upper for every finish instead of the plausible boxes");
  app.add_flag("--fit-geometry", fit_geometry, "also fit orbit RAAN, in-plane sun azimuth and hot-case beta");
  CLI11_PARSE(app, argc, argv);

  preflight::SatelliteModel model;
  try {
    model = preflight::load_model(model_path);
  } catch (const preflight::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const auto targets = cal::reference_targets();
  auto params = cal::finish_parameters(model, lower, upper);
  if (fit_geometry) {
    params.push_back({"orbit.raan", 0.0, 360.0, [](const auto& m) { return m.scenarios.orbit.raan_deg; },
                      [](auto& m, double v) { m.scenarios.orbit.raan_deg = v; }});
    params.push_back({"orbit.sun_azimuth", 0.0, 360.0,
                      [](const auto& m) { return m.scenarios.orbit.sun_azimuth_deg; },
                      [](auto& m, double v) { m.scenarios.orbit.sun_azimuth_deg = v; }});
    // Any beta beyond the eclipse limit (about 70.2 deg at 400 km) keeps the hot case in full sun.
    params.push_back({"cases.hot.beta", 70.5, 90.0,
                      [](const auto& m) { return m.scenarios.cases.at("hot").beta_deg.value_or(75.0); },
                      [](auto& m, double v) { m.scenarios.cases.at("hot").beta_deg = v; }});
  }
  if (!unconstrained) {
    const auto defaults = cal::plausible_bounds();
    bounds.insert(bounds.begin(), defaults.begin(), defaults.end());
  }
  for (const auto& spec : bounds) {
    const auto eq = spec.find('=');
    const auto colon = spec.find(':');
    if (eq == std::string::npos || colon == std::string::npos || colon < eq) {
      std::cerr << "error: malformed --bound '" << spec << "'\n";
      return 1;
    }
    const std::string name = spec.substr(0, eq);
    for (auto& p : params) {
      if (p.name == name) {
        p.lower = std::stod(spec.substr(eq + 1, colon - eq - 1));
        p.upper = std::stod(spec.substr(colon + 1));
      }
    }
  }

  std::vector<double> x0, lo, hi;
  for (const auto& p : params) {
    x0.push_back(std::clamp(p.get(model), p.lower, p.upper));
    lo.push_back(p.lower);
    hi.push_back(p.upper);
  }
  auto apply = [&](const std::vector<double>& x) {
    preflight::SatelliteModel m = model;
    for (std::size_t i = 0; i < params.size(); ++i) params[i].set(m, x[i]);
    return m;
  };
  auto run = [&](const preflight::SatelliteModel& m) {
    std::vector<cal::RangeOutcome> out;
    for (const auto& t : targets) out.push_back(cal::evaluate(m, t));
    return out;
  };
  auto cost = [&](const std::vector<double>& x) {
    auto m = apply(x);
    m.scenarios.thermal.dt = dt;
    try {
      return cal::objective(run(m));
    } catch (const preflight::Error&) {
      return 1e6;
    }
  };

  cal::FitResult fit{x0, cost(x0), 1};
  std::printf("start cost %.4f\n", fit.cost);
  for (int r = 0; r <= restarts; ++r) {
    auto next = cal::nelder_mead(cost, fit.values, lo, hi, r == 0 ? 0.15 : 0.05, max_evals);
    std::printf("pass %d: cost %.4f after %d evaluations\n", r, next.cost, next.evaluations);
    if (next.cost <= fit.cost) fit = next;
  }

  const auto fitted = apply(fit.values);
  for (std::size_t i = 0; i < params.size(); ++i) std::printf("  %-22s %.4f\n", params[i].name.c_str(), fit.values[i]);
  std::printf("verification at dt = %.3g s:\n", fitted.scenarios.thermal.dt);
  for (const auto& o : run(fitted)) {
    std::printf("  %-5s %s %-5s  [%7.2f, %7.2f] C  target [%6.1f, %6.1f] +/- %.0f  %s\n", o.target.case_name.c_str(),
                o.target.surface.c_str(), o.target.node.c_str(), o.min_c, o.max_c, o.target.min_c, o.target.max_c,
                o.target.tolerance_c, o.within() ? "ok" : "MISS");
  }

  if (!write_path.empty()) {
    std::ifstream in(model_path);
    nlohmann::ordered_json raw = nlohmann::ordered_json::parse(in);
    for (const auto& [name, f] : fitted.finishes) {
      raw["finishes"]["items"][name]["alpha"] = std::round(f.alpha * 1e4) / 1e4;
      raw["finishes"]["items"][name]["epsilon"] = std::round(f.epsilon * 1e4) / 1e4;
    }
    if (fit_geometry) {
      raw["scenarios"]["orbit"]["raan"] = std::round(fitted.scenarios.orbit.raan_deg * 10) / 10;
      raw["scenarios"]["orbit"]["sun_azimuth"] = std::round(fitted.scenarios.orbit.sun_azimuth_deg * 10) / 10;
      raw["scenarios"]["cases"]["hot"]["beta"] = std::round(*fitted.scenarios.cases.at("hot").beta_deg * 10) / 10;
    }
    std::ofstream out(write_path);
    out << raw.dump(2) << "\n";
    std::printf("wrote %s\n", write_path.c_str());
  }
  return 0;
}
