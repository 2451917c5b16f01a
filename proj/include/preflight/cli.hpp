#pragma once

// Command-line front end. Exit codes: 0 ok, 1 input/validation error,
// 2 requirement check failed, 3 numerical non-convergence.

#include <atomic>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "preflight/config.hpp"
#include "preflight/power.hpp"
#include "preflight/report.hpp"
#include "preflight/structural.hpp"
#include "preflight/thermal.hpp"
#include "preflight/vibration.hpp"

namespace preflight::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitRequirement = 2;
inline constexpr int kExitNotConverged = 3;

struct ModelSource {
  SatelliteModel model;
  std::string path;
  std::string sha256;
};

inline ModelSource load_checked(const std::string& path, std::ostream& err) {
  ModelSource src;
  src.path = path;
  const std::string bytes = read_file_bytes(path);
  src.sha256 = sha256_hex(bytes);
  src.model = parse_model(bytes);
  const auto report = validate_model(src.model);
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  if (!report.usable()) {
    std::string msg = path + ": invalid model";
    for (const auto& e : report.errors) msg += "\n  " + e;
    throw SchemaError(msg);
  }
  return src;
}

inline EclipseModel parse_eclipse(const std::string& name) {
  if (name == "geom") return EclipseModel::kGeometric;
  if (name == "fixed60_30") return EclipseModel::kFixed60_30;
  throw ReferenceError("eclipse model", name);
}

inline std::string fmt(double v, int precision) { return num(v, precision); }

/// Writes summary.json and manifest.json into `out`.
inline void emit(const std::filesystem::path& out, const std::string& command, int code, const Json& results,
                 const RunManifest& manifest) {
  write_json(out / "summary.json", summary_envelope(command, code, results));
  write_json(out / "manifest.json", manifest_json(manifest, utc_timestamp()));
}

inline RunManifest manifest_for(const std::string& command, const std::string& scenario, const ModelSource* src) {
  RunManifest m;
  m.command = command;
  m.scenario = scenario;
  if (src) {
    m.model_path = src->path;
    m.model_sha256 = src->sha256;
  }
  return m;
}

// ---------------------------------------------------------------------------
// thermal / sweep

struct ThermalFlags {
  std::string model;
  std::string case_name = "hot";
  std::string surface;
  std::string mode = "spin";
  std::string power = "min";
  std::optional<double> dt;
  std::optional<std::string> eclipse;
  std::string out = "preflight-out";
};

inline SatelliteModel apply_overrides(SatelliteModel m, const std::string& surface, const std::optional<double>& dt,
                                      const std::optional<std::string>& eclipse) {
  if (!surface.empty()) m = with_surface(m, surface);
  if (dt) {
    if (!(*dt > 0.0)) throw DomainError("--dt must be > 0");
    m.scenarios.thermal.dt = *dt;
  }
  if (eclipse) m.scenarios.thermal.eclipse = parse_eclipse(*eclipse);
  return m;
}

struct ThermalRun {
  ThermalScenario scenario;
  PeriodicResult result;
  std::vector<NodeSummary> summaries;
  bool bands_pass = true;
};

inline ThermalRun run_thermal_case(const SatelliteModel& model, const std::string& case_name, const std::string& mode,
                                   const std::string& power) {
  ThermalRun run;
  run.scenario = make_scenario(model, case_name, mode, power);
  ThermalSimulator sim(model, run.scenario);
  run.result = sim.run_periodic();
  for (const auto& h : run.result.histories) {
    run.summaries.push_back(summarize(h, model.requirements.temperature_bands));
    run.bands_pass = run.bands_pass && run.summaries.back().pass();
  }
  return run;
}

inline std::string scenario_label(const std::string& c, const std::string& surface, const std::string& mode,
                                  const std::string& power) {
  return c + "/" + (surface.empty() ? "base" : surface) + "/" + mode + "/" + power;
}

inline int cmd_thermal(const ThermalFlags& f, std::ostream& out, std::ostream& err) {
  const auto src = load_checked(f.model, err);
  const SatelliteModel model = apply_overrides(src.model, f.surface, f.dt, f.eclipse);
  const std::string label = scenario_label(f.case_name, f.surface, f.mode, f.power);
  const std::filesystem::path dir(f.out);
  ensure_directory(dir);
  auto manifest = manifest_for("thermal", label, &src);
  manifest.parameters = {{"case", f.case_name}, {"surface", f.surface.empty() ? "base" : f.surface},
                         {"mode", f.mode},      {"power", f.power},
                         {"out", f.out}};

  ThermalRun run;
  try {
    run = run_thermal_case(model, f.case_name, f.mode, f.power);
  } catch (const ConvergenceError& e) {
    manifest.parameters["scenario"] = scenario_json(make_scenario(model, f.case_name, f.mode, f.power));
    emit(dir, "thermal", kExitNotConverged, {{"scenario", label}, {"error", e.what()}}, manifest);
    throw;
  }
  manifest.parameters["scenario"] = scenario_json(run.scenario, &run.result);

  Json nodes = Json::array();
  std::vector<RangeRow> rows;
  for (const auto& s : run.summaries) {
    nodes.push_back(node_summary_json(s));
    rows.push_back({f.case_name, f.surface.empty() ? "base" : f.surface, f.mode, f.power, s});
  }
  const int code = run.bands_pass ? kExitOk : kExitRequirement;
  Json results = {{"scenario", label},
                  {"orbits", run.result.orbits},
                  {"dt_s", run.result.dt},
                  {"spin_rate_deg_s", run.result.spin_rate_deg_s},
                  {"nodes", nodes},
                  {"pass", run.bands_pass}};
  write_atomic(dir / "history.csv", history_csv(run.result.histories));
  write_atomic(dir / "ranges.csv", ranges_csv(rows));
  emit(dir, "thermal", code, results, manifest);

  out << "thermal " << label << ": converged after " << run.result.orbits << " orbits (dt " << fmt(run.result.dt, 4)
      << " s)\n";
  for (const auto& s : run.summaries) {
    out << "  " << s.node << "  min " << fmt(kelvin_to_celsius(s.t_min_k), 2) << " C  max "
        << fmt(kelvin_to_celsius(s.t_max_k), 2) << " C";
    for (const auto& b : s.bands) {
      out << "  [" << b.band << " " << (b.pass ? "ok" : b.below ? "below" : "above") << "]";
    }
    out << "\n";
  }
  out << "wrote " << (dir / "history.csv").string() << ", ranges.csv, summary.json, manifest.json\n";
  return code;
}

struct SweepFlags {
  std::string model;
  std::vector<std::string> cases{"hot", "cold"};
  std::vector<std::string> surfaces{"a", "b", "c", "d"};
  std::vector<std::string> modes{"spin"};
  std::vector<std::string> powers{"min"};
  std::optional<double> dt;
  std::optional<std::string> eclipse;
  int jobs = 1;
  std::string out = "preflight-out";
};

inline int cmd_sweep(const SweepFlags& f, std::ostream& out, std::ostream& err) {
  const auto src = load_checked(f.model, err);
  if (f.jobs < 1) throw DomainError("--jobs must be >= 1");
  struct Task {
    std::string c, surface, mode, power;
    std::optional<ThermalRun> run;
    std::string error;
  };
  std::vector<Task> tasks;
  for (const auto& c : f.cases)
    for (const auto& s : f.surfaces)
      for (const auto& m : f.modes)
        for (const auto& p : f.powers) tasks.push_back({c, s, m, p, std::nullopt, {}});

  // Resolve every scenario up front so bad names fail before any work starts.
  std::vector<SatelliteModel> models;
  for (const auto& t : tasks) {
    models.push_back(apply_overrides(src.model, t.surface, f.dt, f.eclipse));
    make_scenario(models.back(), t.c, t.mode, t.power);
  }

  const std::filesystem::path dir(f.out);
  ensure_directory(dir);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      auto& t = tasks[i];
      try {
        t.run = run_thermal_case(models[i], t.c, t.mode, t.power);
      } catch (const ConvergenceError& e) {
        t.error = e.what();
      }
      Json results = {{"scenario", scenario_label(t.c, t.surface, t.mode, t.power)}};
      if (t.run) {
        Json nodes = Json::array();
        for (const auto& s : t.run->summaries) nodes.push_back(node_summary_json(s));
        results["orbits"] = t.run->result.orbits;
        results["dt_s"] = t.run->result.dt;
        results["spin_rate_deg_s"] = t.run->result.spin_rate_deg_s;
        results["nodes"] = nodes;
        results["pass"] = t.run->bands_pass;
      } else {
        results["error"] = t.error;
      }
      const int code = !t.run ? kExitNotConverged : t.run->bands_pass ? kExitOk : kExitRequirement;
      write_json(dir / "scenarios" / (t.c + "_" + t.surface + "_" + t.mode + "_" + t.power) / "summary.json",
                 summary_envelope("thermal", code, results));
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min<int>(f.jobs, static_cast<int>(tasks.size()));
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::ostringstream csv;
  csv << "case,surface,mode,power,converged,orbits";
  for (const auto& n : src.model.nodes) csv << "," << n.name << "_min_C," << n.name << "_max_C";
  csv << ",bands_pass\n";
  std::vector<RangeRow> ranges;
  Json rows = Json::array();
  bool any_fail = false, any_diverged = false;
  for (const auto& t : tasks) {
    csv << t.c << "," << t.surface << "," << t.mode << "," << t.power << "," << (t.run ? "true" : "false") << ","
        << (t.run ? t.run->result.orbits : 0);
    Json row = {{"case", t.c}, {"surface", t.surface}, {"mode", t.mode}, {"power", t.power}, {"converged", t.run.has_value()}};
    if (t.run) {
      for (const auto& s : t.run->summaries) {
        csv << "," << fmt(kelvin_to_celsius(s.t_min_k), 3) << "," << fmt(kelvin_to_celsius(s.t_max_k), 3);
        ranges.push_back({t.c, t.surface, t.mode, t.power, s});
      }
      csv << "," << (t.run->bands_pass ? "true" : "false") << "\n";
      Json nodes = Json::array();
      for (const auto& s : t.run->summaries) nodes.push_back(node_summary_json(s));
      row["orbits"] = t.run->result.orbits;
      row["nodes"] = nodes;
      row["pass"] = t.run->bands_pass;
      any_fail = any_fail || !t.run->bands_pass;
    } else {
      for (std::size_t i = 0; i < src.model.nodes.size(); ++i) csv << ",,";
      csv << ",false\n";
      row["error"] = t.error;
      row["pass"] = false;
      any_diverged = true;
    }
    rows.push_back(row);
  }
  const int code = any_diverged ? kExitNotConverged : any_fail ? kExitRequirement : kExitOk;
  write_atomic(dir / "sweep.csv", csv.str());
  write_atomic(dir / "ranges.csv", ranges_csv(ranges));
  auto manifest = manifest_for("sweep", "sweep", &src);
  manifest.parameters = {{"cases", f.cases}, {"surfaces", f.surfaces}, {"modes", f.modes}, {"powers", f.powers},
                         {"jobs", f.jobs},   {"out", f.out}};
  if (f.dt) manifest.parameters["dt"] = *f.dt;
  if (f.eclipse) manifest.parameters["eclipse"] = *f.eclipse;
  emit(dir, "sweep", code, {{"rows", rows}, {"pass", code == kExitOk}}, manifest);

  out << "sweep: " << tasks.size() << " scenarios\n" << csv.str();
  out << "wrote " << (dir / "sweep.csv").string() << "\n";
  return code;
}

// ---------------------------------------------------------------------------
// power

inline int cmd_power(const std::string& model_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  const auto src = load_checked(model_path, err);
  const auto r = budget_report(src.model);
  const int code = r.margin_w >= 0.0 ? kExitOk : kExitRequirement;
  auto manifest = manifest_for("power", "budget", &src);
  manifest.parameters = {{"out", out_dir}};
  Json results = budget_json(r);
  results["pass"] = code == kExitOk;
  emit(out_dir, "power", code, results, manifest);

  out << "power budget (nominal flux " << fmt(r.nominal_flux, 0) << " W/m2)\n";
  if (!r.strings.empty()) {
    const auto& s = src.model.strings.front();
    out << "  cell peak             " << fmt(cell_peak_power(s.efficiency, r.nominal_flux, s.cell_area), 3) << " W\n";
  }
  out << "  string peak           " << fmt(r.max_string_w, 3) << " W\n"
      << "  string spin average   " << fmt(r.strings.empty() ? 0.0 : r.strings.front().spin_average_w, 3) << " W\n"
      << "  spin-average total    " << fmt(r.spin_average_generation_w, 3) << " W\n"
      << "  required generation   " << fmt(r.required_generation_w, 3) << " W (rounded " << fmt(r.rounded_required_w, 1)
      << ")\n"
      << "  per-string share      " << fmt(r.per_string_required_w, 4) << " W (rounded " << fmt(r.rounded_per_string_w, 2)
      << ")\n"
      << "  max generation        " << fmt(r.max_generation_w, 2) << " W (" << r.max_generation_strings.size()
      << " strings)\n"
      << "  extraction gap        " << fmt(r.extraction_gap_w, 3) << " W (rounded chain " << fmt(r.rounded_gap_w, 2)
      << ")\n"
      << "  margin                " << fmt(r.margin_w, 3) << " W\n";
  return code;
}

// ---------------------------------------------------------------------------
// vib

struct VibFlags {
  std::string profile;
  std::optional<double> from, to;
  std::string input;
  std::string reference;
  std::size_t segment = 0;
  double overlap = 0.5;
  std::string window = "hann";
  double f_min = 5.0;
  std::optional<double> limit;
  std::string model;
  double ratio = 1.5;
  double window_octaves = 0.5;
  std::string out = "preflight-out";
};

inline WelchOptions welch_options(const VibFlags& f) {
  WelchOptions o;
  o.segment_length = f.segment;
  o.overlap = f.overlap;
  if (f.window == "hann") o.window = Window::kHann;
  else if (f.window == "rect") o.window = Window::kRectangular;
  else throw ReferenceError("window", f.window);
  return o;
}

inline Json welch_json(const WelchOptions& o) {
  return {{"segment_length", o.segment_length}, {"overlap", o.overlap},
          {"window", o.window == Window::kHann ? "hann" : "rect"}, {"min_averages", o.min_averages}};
}

inline int cmd_vib_grms(const VibFlags& f, std::ostream& out) {
  const auto profile = read_profile_file(f.profile);
  const double lo = f.from.value_or(profile.first()), hi = f.to.value_or(profile.last());
  const double g2 = band_power(profile, lo, hi);
  auto manifest = manifest_for("vib grms", f.profile, nullptr);
  manifest.parameters = {{"profile", f.profile}, {"profile_sha256", sha256_hex(read_file_bytes(f.profile))},
                         {"from_hz", lo}, {"to_hz", hi}, {"out", f.out}};
  emit(f.out, "vib grms", kExitOk,
       {{"from_hz", lo}, {"to_hz", hi}, {"mean_square_g2", g2}, {"grms", std::sqrt(g2)}}, manifest);
  out << "Grms " << fmt(lo, 1) << "-" << fmt(hi, 1) << " Hz: " << fmt(std::sqrt(g2), 3) << "\n";
  return kExitOk;
}

inline std::vector<SampledPsd> psds_of(const std::vector<TimeSeries>& series, const WelchOptions& o) {
  std::vector<SampledPsd> psds;
  for (const auto& s : series) psds.push_back(estimate_psd(s, o));
  return psds;
}

inline const SampledPsd& find_channel(const std::vector<SampledPsd>& psds, const std::string& name) {
  for (const auto& p : psds) {
    if (p.channel == name) return p;
  }
  throw ReferenceError("channel", name);
}

inline int cmd_vib_psd(const VibFlags& f, std::ostream& out) {
  const auto series = read_time_series_file(f.input);
  const auto o = welch_options(f);
  const auto psds = psds_of(series, o);
  Json channels = Json::array();
  for (std::size_t i = 0; i < psds.size(); ++i) {
    double mean = 0.0, var = 0.0;
    for (double x : series[i].samples) mean += x;
    mean /= static_cast<double>(series[i].samples.size());
    for (double x : series[i].samples) var += (x - mean) * (x - mean);
    var /= static_cast<double>(series[i].samples.size());
    channels.push_back({{"channel", psds[i].channel}, {"averages", psds[i].averages},
                        {"resolution_hz", psds[i].resolution()}, {"psd_integral_g2", psds[i].integral()},
                        {"variance_g2", var}});
    out << psds[i].channel << ": " << psds[i].averages << " averages, df " << fmt(psds[i].resolution(), 4)
        << " Hz, integral " << fmt(psds[i].integral(), 6) << " G^2 (variance " << fmt(var, 6) << ")\n";
  }
  write_atomic(std::filesystem::path(f.out) / "psd.csv", psd_csv(psds));
  auto manifest = manifest_for("vib psd", f.input, nullptr);
  manifest.parameters = {{"input", f.input}, {"input_sha256", sha256_hex(read_file_bytes(f.input))},
                         {"welch", welch_json(o)}, {"out", f.out}};
  emit(f.out, "vib psd", kExitOk, {{"channels", channels}}, manifest);
  return kExitOk;
}

inline std::vector<MagSpectrum> mags_of(const std::vector<SampledPsd>& psds, const std::string& reference) {
  const auto& ref = find_channel(psds, reference);
  std::vector<MagSpectrum> mags;
  for (const auto& p : psds) {
    if (p.channel != reference) mags.push_back(response_mag(p, ref));
  }
  if (mags.empty()) throw DomainError("no response channels besides the reference '" + reference + "'");
  return mags;
}

inline int cmd_vib_mag(const VibFlags& f, std::ostream& out) {
  if (f.reference.empty()) throw DomainError("--reference is required");
  const auto o = welch_options(f);
  const auto mags = mags_of(psds_of(read_time_series_file(f.input), o), f.reference);
  write_atomic(std::filesystem::path(f.out) / "mag.csv", mag_csv(mags));
  Json channels = Json::array();
  for (const auto& m : mags) {
    std::size_t best = 0;
    for (std::size_t k = 0; k < m.magnification.size(); ++k) {
      if (m.valid[k] && m.magnification[k] > m.magnification[best]) best = k;
    }
    channels.push_back({{"channel", m.channel}, {"peak_mag", m.magnification[best]}, {"peak_hz", m.frequencies[best]}});
    out << m.channel << ": peak MAG " << fmt(m.magnification[best], 3) << " at " << fmt(m.frequencies[best], 2) << " Hz\n";
  }
  auto manifest = manifest_for("vib mag", f.input, nullptr);
  manifest.parameters = {{"input", f.input}, {"input_sha256", sha256_hex(read_file_bytes(f.input))},
                         {"reference", f.reference}, {"welch", welch_json(o)}, {"out", f.out}};
  emit(f.out, "vib mag", kExitOk, {{"reference", f.reference}, {"channels", channels}}, manifest);
  return kExitOk;
}

inline int cmd_vib_resonance(const VibFlags& f, std::ostream& out, std::ostream& err) {
  if (f.reference.empty()) throw DomainError("--reference is required");
  std::optional<ModelSource> src;
  if (!f.model.empty()) src = load_checked(f.model, err);
  const double limit = f.limit.value_or(src ? src->model.requirements.min_frequency_hz : 60.0);
  const auto o = welch_options(f);
  const auto mags = mags_of(psds_of(read_time_series_file(f.input), o), f.reference);
  const PeakOptions peaks{f.ratio, f.window_octaves};

  std::vector<std::pair<std::string, double>> found;
  Json channels = Json::array();
  for (const auto& m : mags) {
    try {
      const double hz = first_resonance(m, f.f_min, peaks);
      found.emplace_back(m.channel, hz);
    } catch (const DomainError&) {
      channels.push_back({{"channel", m.channel}, {"first_resonance_hz", nullptr}, {"pass", true}});
      out << m.channel << ": no resonance above " << fmt(f.f_min, 1) << " Hz\n";
    }
  }
  bool pass = true;
  for (const auto& c : min_frequency_check(found, limit)) {
    channels.push_back({{"channel", c.channel}, {"first_resonance_hz", c.frequency_hz}, {"pass", c.pass}});
    pass = pass && c.pass;
    out << c.channel << ": first resonance " << fmt(c.frequency_hz, 2) << " Hz " << (c.pass ? "> " : "<= ")
        << fmt(limit, 1) << " Hz " << (c.pass ? "ok" : "FAIL") << "\n";
  }
  const int code = pass ? kExitOk : kExitRequirement;
  write_atomic(std::filesystem::path(f.out) / "mag.csv", mag_csv(mags));
  auto manifest = manifest_for("vib resonance", f.input, src ? &*src : nullptr);
  manifest.parameters = {{"input", f.input},   {"input_sha256", sha256_hex(read_file_bytes(f.input))},
                         {"reference", f.reference}, {"f_min_hz", f.f_min},
                         {"limit_hz", limit},  {"prominence_ratio", f.ratio},
                         {"window_octaves", f.window_octaves}, {"welch", welch_json(o)},
                         {"out", f.out}};
  emit(f.out, "vib resonance", code, {{"limit_hz", limit}, {"channels", channels}, {"pass", pass}}, manifest);
  return code;
}

// ---------------------------------------------------------------------------
// struct

struct StructFlags {
  std::string model;
  std::string chain;
  int modes = 3;
  std::optional<int> elements;
  double g_level = 1.0;
  std::vector<double> first_freq;
  std::optional<double> limit;
  std::optional<double> deflection_mm;
  std::optional<double> target_hz;
  std::string out = "preflight-out";
};

inline BeamChainModel chain_from(const ModelSource& src, const StructFlags& f) {
  if (f.chain.empty()) throw DomainError("--chain is required");
  SatelliteModel m = src.model;
  auto it = m.chains.find(f.chain);
  if (it == m.chains.end()) throw ReferenceError("chain", f.chain);
  if (f.elements) it->second.elements_per_panel = *f.elements;
  return build_chain(m, f.chain);
}

inline Json chain_parameters(const StructFlags& f) {
  Json j = {{"chain", f.chain}, {"out", f.out}};
  if (f.elements) j["elements_per_panel"] = *f.elements;
  return j;
}

inline int cmd_struct_modal(const StructFlags& f, std::ostream& out, std::ostream& err) {
  const auto src = load_checked(f.model, err);
  const auto chain = chain_from(src, f);
  const auto r = modal_frequencies(chain, f.modes);
  write_atomic(std::filesystem::path(f.out) / "modes.csv", mode_shapes_csv(chain, r));
  auto manifest = manifest_for("struct modal", f.chain, &src);
  manifest.parameters = chain_parameters(f);
  manifest.parameters["modes"] = f.modes;
  emit(f.out, "struct modal", kExitOk, modal_json(chain, r), manifest);
  out << "chain " << chain.name << ": span " << fmt(chain.span * 1e3, 1) << " mm, mass " << fmt(chain.total_mass * 1e3, 1)
      << " g\n";
  if (r.rigid_body_modes) out << "  " << r.rigid_body_modes << " rigid-body modes (0 Hz)\n";
  for (std::size_t i = 0; i < r.frequencies_hz.size(); ++i)
    out << "  mode " << (i + 1) << ": " << fmt(r.frequencies_hz[i], 3) << " Hz\n";
  return kExitOk;
}

inline int cmd_struct_static(const StructFlags& f, std::ostream& out, std::ostream& err) {
  const auto src = load_checked(f.model, err);
  const auto chain = chain_from(src, f);
  const auto& req = src.model.requirements;
  const auto s = static_load(chain, f.g_level);
  const auto per_g = static_load(chain, 1.0);
  std::string material;
  for (const auto& name : src.model.chains.at(f.chain).panels) material = src.model.panels.at(name).material;
  const double allowable = allowable_stress(src.model.material(material), req.allowable_factor);
  const double allowable_g = allowable_acceleration(per_g.max_stress, allowable);
  const bool envelope_ok = envelope_check(s.max_deflection, req.envelope_m);
  const int code = envelope_ok ? kExitOk : kExitRequirement;

  Json results = static_json(chain, s);
  results["stress_per_g_pa"] = per_g.max_stress;
  results["allowable_stress_pa"] = allowable;
  results["allowable_acceleration_g"] = allowable_g;
  results["envelope_m"] = req.envelope_m;
  results["envelope_pass"] = envelope_ok;
  results["pass"] = envelope_ok;
  auto manifest = manifest_for("struct static", f.chain, &src);
  manifest.parameters = chain_parameters(f);
  manifest.parameters["g_level"] = f.g_level;
  std::ostringstream csv;
  csv << "x_m,deflection_m\n";
  for (std::size_t n = 0; n < chain.node_count(); ++n) csv << fmt(chain.node_x[n], 6) << "," << num(s.deflection[n], 9) << "\n";
  write_atomic(std::filesystem::path(f.out) / "deflection.csv", csv.str());
  emit(f.out, "struct static", code, results, manifest);

  out << "chain " << chain.name << " at " << fmt(f.g_level, 2) << " G: max deflection "
      << fmt(s.max_deflection * 1e3, 3) << " mm at x = " << fmt(s.deflection_x * 1e3, 1) << " mm, max stress "
      << fmt(s.max_stress / 1e6, 3) << " MPa\n"
      << "  allowable " << fmt(allowable / 1e6, 1) << " MPa -> " << fmt(allowable_g, 2) << " G\n"
      << "  envelope " << fmt(req.envelope_m * 1e3, 2) << " mm: " << (envelope_ok ? "ok" : "FAIL") << "\n";
  return code;
}

inline int cmd_struct_check(const StructFlags& f, std::ostream& out, std::ostream& err) {
  std::optional<ModelSource> src;
  if (!f.model.empty()) src = load_checked(f.model, err);
  const double limit = f.limit.value_or(src ? src->model.requirements.min_frequency_hz : 60.0);
  std::vector<std::pair<std::string, double>> freqs;
  for (std::size_t i = 0; i < f.first_freq.size(); ++i) freqs.emplace_back("first_freq[" + std::to_string(i) + "]", f.first_freq[i]);
  if (freqs.empty() && src && src->model.requirements.reference_first_frequency_hz)
    freqs.emplace_back("reference_first_frequency", *src->model.requirements.reference_first_frequency_hz);

  Json checks = Json::array();
  bool pass = true;
  for (const auto& c : min_frequency_check(freqs, limit)) {
    checks.push_back({{"check", "min_frequency"}, {"name", c.channel}, {"value_hz", c.frequency_hz}, {"limit_hz", limit},
                      {"pass", c.pass}});
    pass = pass && c.pass;
    out << "min frequency " << fmt(c.frequency_hz, 2) << " Hz vs > " << fmt(limit, 1) << " Hz: " << (c.pass ? "ok" : "FAIL")
        << "\n";
  }
  if (src) {
    const auto& req = src->model.requirements;
    const auto rail = rail_load_check(req.rail_load_n, req.rail_section_width * req.rail_section_depth,
                                      src->model.material(req.rail_material), req.allowable_factor);
    checks.push_back({{"check", "rail_load"}, {"stress_pa", rail.stress}, {"allowable_pa", rail.allowable},
                      {"pass", rail.pass}});
    pass = pass && rail.pass;
    out << "rail load " << fmt(req.rail_load_n, 1) << " N: " << fmt(rail.stress / 1e6, 3) << " MPa vs "
        << fmt(rail.allowable / 1e6, 1) << " MPa: " << (rail.pass ? "ok" : "FAIL") << "\n";
  }
  if (f.deflection_mm) {
    const double envelope = src ? src->model.requirements.envelope_m : 6.5e-3;
    const bool ok = envelope_check(*f.deflection_mm * 1e-3, envelope);
    checks.push_back({{"check", "envelope"}, {"deflection_m", *f.deflection_mm * 1e-3}, {"limit_m", envelope}, {"pass", ok}});
    pass = pass && ok;
    out << "envelope " << fmt(*f.deflection_mm, 2) << " mm vs < " << fmt(envelope * 1e3, 2) << " mm: " << (ok ? "ok" : "FAIL")
        << "\n";
  }
  if (checks.empty()) throw DomainError("nothing to check: give --first-freq, --deflection or --model");
  const int code = pass ? kExitOk : kExitRequirement;
  auto manifest = manifest_for("struct check", "check", src ? &*src : nullptr);
  manifest.parameters = {{"first_freq_hz", f.first_freq}, {"limit_hz", limit}, {"out", f.out}};
  if (f.deflection_mm) manifest.parameters["deflection_mm"] = *f.deflection_mm;
  emit(f.out, "struct check", code, {{"checks", checks}, {"pass", pass}}, manifest);
  return code;
}

inline int cmd_struct_fit_hinge(const StructFlags& f, std::ostream& out, std::ostream& err) {
  const auto src = load_checked(f.model, err);
  if (!f.target_hz) throw DomainError("--target is required");
  SatelliteModel m = src.model;
  if (f.elements) {
    auto it = m.chains.find(f.chain);
    if (it == m.chains.end()) throw ReferenceError("chain", f.chain);
    it->second.elements_per_panel = *f.elements;
  }
  const auto fit = fit_hinge_stiffness(m, f.chain, *f.target_hz);
  auto manifest = manifest_for("struct fit-hinge", f.chain, &src);
  manifest.parameters = chain_parameters(f);
  manifest.parameters["target_hz"] = *f.target_hz;
  emit(f.out, "struct fit-hinge", kExitOk,
       {{"chain", f.chain}, {"target_hz", *f.target_hz}, {"stiffness_nm_per_rad", fit.stiffness},
        {"frequency_hz", fit.frequency_hz}, {"rigid_frequency_hz", fit.rigid_frequency_hz}},
       manifest);
  out << "chain " << f.chain << ": hinge stiffness " << fmt(fit.stiffness, 4) << " N m/rad gives "
      << fmt(fit.frequency_hz, 3) << " Hz (rigid limit " << fmt(fit.rigid_frequency_hz, 3) << " Hz)\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"CubeSat preflight analyses: thermal, power, vibration, structure"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  ThermalFlags tf;
  auto* thermal = app.add_subcommand("thermal", "converged single-node orbit temperatures");
  thermal->add_option("--model", tf.model, "model configuration (JSON)")->required();
  thermal->add_option("--case", tf.case_name, "environment case (hot, cold, nominal or a configured name)");
  thermal->add_option("--surface", tf.surface, "surface configuration (a, b, c, d or a configured name)");
  thermal->add_option("--mode", tf.mode, "attitude mode")->check(CLI::IsMember({"spin", "sun", "nadir"}));
  thermal->add_option("--power", tf.power, "power state")->check(CLI::IsMember({"min", "max"}));
  thermal->add_option("--dt", tf.dt, "integration step [s]");
  thermal->add_option("--eclipse", tf.eclipse, "eclipse model")->check(CLI::IsMember({"geom", "fixed60_30"}));
  thermal->add_option("--out", tf.out, "output directory");

  SweepFlags sf;
  auto* sweep = app.add_subcommand("sweep", "cases x surfaces x modes x power states, one row each");
  sweep->add_option("--model", sf.model, "model configuration (JSON)")->required();
  sweep->add_option("--case,--cases", sf.cases, "comma-separated cases")->delimiter(',');
  sweep->add_option("--surface,--surfaces", sf.surfaces, "comma-separated surface configurations")->delimiter(',');
  sweep->add_option("--mode,--modes", sf.modes, "comma-separated attitude modes")->delimiter(',');
  sweep->add_option("--power,--powers", sf.powers, "comma-separated power states")->delimiter(',');
  sweep->add_option("--dt", sf.dt, "integration step [s]");
  sweep->add_option("--eclipse", sf.eclipse, "eclipse model")->check(CLI::IsMember({"geom", "fixed60_30"}));
  sweep->add_option("--jobs", sf.jobs, "concurrent scenario runs");
  sweep->add_option("--out", sf.out, "output directory");

  std::string power_model, power_out = "preflight-out";
  auto* power = app.add_subcommand("power", "electrical power budget");
  power->add_option("--model", power_model, "model configuration (JSON)")->required();
  power->add_option("--out", power_out, "output directory");

  VibFlags vf;
  auto* vib = app.add_subcommand("vib", "random-vibration processing");
  vib->require_subcommand(1);
  auto* grms_cmd = vib->add_subcommand("grms", "Grms of a breakpoint profile");
  grms_cmd->add_option("--profile", vf.profile, "breakpoint CSV (freq_hz,psd_g2hz)")->required();
  grms_cmd->add_option("--from", vf.from, "lower band edge [Hz]");
  grms_cmd->add_option("--to", vf.to, "upper band edge [Hz]");
  grms_cmd->add_option("--out", vf.out, "output directory");
  auto welch_flags = [&](CLI::App* c) {
    c->add_option("--input", vf.input, "time-series CSV")->required();
    c->add_option("--segment", vf.segment, "Welch segment length in samples (default: >= 8 averages)");
    c->add_option("--overlap", vf.overlap, "segment overlap fraction");
    c->add_option("--window", vf.window, "window")->check(CLI::IsMember({"hann", "rect"}));
    c->add_option("--out", vf.out, "output directory");
  };
  auto* psd_cmd = vib->add_subcommand("psd", "Welch PSD per channel");
  welch_flags(psd_cmd);
  auto* mag_cmd = vib->add_subcommand("mag", "response magnification against a reference channel");
  welch_flags(mag_cmd);
  mag_cmd->add_option("--reference", vf.reference, "reference (input) channel")->required();
  auto* res_cmd = vib->add_subcommand("resonance", "first resonance per channel and the minimum-frequency gate");
  welch_flags(res_cmd);
  res_cmd->add_option("--reference", vf.reference, "reference (input) channel")->required();
  res_cmd->add_option("--f-min", vf.f_min, "ignore peaks at or below this frequency [Hz]");
  res_cmd->add_option("--limit", vf.limit, "minimum frequency requirement [Hz] (default: model or 60)");
  res_cmd->add_option("--model", vf.model, "model configuration for the requirement");
  res_cmd->add_option("--prominence", vf.ratio, "peak / windowed-median ratio");
  res_cmd->add_option("--window-octaves", vf.window_octaves, "half width of the median window [octaves]");

  StructFlags stf;
  auto* st = app.add_subcommand("struct", "beam-chain structural checks");
  st->require_subcommand(1);
  auto chain_flags = [&](CLI::App* c) {
    c->add_option("--model", stf.model, "model configuration (JSON)")->required();
    c->add_option("--chain", stf.chain, "panel chain name")->required();
    c->add_option("--elements", stf.elements, "elements per panel override");
    c->add_option("--out", stf.out, "output directory");
  };
  auto* modal_cmd = st->add_subcommand("modal", "natural frequencies and mode shapes");
  chain_flags(modal_cmd);
  modal_cmd->add_option("--modes", stf.modes, "number of elastic modes");
  auto* static_cmd = st->add_subcommand("static", "quasi-static out-of-plane load");
  chain_flags(static_cmd);
  static_cmd->add_option("--g", stf.g_level, "load level [G]");
  auto* check_cmd = st->add_subcommand("check", "requirement gates: minimum frequency, rail load, envelope");
  check_cmd->add_option("--first-freq", stf.first_freq, "first natural frequency [Hz] (repeatable)");
  check_cmd->add_option("--limit", stf.limit, "minimum frequency [Hz] (default: model or 60)");
  check_cmd->add_option("--deflection", stf.deflection_mm, "deflection to test against the envelope [mm]");
  check_cmd->add_option("--model", stf.model, "model configuration (adds the rail-load check)");
  check_cmd->add_option("--out", stf.out, "output directory");
  auto* fit_cmd = st->add_subcommand("fit-hinge", "fit one hinge stiffness to a target first frequency");
  chain_flags(fit_cmd);
  fit_cmd->add_option("--target", stf.target_hz, "target first frequency [Hz]")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, r;
    const int code = app.exit(e, o, r);
    out << o.str();
    err << r.str();
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*thermal) return cmd_thermal(tf, out, err);
    if (*sweep) return cmd_sweep(sf, out, err);
    if (*power) return cmd_power(power_model, power_out, out, err);
    if (*grms_cmd) return cmd_vib_grms(vf, out);
    if (*psd_cmd) return cmd_vib_psd(vf, out);
    if (*mag_cmd) return cmd_vib_mag(vf, out);
    if (*res_cmd) return cmd_vib_resonance(vf, out, err);
    if (*modal_cmd) return cmd_struct_modal(stf, out, err);
    if (*static_cmd) return cmd_struct_static(stf, out, err);
    if (*check_cmd) return cmd_struct_check(stf, out, err);
    if (*fit_cmd) return cmd_struct_fit_hinge(stf, out, err);
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNotConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    // best effort: leave an error summary where the results would have gone
    const std::pair<CLI::App*, const std::string*> commands[] = {
        {thermal, &tf.out},   {sweep, &sf.out},       {power, &power_out},   {grms_cmd, &vf.out},
        {psd_cmd, &vf.out},   {mag_cmd, &vf.out},     {res_cmd, &vf.out},    {modal_cmd, &stf.out},
        {static_cmd, &stf.out}, {check_cmd, &stf.out}, {fit_cmd, &stf.out}};
    for (const auto& [cmd, dir] : commands) {
      if (!*cmd) continue;
      const std::string name = cmd->get_parent() == &app ? cmd->get_name()
                                                          : cmd->get_parent()->get_name() + " " + cmd->get_name();
      try {
        ensure_directory(*dir);
        write_json(std::filesystem::path(*dir) / "summary.json",
                   summary_envelope(name, kExitInput, {{"error", e.what()}}));
      } catch (const std::exception&) {
      }
      break;
    }
    return kExitInput;
  }
  err << app.help();
  return kExitInput;
}

}  // namespace preflight::cli
