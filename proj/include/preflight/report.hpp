#pragma once

// Output plumbing: atomic file writes, CSV/JSON rendering of results and the
// run manifest.

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "preflight/errors.hpp"
#include "preflight/model.hpp"
#include "preflight/power.hpp"
#include "preflight/structural.hpp"
#include "preflight/thermal.hpp"
#include "preflight/units.hpp"
#include "preflight/version.hpp"
#include "preflight/vibration.hpp"

namespace preflight {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Files

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

/// Writes to a sibling temporary and renames it over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) ensure_directory(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot write " + path.string());
  }
}

inline void write_json(const std::filesystem::path& path, const Json& j) { write_atomic(path, j.dump(2) + "\n"); }

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Fixed-precision number for CSV cells.
inline std::string num(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  std::string s = buf;
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);  // no "-0.000"
  return s;
}

// ---------------------------------------------------------------------------
// Manifest

struct RunManifest {
  std::string command;
  std::string scenario;
  std::string model_path;
  std::string model_sha256;
  Json parameters = Json::object();
};

inline Json manifest_json(const RunManifest& m, const std::string& timestamp) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = m.command;
  j["scenario"] = m.scenario;
  j["model"] = {{"path", m.model_path}, {"sha256", m.model_sha256}};
  j["timestamp"] = timestamp;
  j["parameters"] = m.parameters;
  return j;
}

/// Common envelope of every summary.json.
inline Json summary_envelope(const std::string& command, int exit_code, Json results) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command;
  j["status"] = exit_code == 0 ? "pass" : exit_code == 2 ? "fail" : exit_code == 3 ? "not_converged" : "error";
  j["exit_code"] = exit_code;
  j["results"] = std::move(results);
  return j;
}

// ---------------------------------------------------------------------------
// Thermal

inline Json scenario_json(const ThermalScenario& sc, const PeriodicResult* run = nullptr) {
  Json j;
  j["name"] = sc.name;
  j["environment"] = {{"case", sc.env.name},
                      {"solar_flux_w_m2", sc.env.solar_flux},
                      {"earth_ir_w_m2", sc.env.earth_ir},
                      {"albedo", sc.env.albedo},
                      {"albedo_correction", sc.env.albedo_correction},
                      {"beta_deg", sc.env.beta_deg.value_or(0.0)}};
  j["orbit"] = {{"altitude_km", sc.orbit.altitude_km},
                {"inclination_deg", sc.orbit.inclination_deg},
                {"raan_deg", sc.orbit.raan_deg},
                {"sun_direction", {sc.orbit.sun_direction.x(), sc.orbit.sun_direction.y(), sc.orbit.sun_direction.z()}},
                {"period_s", orbital_period(sc.orbit.altitude_km)}};
  j["power"] = sc.power == PowerState::kMinimum ? "min" : "max";
  j["standby_share_w"] = sc.standby_share_w;
  j["settings"] = {{"dt_s", sc.settings.dt},
                   {"tolerance_k", sc.settings.tolerance_k},
                   {"max_orbits", sc.settings.max_orbits},
                   {"initial_temperature_c", kelvin_to_celsius(sc.settings.initial_temperature_k)},
                   {"eclipse", sc.settings.eclipse == EclipseModel::kGeometric ? "geom" : "fixed60_30"}};
  if (run) {
    j["effective_dt_s"] = run->dt;
    j["spin_rate_deg_s"] = run->spin_rate_deg_s;
  }
  return j;
}

inline Json node_summary_json(const NodeSummary& s) {
  Json bands = Json::array();
  for (const auto& b : s.bands) {
    bands.push_back({{"band", b.band},
                     {"min_c", kelvin_to_celsius(b.min_k)},
                     {"max_c", kelvin_to_celsius(b.max_k)},
                     {"pass", b.pass},
                     {"below", b.below},
                     {"above", b.above}});
  }
  return {{"node", s.node},
          {"min_c", kelvin_to_celsius(s.t_min_k)},
          {"max_c", kelvin_to_celsius(s.t_max_k)},
          {"mean_c", kelvin_to_celsius(s.t_mean_k)},
          {"amplitude_k", s.t_max_k - s.t_min_k},
          {"bands", bands},
          {"pass", s.pass()}};
}

/// Time-history CSV: one row per sample, temperature and flux terms per node.
inline std::string history_csv(const std::vector<TemperatureHistory>& histories) {
  std::ostringstream out;
  out << "time_s,node,temp_C,q_solar_W,q_ir_W,q_albedo_W,q_internal_W,q_space_W,p_elec_W,in_eclipse\n";
  if (histories.empty()) return out.str();
  // long format, nodes interleaved per time step
  const std::size_t rows = histories.front().samples.size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (const auto& h : histories) {
      const auto& s = h.samples[r];
      out << num(s.time, 3) << "," << h.node << "," << num(kelvin_to_celsius(s.temperature), 4) << ","
          << num(s.flux.q_solar, 4) << "," << num(s.flux.q_ir, 4) << "," << num(s.flux.q_albedo, 4) << ","
          << num(s.flux.q_internal, 4) << "," << num(s.flux.q_space, 4) << "," << num(s.flux.p_electric, 4) << ","
          << (s.in_eclipse ? 1 : 0) << "\n";
    }
  }
  return out.str();
}

struct RangeRow {
  std::string case_name, surface, mode, power;
  NodeSummary summary;
};

/// Min/max bars per scenario and node.
inline std::string ranges_csv(const std::vector<RangeRow>& rows) {
  std::ostringstream out;
  out << "case,surface,mode,power,node,min_C,max_C,amplitude_K\n";
  for (const auto& r : rows) {
    out << r.case_name << "," << r.surface << "," << r.mode << "," << r.power << "," << r.summary.node << ","
        << num(kelvin_to_celsius(r.summary.t_min_k), 3) << "," << num(kelvin_to_celsius(r.summary.t_max_k), 3) << ","
        << num(r.summary.t_max_k - r.summary.t_min_k, 3) << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Power

inline Json budget_json(const BudgetReport& r) {
  Json strings = Json::array();
  for (const auto& s : r.strings) {
    strings.push_back({{"id", s.id},
                       {"peak_w", s.peak_w},
                       {"rated_w", s.rated_w},
                       {"spin_average_w", s.spin_average_w},
                       {"standby_extraction_w", s.standby_extraction_w},
                       {"sun_orientable", s.sun_orientable}});
  }
  return {{"nominal_flux_w_m2", r.nominal_flux},
          {"consumption_w", r.consumption_w},
          {"required_generation_w", r.required_generation_w},
          {"per_string_required_w", r.per_string_required_w},
          {"spin_average_generation_w", r.spin_average_generation_w},
          {"sun_pointing_generation_w", r.sun_pointing_generation_w},
          {"max_generation_w", r.max_generation_w},
          {"max_generation_strings", r.max_generation_strings},
          {"margin_w", r.margin_w},
          {"max_string_w", r.max_string_w},
          {"extraction_gap_w", r.extraction_gap_w},
          {"rounded", {{"string_w", r.rounded_string_w},
                       {"required_w", r.rounded_required_w},
                       {"per_string_w", r.rounded_per_string_w},
                       {"gap_w", r.rounded_gap_w}}},
          {"strings", strings}};
}

// ---------------------------------------------------------------------------
// Vibration

/// Spectra sharing one frequency grid, one column per channel.
template <class Getter>
std::string spectra_csv(const std::vector<double>& frequencies, const std::vector<std::string>& names, Getter&& value) {
  std::ostringstream out;
  out << "freq_hz";
  for (const auto& n : names) out << "," << n;
  out << "\n";
  for (std::size_t k = 0; k < frequencies.size(); ++k) {
    out << num(frequencies[k], 6);
    for (std::size_t c = 0; c < names.size(); ++c) out << "," << value(c, k);
    out << "\n";
  }
  return out.str();
}

inline std::string psd_csv(const std::vector<SampledPsd>& psds) {
  if (psds.empty()) return "freq_hz\n";
  std::vector<std::string> names;
  for (const auto& p : psds) names.push_back(p.channel);
  return spectra_csv(psds.front().frequencies, names, [&](std::size_t c, std::size_t k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9e", psds[c].density[k]);
    return std::string(buf);
  });
}

inline std::string mag_csv(const std::vector<MagSpectrum>& mags) {
  if (mags.empty()) return "freq_hz\n";
  std::vector<std::string> names;
  for (const auto& m : mags) names.push_back(m.channel);
  return spectra_csv(mags.front().frequencies, names, [&](std::size_t c, std::size_t k) {
    return mags[c].valid[k] ? num(mags[c].magnification[k], 6) : std::string();
  });
}

// ---------------------------------------------------------------------------
// Structural

inline Json modal_json(const BeamChainModel& chain, const ModalResult& r) {
  return {{"chain", chain.name},
          {"span_m", chain.span},
          {"total_mass_kg", chain.total_mass},
          {"elements", chain.elements.size()},
          {"rigid_body_modes", r.rigid_body_modes},
          {"frequencies_hz", r.frequencies_hz}};
}

inline std::string mode_shapes_csv(const BeamChainModel& chain, const ModalResult& r) {
  std::ostringstream out;
  out << "x_m";
  for (std::size_t m = 0; m < r.mode_shapes.size(); ++m) out << ",mode" << (m + 1);
  out << "\n";
  for (std::size_t n = 0; n < chain.node_count(); ++n) {
    out << num(chain.node_x[n], 6);
    for (const auto& shape : r.mode_shapes) out << "," << num(shape[n], 6);
    out << "\n";
  }
  return out.str();
}

inline Json static_json(const BeamChainModel& chain, const StaticResult& s) {
  return {{"chain", chain.name},
          {"g_level", s.g_level},
          {"max_deflection_m", s.max_deflection},
          {"deflection_x_m", s.deflection_x},
          {"max_stress_pa", s.max_stress},
          {"stress_x_m", s.stress_x},
          {"max_moment_nm", s.max_moment}};
}

}  // namespace preflight
