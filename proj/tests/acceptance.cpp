// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "preflight/cli.hpp"
#include "preflight/preflight.hpp"
#include "support/fixtures.hpp"
#include "support/sdof.hpp"

namespace fs = std::filesystem;
using namespace preflight;
using preflight::testing::reference_model;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  // Records one sub-check; failures are flagged inline.
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (detail.tellp() > 0) detail << "; ";
    detail << what << (ok ? "" : " (X)");
  }
};

std::string f(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Runs `body`, checks its wall time against `budget_s` and prints the line.
bool criterion(int id, const std::string& title, double budget_s, const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.check(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool pass = v.pass && in_time;
  std::cout << (pass ? "PASS" : "FAIL") << "  AC" << id << " " << title << ": " << v.detail.str() << "  [runtime "
            << (secs < 1e-2 ? f(secs * 1e3, 3) + " ms" : f(secs, 2) + " s") << (in_time ? " < " : " >= ")
            << (budget_s < 1.0 ? f(budget_s * 1e3, 0) + " ms" : f(budget_s, 0) + " s") << "]" << std::endl;
  return pass;
}

double converged_mean(const SatelliteModel& m, const ThermalScenario& sc) {
  return summarize(ThermalSimulator(m, sc).run_periodic().histories.front(), {}).t_mean_k;
}

NodeSummary reference_range(const std::string& c, const std::string& surface, const std::string& node) {
  const auto m = with_surface(reference_model(), surface);
  const auto r = ThermalSimulator(m, make_scenario(m, c, "spin", "min")).run_periodic();
  for (const auto& h : r.histories) {
    if (h.node == node) return summarize(h, {});
  }
  throw ReferenceError("node", node);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string strip_timestamp(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.find("\"timestamp\"") == std::string::npos) out += line + "\n";
  }
  return out;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "preflight");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  return cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace

int main() {
  const auto suite_start = std::chrono::steady_clock::now();
  reference_model();  // load once, outside the timed sections
  bool all = true;

  all &= criterion(1, "orbit period and Earth view factor", 1e-3, [](Verdict& v) {
    const double minutes = orbital_period(400.0) / 60.0;
    v.check(rel(minutes, 92.6) <= 0.002, "period " + f(minutes, 3) + " min vs 92.6 +-0.2%");
    const double fe = earth_view_factor(400.0);
    v.check(std::abs(fe - 0.885) <= 0.001, "F_E " + f(fe, 4) + " vs 0.885 +-0.001");
  });

  all &= criterion(2, "geometric eclipse fraction", 1.0, [](Verdict& v) {
    auto fraction = [](double beta) {
      OrbitSpec s;
      s.altitude_km = 400.0;
      s.inclination_deg = 51.6;
      s.sun_direction = sun_for_beta(s, beta);
      CircularOrbit orbit(s);
      const int n = 20000;
      int dark = 0;
      for (int k = 0; k < n; ++k) dark += orbit.state(orbit.period() * (k + 0.5) / n).in_eclipse ? 1 : 0;
      return static_cast<double>(dark) / n;
    };
    const double oracle =
        std::asin(constants::kEarthRadiusKm / (constants::kEarthRadiusKm + 400.0)) / std::numbers::pi;
    const double f0 = fraction(0.0);
    v.check(std::abs(f0 - oracle) <= 0.005, "beta 0: " + f(f0, 4) + " vs " + f(oracle, 4) + " +-0.005");
    const double f80 = fraction(80.0);
    v.check(f80 == 0.0, "beta 80: " + f(f80, 4));
  });

  const auto& model = reference_model();
  all &= criterion(3, "power arithmetic", 1e-3, [&](Verdict& v) {
    const auto r = budget_report(model);
    const auto& s = r.strings.front();
    const double cell = s.peak_w / model.strings.front().cells_in_series;
    v.check(round_to(cell, 0.01) == round_to(1.12, 0.01), "cell " + f(cell, 3) + " ~ 1.12");
    v.check(round_to(r.max_string_w, 0.1) == round_to(6.7, 0.1), "string " + f(r.max_string_w, 3) + " ~ 6.7");
    v.check(round_to(s.spin_average_w, 0.1) == round_to(1.7, 0.1), "spin " + f(s.spin_average_w, 3) + " ~ 1.7");
    v.check(round_to(r.required_generation_w, 0.01) == round_to(3.15, 0.01),
            "required " + f(r.required_generation_w, 3) + " ~ 3.15");
    v.check(round_to(r.per_string_required_w, 0.01) == round_to(0.45, 0.01),
            "per-string " + f(r.per_string_required_w, 3) + " ~ 0.45");
    v.check(round_to(r.max_generation_w, 0.1) == round_to(34.2, 0.1), "max " + f(r.max_generation_w, 3) + " ~ 34.2");
    v.check(round_to(r.rounded_gap_w, 0.01) == round_to(6.24, 0.01),
            "gap " + f(r.rounded_string_w, 1) + " - " + f(r.rounded_per_string_w, 2) + " = " + f(r.rounded_gap_w, 2));
  });

  all &= criterion(4, "thermal oracles", 4 * 10.0, [&](Verdict& v) {
    using preflight::testing::gray_plate;
    using preflight::testing::gray_sphere;
    using preflight::testing::sun_only;
    const double sigma = constants::kStefanBoltzmann;
    auto timed = [](const std::function<void()>& fn) {
      const auto t0 = std::chrono::steady_clock::now();
      fn();
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    double sphere = 0.0, plate = 0.0, worst_residual = 0.0;
    bool eclipse_clean = true;
    int dark = 0;
    const double t_sphere = timed([&] {
      sphere = converged_mean(gray_sphere(0.8, 0.1, 400, 200.0), sun_only(1353.0, FreeRotation{0.0}));
    });
    const double sphere_ref = std::pow(0.8 * 1353.0 / (4.0 * 0.8 * sigma), 0.25);
    v.check(std::abs(sphere - sphere_ref) <= 0.5 && t_sphere < 10.0,
            "sphere " + f(sphere, 2) + " K vs " + f(sphere_ref, 2) + " (" + f(t_sphere, 2) + " s)");
    const double t_plate = timed([&] {
      plate = converged_mean(gray_plate(0.7, 0.01, 50.0), sun_only(1353.0, SunPointing{"front", Eigen::Vector3d::UnitX()}));
    });
    const double plate_ref = std::pow(1353.0 / (2.0 * sigma), 0.25);
    v.check(std::abs(plate - plate_ref) <= 0.5 && t_plate < 10.0,
            "plate " + f(plate, 2) + " K vs " + f(plate_ref, 2) + " (" + f(t_plate, 2) + " s)");
    const double t_ref = timed([&] {
      for (const std::string c : {"hot", "cold"}) {
        const auto m = with_surface(model, "a");
        ThermalSimulator sim(m, make_scenario(m, c, "spin", "min"));
        const auto r = sim.run_periodic();
        for (std::size_t i = 0; i < r.histories.size(); ++i) {
          const auto& s = r.histories[i].samples;
          double integral = 0.0;
          for (std::size_t k = 1; k < s.size(); ++k)
            integral += 0.5 * (s[k].flux.net() + s[k - 1].flux.net()) * (s[k].time - s[k - 1].time);
          const double residual =
              std::abs(integral / sim.nodes()[i].heat_capacity - (s.back().temperature - s.front().temperature));
          worst_residual = std::max(worst_residual, residual);
          for (const auto& x : s) {
            if (!x.in_eclipse) continue;
            ++dark;
            eclipse_clean = eclipse_clean && x.flux.q_solar == 0.0 && x.flux.q_albedo == 0.0;
          }
        }
      }
    });
    v.check(worst_residual <= 0.05, "bookkeeping residual " + f(worst_residual, 4) + " K");
    v.check(eclipse_clean && dark > 0, "eclipse samples with zero solar/albedo: " + std::to_string(dark));
    v.check(t_ref < 2 * 10.0, "reference runs " + f(t_ref, 2) + " s");
  });

  all &= criterion(5, "reference temperature ranges with the calibrated catalog", 6 * 60.0, [&](Verdict& v) {
    struct Target {
      const char* c;
      const char* surface;
      const char* node;
      double lo, hi, tol;
      const char* label;
    };
    const Target targets[] = {{"hot", "a", "DSAP", 34.0, 68.0, 5.0, "C1-a DSAP"},
                              {"cold", "a", "DSAP", -43.0, 55.0, 5.0, "C2-a DSAP"},
                              {"hot", "d", "BODY", 46.0, 49.0, 3.0, "C1-d BODY"},
                              {"cold", "d", "BODY", 0.0, 15.0, 3.0, "C2-d BODY"}};
    for (const auto& t : targets) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto s = reference_range(t.c, t.surface, t.node);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const double lo = kelvin_to_celsius(s.t_min_k), hi = kelvin_to_celsius(s.t_max_k);
      const bool ok = std::abs(lo - t.lo) <= t.tol && std::abs(hi - t.hi) <= t.tol && secs < 60.0;
      v.check(ok, std::string(t.label) + " [" + f(lo, 1) + ", " + f(hi, 1) + "] vs [" + f(t.lo, 0) + ", " +
                      f(t.hi, 0) + "] +-" + f(t.tol, 0));
    }
    const auto body_hot = reference_range("hot", "d", "BODY");
    v.check(body_hot.t_max_k - body_hot.t_min_k < 3.0,
            "case-1 BODY p-p " + f(body_hot.t_max_k - body_hot.t_min_k, 2) + " K < 3");
    const auto dsap_cold = reference_range("cold", "a", "DSAP");
    v.check(dsap_cold.t_max_k - dsap_cold.t_min_k >= 80.0,
            "case-2 DSAP amplitude " + f(dsap_cold.t_max_k - dsap_cold.t_min_k, 1) + " K >= 80");
  });

  all &= criterion(6, "vibration processing", 5.0, [](Verdict& v) {
    const PsdProfile table({{20.0, 0.01}, {50.0, 0.01}, {70.0, 0.0115}, {120.0, 0.0155}, {230.0, 0.0155}});
    const double g = grms(table, 20.0, 230.0);
    v.check(std::abs(g - 1.70) <= 0.01, "Grms 20-230 " + f(g, 4));
    double worst = 0.0;
    for (double b : {30.0, 50.0, 70.0, 95.0, 120.0, 200.0}) {
      const double lo = grms(table, 20.0, b), hi = grms(table, b, 230.0);
      worst = std::max(worst, std::abs(g - std::sqrt(lo * lo + hi * hi)));
    }
    v.check(worst <= 1e-12, "additivity " + f(worst * 1e15, 2) + "e-15");

    const double fs = 4096.0;
    const auto rec = preflight::testing::simulate_sdof(100.0, 10.0, fs, static_cast<std::size_t>(fs * 40), 42);
    WelchOptions o;
    o.segment_length = 4096;
    const auto in = estimate_psd(TimeSeries{"base", fs, rec.base}, o);
    const auto mag = response_mag(estimate_psd(TimeSeries{"tip", fs, rec.response}, o), in);
    const double f1 = first_resonance(mag, 5.0);
    const double peak = mag.magnification[static_cast<std::size_t>(std::lround(f1 / in.resolution()))];
    v.check(std::abs(f1 - 100.0) <= in.resolution(), "SDOF peak " + f(f1, 2) + " Hz");
    v.check(std::abs(peak - 10.0) <= 1.5, "MAG " + f(peak, 2) + " vs Q 10 +-15%");

    std::mt19937_64 rng(11);
    std::normal_distribution<double> noise;
    TimeSeries white{"w", 2048.0, std::vector<double>(2048 * 40)};
    for (auto& x : white.samples) x = noise(rng);
    WelchOptions ow;
    ow.segment_length = 2048;
    const auto pw = estimate_psd(white, ow);
    v.check(pw.averages >= 64 && std::abs(pw.integral() - 1.0) <= 0.05,
            "white noise integral " + f(pw.integral(), 4) + " (" + std::to_string(pw.averages) + " avg)");
    TimeSeries tone{"s", 1024.0, std::vector<double>(1024 * 16)};
    for (std::size_t i = 0; i < tone.samples.size(); ++i)
      tone.samples[i] = 2.0 * std::sin(2.0 * std::numbers::pi * 100.0 * i / 1024.0);
    WelchOptions ot;
    ot.segment_length = 1024;
    const double ts = estimate_psd(tone, ot).integral();
    v.check(std::abs(ts - 2.0) <= 0.04, "sine integral " + f(ts, 4) + " vs A^2/2 = 2");

    const auto gate = min_frequency_check({{"DSAP", 53.0}, {"satellite", 232.0}}, 60.0);
    v.check(!gate[0].pass && gate[1].pass, "53 Hz fails, 232 Hz passes the 60 Hz gate");
  });

  all &= criterion(7, "structural oracles", 5.0, [&](Verdict& v) {
    const double e = 68.9e9, len = 0.261, w = 0.073, t = 1.2e-3, mass = 0.117;
    const double inertia = w * t * t * t / 12.0, ei = e * inertia, mu = mass / len;
    std::vector<double> x(21);
    for (int i = 0; i <= 20; ++i) x[i] = len * i / 20;
    const double scale = std::sqrt(ei / (mu * std::pow(len, 4))) / (2.0 * std::numbers::pi);
    const double fc = modal_frequencies(continuous_beam(x, ei, mu, t / 2, inertia, BoundaryCondition::kClampedFree), 1)
                          .frequencies_hz[0];
    const double fc_ref = 1.875104 * 1.875104 * scale;
    v.check(rel(fc, fc_ref) < 0.005, "cantilever " + f(fc, 3) + " vs " + f(fc_ref, 3) + " Hz");
    const auto pp = continuous_beam(x, ei, mu, t / 2, inertia, BoundaryCondition::kPinnedPinned);
    const double fp = modal_frequencies(pp, 1).frequencies_hz[0];
    const double fp_ref = std::numbers::pi * std::numbers::pi * scale;
    v.check(rel(fp, fp_ref) < 0.005, "pinned " + f(fp, 3) + " vs " + f(fp_ref, 3) + " Hz");
    const auto s = static_load(pp, 1.0);
    const double q = mu * constants::kStandardGravity;
    const double d_ref = 5.0 * q * std::pow(len, 4) / (384.0 * ei);
    const double s_ref = q * len * len / 8.0 * (t / 2) / inertia;
    v.check(rel(s.max_deflection, d_ref) < 0.005 && rel(s.max_stress, s_ref) < 0.005,
            "static " + f(s.max_deflection * 1e3, 4) + " mm / " + f(s.max_stress / 1e6, 4) + " MPa");
    const double f4 =
        modal_frequencies(continuous_beam(x, 4 * ei, mu, t / 2, inertia, BoundaryCondition::kClampedFree), 1)
            .frequencies_hz[0];
    v.check(rel(f4, 2.0 * fc) < 0.001, "4E ratio " + f(f4 / fc, 5));

    const auto spec = with_rigid_hinges(model.chains.at("dsap_al_deployed"));
    const auto chain = build_chain(std::vector<PanelSpec>(4, model.panels.at("DSAP_AL")), model.materials, spec);
    const auto& e0 = chain.elements.front();
    const auto beam = continuous_beam(chain.node_x, e0.ei, chain.total_mass / chain.span, e0.half_thickness,
                                      e0.inertia, chain.bc);
    const auto a = modal_frequencies(chain, 3), b = modal_frequencies(beam, 3);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) worst = std::max(worst, rel(a.frequencies_hz[i], b.frequencies_hz[i]));
    v.check(worst < 0.001, "rigid chain vs beam " + f(worst * 100, 5) + "%");

    // diagnostic only
    const auto fit = fit_hinge_stiffness(model, "dsap_al_panel", 9.16);
    v.check(std::abs(fit.frequency_hz - 9.16) < 0.01,
            "hinge fit " + f(fit.stiffness, 2) + " N m/rad -> " + f(fit.frequency_hz, 3) + " Hz");
  });

  all &= criterion(8, "determinism of CLI outputs", 60.0, [](Verdict& v) {
    const fs::path dir = fs::temp_directory_path() / ("preflight-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string model_path = preflight::testing::reference_model_path();
    {
      const double fs_hz = 2048.0;
      const auto rec = preflight::testing::simulate_sdof(100.0, 10.0, fs_hz, 2048 * 16, 5);
      std::ofstream csv(dir / "sdof.csv");
      csv << "sample_rate," << fs_hz << "\nbase,tip\n";
      for (std::size_t i = 0; i < rec.base.size(); ++i) csv << rec.base[i] << "," << rec.response[i] << "\n";
    }
    const std::string out = (dir / "out").string();
    const std::vector<std::vector<std::string>> runs = {
        {"thermal", "--model", model_path, "--case", "cold", "--surface", "a", "--out", out + "/thermal"},
        {"sweep", "--model", model_path, "--cases", "hot,cold", "--surfaces", "a,d", "--jobs", "4", "--out",
         out + "/sweep"},
        {"power", "--model", model_path, "--out", out + "/power"},
        {"vib", "resonance", "--input", (dir / "sdof.csv").string(), "--reference", "base", "--out", out + "/vib"},
        {"struct", "modal", "--model", model_path, "--chain", "dsap_al_deployed", "--out", out + "/modal"},
        {"struct", "static", "--model", model_path, "--chain", "dsap_al_panel", "--out", out + "/static"},
    };
    auto snapshot = [&] {
      std::map<std::string, std::string> files;
      for (const auto& e : fs::recursive_directory_iterator(out)) {
        if (!e.is_regular_file()) continue;
        const std::string text = slurp(e.path());
        files[fs::relative(e.path(), out).string()] =
            e.path().filename() == "manifest.json" ? strip_timestamp(text) : text;
      }
      return files;
    };
    for (const auto& r : runs) run_cli(r);
    const auto first = snapshot();
    for (const auto& r : runs) run_cli(r);
    const auto second = snapshot();
    int differing = 0;
    for (const auto& [name, text] : first) {
      auto it = second.find(name);
      if (it == second.end() || it->second != text) ++differing;
    }
    v.check(!first.empty() && differing == 0 && first.size() == second.size(),
            std::to_string(first.size()) + " files compared, " + std::to_string(differing) + " differ");
    std::error_code ec;
    fs::remove_all(dir, ec);
  });

  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - suite_start).count();
  std::cout << (all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << " (acceptance runtime " << f(total, 1) << " s)"
            << std::endl;
  return all ? 0 : 1;
}
