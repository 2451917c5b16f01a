#pragma once

// Random-vibration processing: breakpoint profiles, Grms, Welch PSD
// estimation, response magnification and resonance picking.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "preflight/errors.hpp"

namespace preflight {

/// Piecewise log-log acceleration spectrum (Hz, G^2/Hz).
struct PsdProfile {
  std::vector<double> frequencies;
  std::vector<double> levels;

  PsdProfile() = default;
  explicit PsdProfile(const std::vector<std::pair<double, double>>& breakpoints) {
    for (const auto& [f, p] : breakpoints) {
      frequencies.push_back(f);
      levels.push_back(p);
    }
    validate();
  }

  void validate() const {
    if (frequencies.size() != levels.size()) throw DomainError("profile frequency/level count mismatch");
    if (frequencies.size() < 2) throw DomainError("profile needs at least two breakpoints");
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
      if (!(frequencies[i] > 0.0)) throw DomainError("profile frequencies must be > 0");
      if (!(levels[i] > 0.0)) throw DomainError("profile levels must be > 0");
      if (i > 0 && !(frequencies[i] > frequencies[i - 1]))
        throw DomainError("profile frequencies must be strictly increasing");
    }
  }
  double first() const { return frequencies.front(); }
  double last() const { return frequencies.back(); }
};

inline double psd_interp(const PsdProfile& profile, double f) {
  if (f < profile.first() || f > profile.last())
    throw DomainError("frequency " + std::to_string(f) + " Hz outside the profile range");
  auto it = std::lower_bound(profile.frequencies.begin(), profile.frequencies.end(), f);
  auto i = static_cast<std::size_t>(it - profile.frequencies.begin());
  if (profile.frequencies[i] == f) return profile.levels[i];
  const double f0 = profile.frequencies[i - 1], f1 = profile.frequencies[i];
  const double p0 = profile.levels[i - 1], p1 = profile.levels[i];
  const double slope = std::log(p1 / p0) / std::log(f1 / f0);
  return p0 * std::pow(f / f0, slope);
}

namespace vib_detail {

// Integral of p0 (f/f0)^n over [a, b].
inline double power_law_integral(double f0, double p0, double n, double a, double b) {
  if (std::abs(n + 1.0) < 1e-12) return p0 * f0 * std::log(b / a);
  return p0 * f0 / (n + 1.0) * (std::pow(b / f0, n + 1.0) - std::pow(a / f0, n + 1.0));
}

}  // namespace vib_detail

/// Mean-square acceleration [G^2] between f_lo and f_hi.
inline double band_power(const PsdProfile& profile, double f_lo, double f_hi) {
  if (!(f_hi >= f_lo)) throw DomainError("band upper edge below lower edge");
  if (f_lo < profile.first() || f_hi > profile.last())
    throw DomainError("band [" + std::to_string(f_lo) + ", " + std::to_string(f_hi) + "] Hz not covered by the profile");
  double sum = 0.0;
  for (std::size_t i = 1; i < profile.frequencies.size(); ++i) {
    const double f0 = profile.frequencies[i - 1], f1 = profile.frequencies[i];
    const double a = std::max(f0, f_lo), b = std::min(f1, f_hi);
    if (b <= a) continue;
    const double p0 = profile.levels[i - 1], p1 = profile.levels[i];
    const double n = std::log(p1 / p0) / std::log(f1 / f0);
    sum += vib_detail::power_law_integral(f0, p0, n, a, b);
  }
  return sum;
}

inline double grms(const PsdProfile& profile, double f_lo, double f_hi) {
  return std::sqrt(band_power(profile, f_lo, f_hi));
}

inline double grms(const PsdProfile& profile) { return grms(profile, profile.first(), profile.last()); }

struct TimeSeries {
  std::string channel;
  double sample_rate = 0.0;  // Hz
  std::vector<double> samples;  // G

  void validate() const {
    if (!(sample_rate > 0.0)) throw DomainError("sample rate must be > 0 for channel '" + channel + "'");
    if (samples.size() < 2) throw DomainError("channel '" + channel + "' needs at least two samples");
  }
};

/// One-sided spectral density on a uniform grid starting at 0 Hz.
struct SampledPsd {
  std::string channel;
  std::vector<double> frequencies;
  std::vector<double> density;  // G^2/Hz
  int averages = 0;

  double resolution() const { return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0; }
  double integral() const {
    double s = 0.0;
    for (double d : density) s += d;
    return s * resolution();
  }
};

enum class Window { kHann, kRectangular };

struct WelchOptions {
  std::size_t segment_length = 0;  // 0: largest power of two giving >= min_averages
  double overlap = 0.5;
  Window window = Window::kHann;
  int min_averages = 8;
};

inline int welch_segment_count(std::size_t n, std::size_t length, double overlap) {
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(length) * (1.0 - overlap))));
  if (length > n) return 0;
  return static_cast<int>((n - length) / hop + 1);
}

inline std::size_t default_segment_length(std::size_t n, double overlap, int min_averages) {
  std::size_t length = 1;
  while (length * 2 <= n) length *= 2;
  while (length > 16 && welch_segment_count(n, length, overlap) < min_averages) length /= 2;
  return length;
}

namespace vib_detail {

// FFTW planning is not thread-safe; execution on distinct plans is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  void execute() { fftw_execute(plan_); }
  double power(std::size_t k) const { return out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1]; }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace vib_detail

/// Averaged modified periodogram (Welch). Each segment has its mean removed.
inline SampledPsd estimate_psd(const TimeSeries& series, const WelchOptions& options = {}) {
  series.validate();
  const std::size_t n = series.samples.size();
  if (!(options.overlap >= 0.0 && options.overlap < 1.0)) throw DomainError("overlap must lie in [0, 1)");
  const std::size_t length =
      options.segment_length ? options.segment_length : default_segment_length(n, options.overlap, options.min_averages);
  if (length < 2 || length > n)
    throw DomainError("series '" + series.channel + "' too short: " + std::to_string(n) + " samples for segments of " +
                      std::to_string(length));
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(length) * (1.0 - options.overlap))));
  const int segments = welch_segment_count(n, length, options.overlap);

  std::vector<double> w(length, 1.0);
  if (options.window == Window::kHann) {
    for (std::size_t i = 0; i < length; ++i)
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(length));
  }
  double w2 = 0.0;
  for (double v : w) w2 += v * v;

  const std::size_t bins = length / 2 + 1;
  SampledPsd psd;
  psd.channel = series.channel;
  psd.averages = segments;
  psd.density.assign(bins, 0.0);
  psd.frequencies.resize(bins);
  for (std::size_t k = 0; k < bins; ++k)
    psd.frequencies[k] = static_cast<double>(k) * series.sample_rate / static_cast<double>(length);

  vib_detail::RealFft fft(length);
  for (int s = 0; s < segments; ++s) {
    const std::size_t start = static_cast<std::size_t>(s) * hop;
    double mean = 0.0;
    for (std::size_t i = 0; i < length; ++i) mean += series.samples[start + i];
    mean /= static_cast<double>(length);
    for (std::size_t i = 0; i < length; ++i) fft.input()[i] = (series.samples[start + i] - mean) * w[i];
    fft.execute();
    for (std::size_t k = 0; k < bins; ++k) psd.density[k] += fft.power(k);
  }
  const double scale = 1.0 / (series.sample_rate * w2 * segments);
  for (std::size_t k = 0; k < bins; ++k) {
    const bool edge = k == 0 || (length % 2 == 0 && k == bins - 1);
    psd.density[k] *= scale * (edge ? 1.0 : 2.0);
  }
  return psd;
}

struct MagSpectrum {
  std::string channel;
  std::string reference;
  std::vector<double> frequencies;
  std::vector<double> magnification;  // 0 where masked
  std::vector<bool> valid;
};

constexpr double kMagReferenceFloor = 1e-8;  // G^2/Hz

inline MagSpectrum response_mag(const SampledPsd& channel, const SampledPsd& reference,
                                double floor = kMagReferenceFloor) {
  if (channel.frequencies.size() != reference.frequencies.size())
    throw DomainError("frequency grids of '" + channel.channel + "' and '" + reference.channel + "' differ");
  for (std::size_t k = 0; k < channel.frequencies.size(); ++k) {
    const double a = channel.frequencies[k], b = reference.frequencies[k];
    if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b)))
      throw DomainError("frequency grids of '" + channel.channel + "' and '" + reference.channel + "' differ");
  }
  MagSpectrum mag;
  mag.channel = channel.channel;
  mag.reference = reference.channel;
  mag.frequencies = channel.frequencies;
  mag.magnification.assign(channel.frequencies.size(), 0.0);
  mag.valid.assign(channel.frequencies.size(), false);
  for (std::size_t k = 0; k < channel.frequencies.size(); ++k) {
    if (reference.density[k] < floor) continue;
    mag.magnification[k] = std::sqrt(std::max(channel.density[k], 0.0) / reference.density[k]);
    mag.valid[k] = true;
  }
  return mag;
}

struct PeakOptions {
  double ratio = 1.5;                 // peak / windowed median
  double half_window_octaves = 0.5;   // median window is f * 2^(+-half_window)
};

/// Lowest local maximum above f_min that stands `ratio` times over the median
/// magnification in its surrounding window.
inline double first_resonance(const MagSpectrum& mag, double f_min = 0.0, const PeakOptions& options = {}) {
  const std::size_t n = mag.frequencies.size();
  if (n == 0) throw DomainError("empty magnification spectrum");
  std::vector<double> window;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double f = mag.frequencies[k];
    if (!(f > f_min) || !mag.valid[k] || !mag.valid[k - 1] || !mag.valid[k + 1]) continue;
    const double m = mag.magnification[k];
    if (!(m > mag.magnification[k - 1] && m >= mag.magnification[k + 1])) continue;
    const double lo = f * std::exp2(-options.half_window_octaves);
    const double hi = f * std::exp2(options.half_window_octaves);
    window.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (mag.valid[j] && mag.frequencies[j] >= lo && mag.frequencies[j] <= hi) window.push_back(mag.magnification[j]);
    }
    auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
    std::nth_element(window.begin(), mid, window.end());
    double median = *mid;
    if (window.size() % 2 == 0) {
      const double lower = *std::max_element(window.begin(), mid);
      median = 0.5 * (median + lower);
    }
    if (m > options.ratio * median) return f;
  }
  throw DomainError("no resonance peak above " + std::to_string(f_min) + " Hz in channel '" + mag.channel + "'");
}

struct FrequencyCheck {
  std::string channel;
  double frequency_hz = 0.0;
  bool pass = false;
};

/// Strict gate: a resonance passes only if it exceeds the limit.
inline std::vector<FrequencyCheck> min_frequency_check(const std::vector<std::pair<std::string, double>>& resonances,
                                                       double limit_hz) {
  if (!(limit_hz > 0.0)) throw DomainError("frequency limit must be > 0");
  std::vector<FrequencyCheck> out;
  for (const auto& [channel, f] : resonances) out.push_back({channel, f, f > limit_hz});
  return out;
}

// CSV input --------------------------------------------------------------

namespace vib_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double number(const std::string& cell, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": not a number '" + cell + "'");
  }
}

inline std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

inline std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

}  // namespace vib_detail

/// Breakpoint CSV with header `freq_hz,psd_g2hz`.
inline PsdProfile read_profile(std::istream& in, const std::string& name = "profile") {
  const auto lines = vib_detail::read_lines(in);
  if (lines.empty()) throw ParseError(name + ": empty file");
  const auto header = vib_detail::split(lines[0]);
  if (header.size() != 2 || header[0] != "freq_hz" || header[1] != "psd_g2hz")
    throw ParseError(name + ": expected header 'freq_hz,psd_g2hz'");
  std::vector<std::pair<double, double>> points;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = vib_detail::split(lines[i]);
    const std::string where = name + ":" + std::to_string(i + 1);
    if (cells.size() != 2) throw ParseError(where + ": expected 2 columns");
    points.emplace_back(vib_detail::number(cells[0], where), vib_detail::number(cells[1], where));
  }
  try {
    return PsdProfile(points);
  } catch (const DomainError& e) {
    throw ParseError(name + ": " + e.what());
  }
}

inline PsdProfile read_profile_file(const std::string& path) {
  auto in = vib_detail::open(path);
  return read_profile(in, path);
}

/// Multi-channel CSV. Either the first column is `time_s` (uniform spacing),
/// or a `sample_rate,<Hz>` line precedes the channel header.
inline std::vector<TimeSeries> read_time_series(std::istream& in, const std::string& name = "series") {
  const auto lines = vib_detail::read_lines(in);
  std::size_t row = 0;
  double rate = 0.0;
  if (row < lines.size()) {
    const auto first = vib_detail::split(lines[row]);
    if (!first.empty() && first[0] == "sample_rate") {
      if (first.size() != 2) throw ParseError(name + ":1: expected 'sample_rate,<Hz>'");
      rate = vib_detail::number(first[1], name + ":1");
      ++row;
    }
  }
  if (row >= lines.size()) throw ParseError(name + ": missing channel header");
  const auto header = vib_detail::split(lines[row]);
  const std::size_t header_row = row++;
  const bool timed = !header.empty() && header[0] == "time_s";
  if (timed && rate > 0.0) throw ParseError(name + ": give either a time_s column or a sample_rate line, not both");
  if (!timed && !(rate > 0.0)) throw ParseError(name + ": need a time_s column or a sample_rate line");
  const std::size_t first_channel = timed ? 1 : 0;
  if (header.size() <= first_channel) throw ParseError(name + ": no channel columns");

  std::vector<TimeSeries> out(header.size() - first_channel);
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c].channel = header[first_channel + c];
    if (out[c].channel.empty()) throw ParseError(name + ": empty channel name");
  }
  std::vector<double> times;
  for (; row < lines.size(); ++row) {
    const auto cells = vib_detail::split(lines[row]);
    const std::string where = name + ":" + std::to_string(row + 1);
    if (cells.size() != header.size()) throw ParseError(where + ": expected " + std::to_string(header.size()) + " columns");
    if (timed) times.push_back(vib_detail::number(cells[0], where));
    for (std::size_t c = 0; c < out.size(); ++c) out[c].samples.push_back(vib_detail::number(cells[first_channel + c], where));
  }
  if (timed) {
    if (times.size() < 2) throw ParseError(name + ": need at least two samples");
    const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(dt > 0.0)) throw ParseError(name + ": time_s must increase");
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (std::abs(times[i] - times[i - 1] - dt) > 1e-6 * dt + 1e-12)
        throw ParseError(name + ":" + std::to_string(header_row + i + 2) + ": non-uniform sampling");
    }
    rate = 1.0 / dt;
  }
  for (auto& s : out) {
    s.sample_rate = rate;
    try {
      s.validate();
    } catch (const DomainError& e) {
      throw ParseError(name + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<TimeSeries> read_time_series_file(const std::string& path) {
  auto in = vib_detail::open(path);
  return read_time_series(in, path);
}

}  // namespace preflight
