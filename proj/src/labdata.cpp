#include "lsa/labdata.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lsa/core.hpp"
#include "lsa/kernels.hpp"

namespace lsa {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  if (delimiter != 0) {
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, delimiter)) out.push_back(trim(f));
    return out;
  }
  std::string cur;
  for (char ch : line) {
    if (ch == ' ' || ch == '\t' || ch == ',' || ch == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool parse_double(const std::string& s, double& v) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && ptr == end && std::isfinite(v);
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

}  // namespace

Waveform load_waveform(const std::filesystem::path& path, const WaveformFormat& format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open waveform " + path.string());
  std::vector<double> times;
  Waveform wf;
  wf.label = path.stem().string();
  const int need = std::max(format.time_column, format.amplitude_column) + 1;
  std::string line;
  std::size_t line_no = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == format.comment) continue;
    const auto fields = split_fields(t, format.delimiter);
    double time = 0.0;
    double amp = 0.0;
    const bool ok = static_cast<int>(fields.size()) >= need && parse_double(fields[format.time_column], time) &&
                    parse_double(fields[format.amplitude_column], amp);
    if (!ok) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      throw Error(ErrorCode::parse, where(path, line_no) + "expected two numeric columns, got '" + t + "'");
    }
    header_allowed = false;
    times.push_back(time);
    wf.samples.push_back(amp);
  }
  if (wf.samples.size() < 2) throw Error(ErrorCode::parse, path.string() + ": fewer than two samples");
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw Error(ErrorCode::jitter, path.string() + ": time axis is not increasing");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double step = times[i] - times[i - 1];
    if (std::abs(step - dt) > format.max_jitter * dt) {
      std::ostringstream os;
      os << path.string() << ": time step " << step << " before sample " << i << " deviates from mean " << dt;
      throw Error(ErrorCode::jitter, os.str());
    }
  }
  wf.sample_interval = dt;
  wf.start_time = times.front();
  return wf;
}

void save_waveform(const std::filesystem::path& path, const Waveform& wf) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write waveform " + path.string());
  out << "# time_s,amplitude_v\n";
  char buf[64];
  for (std::size_t i = 0; i < wf.samples.size(); ++i) {
    const double t = wf.start_time + static_cast<double>(i) * wf.sample_interval;
    std::snprintf(buf, sizeof buf, "%.17g,", t);
    out << buf;
    std::snprintf(buf, sizeof buf, "%.17g\n", wf.samples[i]);
    out << buf;
  }
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

double pulse_energy(const Waveform& wf, double calibration_w_per_v, double baseline_fraction) {
  if (!(calibration_w_per_v > 0.0)) throw Error(ErrorCode::domain, "pulse_energy: calibration must be positive");
  if (!(wf.sample_interval > 0.0) || wf.samples.size() < 2) {
    throw Error(ErrorCode::domain, "pulse_energy: waveform needs two samples and a positive interval");
  }
  if (!(baseline_fraction >= 0.0 && baseline_fraction < 1.0)) {
    throw Error(ErrorCode::window, "pulse_energy: baseline window must be a fraction in [0,1)");
  }
  const auto count = static_cast<std::size_t>(std::floor(baseline_fraction * static_cast<double>(wf.samples.size())));
  if (baseline_fraction > 0.0 && count == 0) {
    throw Error(ErrorCode::window, "pulse_energy: baseline window contains no samples");
  }
  const std::span<const double> all(wf.samples);
  const double baseline = count > 0 ? kernels::sum(all.first(count)) / static_cast<double>(count) : 0.0;
  const double raw = kernels::trapezoid(all, wf.sample_interval);
  const double duration = wf.sample_interval * static_cast<double>(wf.samples.size() - 1);
  return (raw - baseline * duration) * calibration_w_per_v * 1e12;
}

double kappa_from_energies(double e_attacked_pj, double e_baseline_pj) {
  if (!(e_baseline_pj > 0.0)) throw Error(ErrorCode::zero_baseline, "kappa_from_energies: baseline energy must be positive");
  return e_attacked_pj / e_baseline_pj;
}

double cavity_power(double injected_power_w, double isolation_db) {
  if (!(injected_power_w >= 0.0 && isolation_db >= 0.0)) {
    throw Error(ErrorCode::domain, "cavity_power: power and isolation must be >= 0");
  }
  return injected_power_w * attenuation_from_db(isolation_db);
}

std::vector<IndexEntry> load_index(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open index " + path.string());
  std::vector<IndexEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_fields(t, ',');
    IndexEntry e;
    if (fields.size() != 3 || fields[0].empty() || fields[2].empty() ||
        !parse_double(fields[1], e.tampering_power_mw) || e.tampering_power_mw < 0.0) {
      throw Error(ErrorCode::parse, where(path, line_no) + "expected 'label, power_mw, path'");
    }
    e.label = fields[0];
    e.waveform = std::filesystem::path(fields[2]);
    if (e.waveform.is_relative()) e.waveform = path.parent_path() / e.waveform;
    out.push_back(std::move(e));
  }
  if (out.empty()) throw Error(ErrorCode::parse, path.string() + ": index has no records");
  return out;
}

std::vector<EnergyRecord> analyze_index(const std::filesystem::path& index, double calibration_w_per_v,
                                        const WaveformFormat& format) {
  const auto entries = load_index(index);
  std::vector<EnergyRecord> records;
  const EnergyRecord* baseline = nullptr;
  for (const auto& e : entries) {
    Waveform wf = load_waveform(e.waveform, format);
    records.push_back({e.label, e.tampering_power_mw, pulse_energy(wf, calibration_w_per_v), 1.0});
  }
  for (const auto& r : records) {
    if (r.tampering_power_mw == 0.0) {
      baseline = &r;
      break;
    }
  }
  if (!baseline) throw Error(ErrorCode::missing_baseline, index.string() + ": no zero-power baseline record");
  const double base = baseline->pulse_energy_pj;
  for (auto& r : records) r.kappa = kappa_from_energies(r.pulse_energy_pj, base);
  return records;
}

}  // namespace lsa
