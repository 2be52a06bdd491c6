#pragma once
// Measured pulse waveforms: loading, energy integration, intensity ratios
// and isolation arithmetic.

#include <filesystem>
#include <string>
#include <vector>

namespace lsa {

struct Waveform {
  double sample_interval = 0.0;  // seconds
  double start_time = 0.0;       // seconds
  std::vector<double> samples;   // volts
  std::string label;
  double tampering_power_mw = 0.0;
};

/// Text layout of a waveform file. Lines starting with `comment` are
/// skipped; a single non-numeric header line before the data is allowed.
struct WaveformFormat {
  char comment = '#';
  char delimiter = 0;  // 0: any whitespace or comma
  int time_column = 0;
  int amplitude_column = 1;
  double max_jitter = 1e-3;  // relative deviation of any time step
};

Waveform load_waveform(const std::filesystem::path& path, const WaveformFormat& format = {});
void save_waveform(const std::filesystem::path& path, const Waveform& wf);

/// Integral of (amplitude - baseline) * calibration over time, in pJ. The
/// baseline is the mean of the first `baseline_fraction` of the samples.
double pulse_energy(const Waveform& wf, double calibration_w_per_v, double baseline_fraction = 0.1);

double kappa_from_energies(double e_attacked_pj, double e_baseline_pj);

/// Power reaching the laser cavity after `isolation_db` of isolation.
double cavity_power(double injected_power_w, double isolation_db);

struct IndexEntry {
  std::string label;
  double tampering_power_mw = 0.0;
  std::filesystem::path waveform;  // resolved against the index location
};

/// One record per line: label, tampering power in mW, waveform path.
std::vector<IndexEntry> load_index(const std::filesystem::path& path);

struct EnergyRecord {
  std::string label;
  double tampering_power_mw = 0.0;
  double pulse_energy_pj = 0.0;
  double kappa = 1.0;
};

/// Energies of every indexed waveform and their ratio to the zero-power
/// baseline record.
std::vector<EnergyRecord> analyze_index(const std::filesystem::path& index, double calibration_w_per_v,
                                        const WaveformFormat& format = {});

}  // namespace lsa
