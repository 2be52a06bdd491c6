#pragma once
// Synthetic oscilloscope traces for the lab-data tests.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "lsa/labdata.hpp"

namespace lsa::fixtures {

/// 2000 samples at 1 ps, Gaussian pulse of the given FWHM, centred at
/// t = 0, scaled so that its energy under `calibration` W/V is `energy_pj`.
/// A DC offset rides on the whole trace.
inline Waveform gaussian_pulse(double energy_pj, double calibration, double fwhm_s = 60e-12,
                               double offset_v = 2e-3) {
  Waveform wf;
  wf.sample_interval = 1e-12;
  wf.start_time = -800e-12;
  const double sigma = fwhm_s / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double peak_v = energy_pj * 1e-12 / (calibration * sigma * std::sqrt(2.0 * std::numbers::pi));
  for (int i = 0; i < 2000; ++i) {
    const double t = wf.start_time + i * wf.sample_interval;
    wf.samples.push_back(offset_v + peak_v * std::exp(-0.5 * t * t / (sigma * sigma)));
  }
  return wf;
}

struct LabSet {
  double power_mw;
  double energy_pj;
};

/// Writes one waveform per entry plus an index file; returns the index path.
inline std::filesystem::path write_lab_set(const std::filesystem::path& dir, const std::vector<LabSet>& set,
                                           double calibration) {
  std::filesystem::create_directories(dir);
  std::ofstream index(dir / "index.txt");
  index << "# label, tampering power (mW), waveform\n";
  int i = 0;
  for (const auto& e : set) {
    const std::string name = "trace" + std::to_string(i++) + ".csv";
    save_waveform(dir / name, gaussian_pulse(e.energy_pj, calibration));
    index << "run" << i << ", " << e.power_mw << ", " << name << "\n";
  }
  return dir / "index.txt";
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lsa_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace lsa::fixtures
