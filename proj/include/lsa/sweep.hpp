#pragma once
// Scenario sweeps and lab-data runs behind the command-line tool.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lsa/bsa_sdp.hpp"
#include "lsa/decoy_bounds.hpp"
#include "lsa/labdata.hpp"
#include "lsa/optimize.hpp"

namespace lsa {

/// Which intensity the photon-number weights of the upper bound use.
enum class PhotonWeightMode { actual, believed };

struct RunConfig {
  Protocol protocol = Protocol::bb84;
  std::vector<double> distances_km{40.0};
  std::vector<double> kappas{1.0};
  ChannelParams params{};
  bool upper_bound = false;
  int bb84_n_max = 10;
  int mdi_cap = 5;
  double solver_tolerance = 1e-8;
  PhotonWeightMode weight_mode = PhotonWeightMode::actual;
  OptimizationConfig optimizer{};
  std::filesystem::path out;        // empty: standard output
  std::filesystem::path cache_dir;  // empty: no optimization cache

  void validate() const;
};

/// Reads a JSON configuration; absent keys keep their defaults.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& json_text);

/// Parses "a,b,c" or "start:stop:step" into an ascending grid.
std::vector<double> parse_grid(const std::string& text);

inline constexpr const char* kSweepHeader = "distance_km,kappa,r_l_estimated,r_l_correct,r_u";
inline constexpr const char* kLabHeader = "tampering_power_mw,pulse_energy_pj,kappa";

std::string format_row(const KeyRateReport& r);

/// Optimized intensities at one distance, via the on-disk cache when configured.
OptimizedIntensities optimized_for(const RunConfig& config, double distance_km);

/// Stable key of everything an optimization result depends on.
std::string optimization_cache_key(const RunConfig& config, double distance_km);

/// Rows in grid order (distance major, kappa minor). Each distance's rows
/// are written and flushed as soon as they are complete.
std::vector<KeyRateReport> run_sweep(const RunConfig& config, std::ostream& out);

std::vector<EnergyRecord> run_labdata(const std::filesystem::path& index, double calibration_w_per_v,
                                      std::ostream& out);

}  // namespace lsa
