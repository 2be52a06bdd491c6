// lsa: key-rate sweeps under the laser-seeding attack, and kappa extraction
// from recorded pulse waveforms.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lsa/sweep.hpp"

namespace {

int fail(const std::string& code, const std::string& message) {
  std::string flat = message;
  for (char& ch : flat) {
    if (ch == '\n') ch = ' ';
  }
  std::fprintf(stderr, "error: code=%s message=%s\n", code.c_str(), flat.c_str());
  return 2;
}

// Opens the target file or falls back to stdout when no path is given.
template <class F>
void with_output(const std::filesystem::path& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw lsa::Error(lsa::ErrorCode::io, "cannot write " + path.string());
  write(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laser-seeding attack analysis for decoy-state BB84 and MDI-QKD"};
  app.require_subcommand(1);

  auto* sweep = app.add_subcommand("sweep", "Key rates over a distance x kappa grid (CSV)");
  std::string config_path, protocol, distance, kappa, out_path, cache_dir, rn_mode;
  bool upper = false;
  int n_max = 0, mdi_cap = 0;
  double tolerance = 0.0;
  sweep->add_option("--config", config_path, "JSON configuration file");
  sweep->add_option("--protocol", protocol, "bb84 or mdi");
  sweep->add_option("--distance", distance, "km: list a,b,c or start:stop:step");
  sweep->add_option("--kappa", kappa, "intensity factor: list or start:stop:step");
  sweep->add_flag("--upper-bound", upper, "attach the SDP upper bound r_u");
  sweep->add_option("--out", out_path, "output CSV (default stdout)");
  sweep->add_option("--cache-dir", cache_dir, "directory for cached optimized intensities");
  sweep->add_option("--n-max", n_max, "BB84 photon-number cap for r_u");
  sweep->add_option("--mdi-cap", mdi_cap, "MDI per-party photon cap for r_u");
  sweep->add_option("--tolerance", tolerance, "SDP solver tolerance");
  sweep->add_option("--rn-mode", rn_mode, "photon weights of r_u: actual or believed");

  auto* lab = app.add_subcommand("labdata", "Pulse energies and kappa from a waveform index (CSV)");
  std::string index_path, lab_out;
  double calibration = 0.0;
  lab->add_option("--index", index_path, "index file: label, tampering power mW, waveform path")->required();
  lab->add_option("--calibration", calibration, "detector calibration, W per V")->required();
  lab->add_option("--out", lab_out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (*sweep) {
      lsa::RunConfig config = config_path.empty() ? lsa::RunConfig{} : lsa::load_run_config(config_path);
      if (!protocol.empty()) config.protocol = lsa::parse_protocol(protocol);
      if (!distance.empty()) config.distances_km = lsa::parse_grid(distance);
      if (!kappa.empty()) config.kappas = lsa::parse_grid(kappa);
      if (upper) config.upper_bound = true;
      if (!out_path.empty()) config.out = out_path;
      if (!cache_dir.empty()) config.cache_dir = cache_dir;
      if (n_max > 0) config.bb84_n_max = n_max;
      if (mdi_cap > 0) config.mdi_cap = mdi_cap;
      if (tolerance > 0.0) config.solver_tolerance = tolerance;
      if (rn_mode == "believed") {
        config.weight_mode = lsa::PhotonWeightMode::believed;
      } else if (rn_mode == "actual") {
        config.weight_mode = lsa::PhotonWeightMode::actual;
      } else if (!rn_mode.empty()) {
        return fail("config", "--rn-mode must be 'actual' or 'believed'");
      }
      config.validate();
      with_output(config.out, [&](std::ostream& os) { lsa::run_sweep(config, os); });
    } else {
      with_output(lab_out, [&](std::ostream& os) { lsa::run_labdata(index_path, calibration, os); });
    }
  } catch (const lsa::Error& e) {
    return fail(std::string(lsa::to_string(e.code())), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
