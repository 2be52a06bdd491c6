#include "lsa/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lsa/parallel.hpp"

namespace lsa {

using nlohmann::json;

void RunConfig::validate() const {
  params.validate();
  optimizer.validate();
  auto check_grid = [](const std::vector<double>& g, const char* name, double lo) {
    if (g.empty()) throw Error(ErrorCode::config, std::string(name) + " grid is empty");
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(std::isfinite(g[i]) && g[i] >= lo)) throw Error(ErrorCode::config, std::string(name) + " grid value out of range");
      if (i > 0 && !(g[i] > g[i - 1])) throw Error(ErrorCode::config, std::string(name) + " grid must be ascending");
    }
  };
  check_grid(distances_km, "distance", 0.0);
  check_grid(kappas, "kappa", 1.0);
  if (bb84_n_max < 1 || mdi_cap < 1) throw Error(ErrorCode::config, "truncation caps must be >= 1");
  if (!(solver_tolerance > 0.0 && solver_tolerance < 1e-3)) throw Error(ErrorCode::config, "solver tolerance out of range");
}

namespace {

double number(const json& j, const char* key) {
  if (!j.at(key).is_number()) throw Error(ErrorCode::config, std::string("config: '") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::vector<double> grid_value(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_string()) return parse_grid(v.get<std::string>());
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw Error(ErrorCode::config, std::string("config: '") + key + "' must be a list");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw Error(ErrorCode::config, std::string("config: '") + key + "' holds a non-number");
    out.push_back(x.get<double>());
  }
  return out;
}

Range range_value(const json& j, const char* key, Range fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw Error(ErrorCode::config, std::string("config: optimizer '") + key + "' must be [lo, hi]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::config, "config must be a JSON object");
  static const std::vector<std::string> known{"protocol", "distances_km", "kappas", "channel", "upper_bound",
                                              "bb84_n_max", "mdi_cap", "solver_tolerance", "photon_weights",
                                              "optimizer", "out", "cache_dir"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::config, "config: unknown key '" + key + "'");
    }
  }
  RunConfig c;
  try {
    if (j.contains("protocol")) c.protocol = parse_protocol(j.at("protocol").get<std::string>());
    if (j.contains("distances_km")) c.distances_km = grid_value(j, "distances_km");
    if (j.contains("kappas")) c.kappas = grid_value(j, "kappas");
    if (j.contains("channel")) {
      const json& ch = j.at("channel");
      if (ch.contains("alpha")) c.params.alpha = number(ch, "alpha");
      if (ch.contains("y0")) c.params.y0 = number(ch, "y0");
      if (ch.contains("e_d")) c.params.e_d = number(ch, "e_d");
      if (ch.contains("eta_d")) c.params.eta_d = number(ch, "eta_d");
      if (ch.contains("f_e")) c.params.f_e = number(ch, "f_e");
    }
    if (j.contains("upper_bound")) c.upper_bound = j.at("upper_bound").get<bool>();
    if (j.contains("bb84_n_max")) c.bb84_n_max = j.at("bb84_n_max").get<int>();
    if (j.contains("mdi_cap")) c.mdi_cap = j.at("mdi_cap").get<int>();
    if (j.contains("solver_tolerance")) c.solver_tolerance = number(j, "solver_tolerance");
    if (j.contains("photon_weights")) {
      const auto mode = j.at("photon_weights").get<std::string>();
      if (mode == "actual") {
        c.weight_mode = PhotonWeightMode::actual;
      } else if (mode == "believed") {
        c.weight_mode = PhotonWeightMode::believed;
      } else {
        throw Error(ErrorCode::config, "config: photon_weights must be 'actual' or 'believed'");
      }
    }
    if (j.contains("optimizer")) {
      const json& o = j.at("optimizer");
      c.optimizer.mu_s = range_value(o, "mu_s", c.optimizer.mu_s);
      c.optimizer.nu_1 = range_value(o, "nu_1", c.optimizer.nu_1);
      c.optimizer.nu_2 = range_value(o, "nu_2", c.optimizer.nu_2);
      if (o.contains("grid_points")) c.optimizer.grid_points = o.at("grid_points").get<int>();
      if (o.contains("multistart")) c.optimizer.multistart = o.at("multistart").get<int>();
    }
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("cache_dir")) c.cache_dir = j.at("cache_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config, std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::vector<double> parse_grid(const std::string& text) {
  auto to_num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::config, "bad grid value '" + s + "' in '" + text + "'");
    }
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw Error(ErrorCode::config, "grid range must be start:stop:step");
    const double start = to_num(parts[0]);
    const double stop = to_num(parts[1]);
    const double step = to_num(parts[2]);
    if (!(step > 0.0) || stop < start) throw Error(ErrorCode::config, "grid range must ascend with a positive step");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= count; ++i) {
      // Rounded to 12 digits so 1.05 prints as 1.05, not 1.0500000000000003.
      out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
    return out;
  }
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (!part.empty()) out.push_back(to_num(part));
  }
  if (out.empty()) throw Error(ErrorCode::config, "empty grid '" + text + "'");
  return out;
}

std::string format_row(const KeyRateReport& r) {
  std::string row = fmt("%.6g", r.distance_km) + "," + fmt("%.6g", r.kappa) + "," + fmt("%.10e", r.r_l_estimated) +
                    "," + fmt("%.10e", r.r_l_correct) + ",";
  if (r.r_u) row += fmt("%.10e", *r.r_u);
  return row;
}

std::string optimization_cache_key(const RunConfig& c, double distance_km) {
  std::ostringstream id;
  char buf[64];
  for (double v : {c.params.alpha, c.params.y0, c.params.e_d, c.params.eta_d, c.params.f_e, c.optimizer.mu_s.lo,
                   c.optimizer.mu_s.hi, c.optimizer.nu_1.lo, c.optimizer.nu_1.hi, c.optimizer.nu_2.lo,
                   c.optimizer.nu_2.hi}) {
    std::snprintf(buf, sizeof buf, "%.17g;", v);
    id << buf;
  }
  id << c.optimizer.grid_points << ";" << c.optimizer.multistart << ";" << c.optimizer.max_refinements;
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(id.str())));
  return std::string(to_string(c.protocol)) + "_" + fmt("%.6g", distance_km) + "km_" + buf;
}

OptimizedIntensities optimized_for(const RunConfig& config, double distance_km) {
  const LinkConfig link{distance_km, config.params};
  std::filesystem::path file;
  if (!config.cache_dir.empty()) {
    file = config.cache_dir / (optimization_cache_key(config, distance_km) + ".json");
    std::ifstream in(file);
    if (in) {
      try {
        const json j = json::parse(in);
        if (!j.at("found").get<bool>()) return {};
        return {IntensitySet::make(j.at("mu_s").get<double>(), j.at("nu_1").get<double>(), j.at("nu_2").get<double>()),
                j.at("rate").get<double>()};
      } catch (const std::exception&) {
        // unreadable entry: recompute and overwrite
      }
    }
  }
  const OptimizedIntensities result = optimize_intensities(config.protocol, link, config.optimizer);
  if (!file.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.cache_dir, ec);
    json j;
    j["found"] = result.found();
    j["rate"] = result.rate;
    if (result.found()) {
      j["mu_s"] = result.intensities->mu_s();
      j["nu_1"] = result.intensities->nu_1();
      j["nu_2"] = result.intensities->nu_2();
    }
    const auto tmp = file.string() + ".tmp";
    {
      std::ofstream out(tmp);
      out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, file, ec);
  }
  return result;
}

std::vector<KeyRateReport> run_sweep(const RunConfig& config, std::ostream& out) {
  config.validate();
  out << kSweepHeader << "\n";
  out.flush();
  sdp::Options solver;
  solver.tolerance = config.solver_tolerance;

  const std::size_t nd = config.distances_km.size();
  std::vector<std::vector<KeyRateReport>> slots(nd);
  std::vector<char> done(nd, 0);
  std::size_t written = 0;
  std::mutex writer;

  parallel_for(nd, [&](std::size_t i) {
    const double distance = config.distances_km[i];
    const LinkConfig link{distance, config.params};
    std::vector<KeyRateReport> rows;
    try {
      const OptimizedIntensities opt = optimized_for(config, distance);
      Bb84UpperTerms bb84_terms;
      MdiUpperTerms mdi_terms;
      if (config.upper_bound) {
        if (config.protocol == Protocol::bb84) {
          bb84_terms = bb84_upper_terms(link, config.bb84_n_max, solver);
        } else {
          mdi_terms = mdi_upper_terms(link, config.mdi_cap, solver);
        }
      }
      for (double kappa : config.kappas) {
        KeyRateReport r;
        r.distance_km = distance;
        r.kappa = kappa;
        if (opt.found()) r = evaluate_attack_scenario(config.protocol, link, *opt.intensities, kappa);
        if (config.upper_bound) {
          const double mu = opt.found() ? opt.intensities->mu_s() : 0.0;
          const double weight_mu = config.weight_mode == PhotonWeightMode::actual ? kappa * mu : mu;
          r.r_u = config.protocol == Protocol::bb84 ? bb84_upper_bound(bb84_terms, weight_mu)
                                                    : mdi_upper_bound(mdi_terms, weight_mu);
        }
        rows.push_back(r);
      }
    } catch (const Error& e) {
      throw Error(e.code(), "at distance_km=" + fmt("%.6g", distance) + ": " + e.what());
    }
    // Rows leave in grid order: a finished distance is written once every
    // earlier one is out.
    std::lock_guard lock(writer);
    slots[i] = std::move(rows);
    done[i] = 1;
    while (written < nd && done[written]) {
      for (const auto& r : slots[written]) out << format_row(r) << "\n";
      out.flush();
      ++written;
    }
  });

  std::vector<KeyRateReport> all;
  for (auto& s : slots) all.insert(all.end(), s.begin(), s.end());
  return all;
}

std::vector<EnergyRecord> run_labdata(const std::filesystem::path& index, double calibration_w_per_v,
                                      std::ostream& out) {
  const auto records = analyze_index(index, calibration_w_per_v);
  out << kLabHeader << "\n";
  for (const auto& r : records) {
    out << fmt("%.6g", r.tampering_power_mw) << "," << fmt("%.3g", r.pulse_energy_pj) << ","
        << fmt("%.3g", r.kappa) << "\n";
  }
  out.flush();
  return records;
}

}  // namespace lsa
