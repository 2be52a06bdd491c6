#pragma once
// Shared domain types for the laser-seeding attack analysis: channel and
// intensity parameters, the attack factor, and a few elementary functions.

#include <stdexcept>
#include <string>
#include <string_view>

namespace lsa {

enum class ErrorCode {
  domain,
  degenerate_intensities,
  truncation,
  cap_exceeded,
  infeasible_statistics,
  solver_failure,
  parse,
  jitter,
  window,
  zero_baseline,
  missing_baseline,
  config,
  io,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library is reported through this type; `code()`
/// is stable and is what the CLI prints on its machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Link and receiver parameters. Defaults are the simulation values used
/// throughout (loss 0.2 dB/km, background 2.6e-5, misalignment 1.5%,
/// detector efficiency 30%, error-correction inefficiency 1.12).
struct ChannelParams {
  double alpha = 0.2;    // dB/km
  double y0 = 2.6e-5;    // background click probability
  double e_d = 0.015;    // misalignment, fraction
  double eta_d = 0.3;    // detector efficiency, fraction
  double f_e = 1.12;     // error-correction inefficiency

  void validate() const;
};

/// Decoy-state intensity triple. Construction enforces
/// mu_s > nu_1 > nu_2 >= 0 and mu_s > nu_1 + nu_2.
class IntensitySet {
 public:
  static IntensitySet make(double mu_s, double nu_1, double nu_2);

  double mu_s() const noexcept { return mu_s_; }
  double nu_1() const noexcept { return nu_1_; }
  double nu_2() const noexcept { return nu_2_; }

  /// The intensities actually emitted under an attack multiplying every
  /// setting by `kappa`.
  IntensitySet scaled(double kappa) const;

  friend bool operator==(const IntensitySet&, const IntensitySet&) = default;

 private:
  IntensitySet(double mu_s, double nu_1, double nu_2) : mu_s_(mu_s), nu_1_(nu_1), nu_2_(nu_2) {}
  double mu_s_;
  double nu_1_;
  double nu_2_;
};

struct AttackModel {
  double kappa = 1.0;
  void validate() const;
};

/// Observed statistics of one basis: detection probability and error
/// fraction among detections (a fraction, never a percentage).
struct BasisStats {
  double gain = 0.0;
  double qber = 0.0;
};

/// H2(x) in bits, with 0 log 0 = 0. Throws ErrorCode::domain outside [0,1].
double binary_entropy(double x);

/// e^{-mu} mu^n / n!, evaluated in log space past n = 20.
double poisson_weight(double mu, int n);

/// Sum of poisson_weight(mu, k) over k > n, computed without cancellation.
double poisson_tail(double mu, int n);

/// Linear power fraction remaining after `db` of attenuation.
double attenuation_from_db(double db);
double db_from_attenuation(double fraction);

}  // namespace lsa
