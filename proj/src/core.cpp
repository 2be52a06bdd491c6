#include "lsa/core.hpp"

#include <cmath>
#include <sstream>

namespace lsa {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::degenerate_intensities: return "degenerate_intensities";
    case ErrorCode::truncation: return "truncation";
    case ErrorCode::cap_exceeded: return "cap_exceeded";
    case ErrorCode::infeasible_statistics: return "infeasible_statistics";
    case ErrorCode::solver_failure: return "solver_failure";
    case ErrorCode::parse: return "parse";
    case ErrorCode::jitter: return "jitter";
    case ErrorCode::window: return "window";
    case ErrorCode::zero_baseline: return "zero_baseline";
    case ErrorCode::missing_baseline: return "missing_baseline";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::domain, what);
}

}  // namespace

void ChannelParams::validate() const {
  require(std::isfinite(alpha) && alpha >= 0.0, "channel: alpha must be >= 0");
  require(y0 >= 0.0 && y0 <= 1.0, "channel: y0 must lie in [0,1]");
  require(e_d >= 0.0 && e_d <= 0.5, "channel: e_d must lie in [0,0.5]");
  require(eta_d > 0.0 && eta_d <= 1.0, "channel: eta_d must lie in (0,1]");
  require(f_e >= 1.0, "channel: f_e must be >= 1");
}

IntensitySet IntensitySet::make(double mu_s, double nu_1, double nu_2) {
  if (!(std::isfinite(mu_s) && std::isfinite(nu_1) && std::isfinite(nu_2))) {
    throw Error(ErrorCode::domain, "intensities must be finite");
  }
  if (nu_1 == nu_2) {
    throw Error(ErrorCode::degenerate_intensities, "intensities: nu_1 == nu_2");
  }
  if (!(mu_s > nu_1 && nu_1 > nu_2 && nu_2 >= 0.0)) {
    std::ostringstream os;
    os << "intensities must satisfy mu_s > nu_1 > nu_2 >= 0, got (" << mu_s << ", " << nu_1
       << ", " << nu_2 << ")";
    throw Error(ErrorCode::domain, os.str());
  }
  if (!(mu_s > nu_1 + nu_2)) {
    throw Error(ErrorCode::domain, "intensities must satisfy mu_s > nu_1 + nu_2");
  }
  return IntensitySet(mu_s, nu_1, nu_2);
}

IntensitySet IntensitySet::scaled(double kappa) const {
  require(std::isfinite(kappa) && kappa > 0.0, "intensity scale must be positive");
  return IntensitySet(kappa * mu_s_, kappa * nu_1_, kappa * nu_2_);
}

void AttackModel::validate() const {
  require(std::isfinite(kappa) && kappa >= 1.0, "attack: kappa must be >= 1");
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::domain, "binary_entropy: x outside [0,1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double poisson_weight(double mu, int n) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw Error(ErrorCode::domain, "poisson_weight: mu < 0");
  if (n < 0) throw Error(ErrorCode::domain, "poisson_weight: n < 0");
  if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
  if (n <= 20) {
    double term = std::exp(-mu);
    for (int k = 1; k <= n; ++k) term *= mu / k;
    return term;
  }
  return std::exp(-mu + n * std::log(mu) - std::lgamma(n + 1.0));
}

double poisson_tail(double mu, int n) {
  if (n < 0) return 1.0;
  if (mu == 0.0) return 0.0;
  // Terms decrease geometrically once k > mu; sum until negligible.
  double sum = 0.0;
  for (int k = n + 1;; ++k) {
    const double term = poisson_weight(mu, k);
    sum += term;
    if (k > mu && (term == 0.0 || term < 1e-18 * sum)) break;
    if (k > n + 2000) break;
  }
  return sum;
}

double attenuation_from_db(double db) { return std::pow(10.0, -db / 10.0); }

double db_from_attenuation(double fraction) {
  require(fraction > 0.0, "db_from_attenuation: fraction must be positive");
  return -10.0 * std::log10(fraction);
}

}  // namespace lsa
