#include "lsa/channel.hpp"

#include <cmath>
#include <vector>

#include "lsa/fock_oracle.hpp"
#include "lsa/kernels.hpp"

namespace lsa {

void LinkConfig::validate() const {
  if (!(std::isfinite(distance_km) && distance_km >= 0.0)) {
    throw Error(ErrorCode::domain, "link: distance must be finite and >= 0");
  }
  params.validate();
}

double transmittance(const LinkConfig& link) {
  link.validate();
  return link.params.eta_d * std::pow(10.0, -link.params.alpha * link.distance_km / 10.0);
}

double arm_transmittance(const LinkConfig& link) {
  link.validate();
  return link.params.eta_d * std::pow(10.0, -link.params.alpha * 0.5 * link.distance_km / 10.0);
}

Observation bb84_observables(const LinkConfig& link, double mu) {
  link.validate();
  if (!(std::isfinite(mu) && mu >= 0.0)) throw Error(ErrorCode::domain, "bb84_observables: mu < 0");
  const double x = transmittance(link) * mu;
  const double e_d = link.params.e_d;
  const double quiet = std::sqrt(1.0 - link.params.y0);
  // A, B: no-click probability of the right and wrong detector.
  const double a = quiet * std::exp(-x * (1.0 - e_d));
  const double b = quiet * std::exp(-x * e_d);
  const double gain = 1.0 - a * b;
  const double err_gain = 0.5 * (1.0 + a) * (1.0 - b);
  BasisStats s;
  s.gain = gain;
  s.qber = gain > 0.0 ? err_gain / gain : 0.0;
  return {s, s};
}

Observation mdi_observables(const LinkConfig& link, double zeta, double omega) {
  link.validate();
  if (!(std::isfinite(zeta) && zeta >= 0.0 && std::isfinite(omega) && omega >= 0.0)) {
    throw Error(ErrorCode::domain, "mdi_observables: negative intensity");
  }
  const auto model = MdiDetectorModel::shared(link.params.e_d, link.params.y0);
  const int cap = model->cap();
  const double eta = arm_transmittance(link);
  const double a = eta * zeta;
  const double b = eta * omega;
  // Arrived numbers are Poisson(a) and Poisson(b); the sum n'+m' is Poisson(a+b).
  if (poisson_tail(a + b, cap) > 1e-10) {
    throw Error(ErrorCode::truncation, "mdi_observables: photon-number tail above cap exceeds 1e-10");
  }
  std::vector<double> wa(cap + 1);
  std::vector<double> wb(cap + 1);
  for (int n = 0; n <= cap; ++n) {
    wa[n] = poisson_weight(a, n);
    wb[n] = poisson_weight(b, n);
  }

  auto prob = [&](Announcement c, int k, int j) {
    double total = 0.0;
    for (int n = 0; n <= cap; ++n) {
      if (wa[n] == 0.0) continue;
      total += wa[n] * kernels::dot(wb, model->row(c, static_cast<Polarization>(k), static_cast<Polarization>(j), n));
    }
    return total;
  };

  auto basis = [&](int first, bool x_basis) {
    double gain = 0.0;
    double err = 0.0;
    for (int k = first; k < first + 2; ++k) {
      for (int j = first; j < first + 2; ++j) {
        const double pp = prob(Announcement::psi_plus, k, j);
        const double pm = prob(Announcement::psi_minus, k, j);
        gain += pp + pm;
        if (!x_basis) {
          if (k == j) err += pp + pm;
        } else {
          if (k != j) err += pp;
          if (k == j) err += pm;
        }
      }
    }
    BasisStats s;
    s.gain = gain / 4.0;
    s.qber = gain > 0.0 ? err / gain : 0.0;
    return s;
  };
  return {basis(0, false), basis(2, true)};
}

}  // namespace lsa
