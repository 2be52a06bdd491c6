#include "lsa/decoy_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace lsa {

std::string_view to_string(Protocol p) { return p == Protocol::bb84 ? "bb84" : "mdi"; }

Protocol parse_protocol(std::string_view name) {
  if (name == "bb84" || name == "BB84") return Protocol::bb84;
  if (name == "mdi" || name == "MDI") return Protocol::mdi;
  throw Error(ErrorCode::config, "unknown protocol '" + std::string(name) + "'");
}

namespace {

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

// Single-photon yield lower bound from one basis' gains, and the vacuum
// bound it depends on.
struct YieldPair {
  double y0 = 0.0;
  double y1 = 0.0;
};

YieldPair single_photon_yield(const BasisStats& s, const BasisStats& v1, const BasisStats& v2,
                              const IntensitySet& in) {
  const double mu = in.mu_s();
  const double n1 = in.nu_1();
  const double n2 = in.nu_2();
  const double g1 = v1.gain * std::exp(n1);
  const double g2 = v2.gain * std::exp(n2);
  const double gs = s.gain * std::exp(mu);
  YieldPair out;
  out.y0 = std::max(0.0, (n1 * g2 - n2 * g1) / (n1 - n2));
  const double scale = mu / (mu * (n1 - n2) - n1 * n1 + n2 * n2);
  out.y1 = clamp_unit(scale * (g1 - g2 - (n1 * n1 - n2 * n2) / (mu * mu) * (gs - out.y0)));
  return out;
}

double phase_error(double numerator, double denominator_scale, double yield_l) {
  if (yield_l <= 0.0) return 0.5;
  return std::clamp(numerator / (denominator_scale * yield_l), 0.0, 0.5);
}

double finish_rate(double p_single, double yield_z, double phase_err, const BasisStats& signal_z,
                   const ChannelParams& params) {
  const double r = p_single * yield_z * (1.0 - binary_entropy(phase_err)) -
                   params.f_e * signal_z.gain * binary_entropy(clamp_unit(signal_z.qber));
  return std::max(0.0, r);
}

template <class Observed, class Fn>
double grid_minimum(const Observed& observed, const IntensitySet& intensities, double kappa_max,
                    const ChannelParams& params, double step, Fn&& rate) {
  if (!(kappa_max >= 1.0)) throw Error(ErrorCode::domain, "worst_case_key_rate: kappa_max < 1");
  if (!(step > 0.0)) throw Error(ErrorCode::domain, "worst_case_key_rate: step must be positive");
  const int count = static_cast<int>(std::floor((kappa_max - 1.0) / step + 1e-9));
  double best = rate(observed, intensities, params);
  for (int i = 1; i <= count; ++i) {
    best = std::min(best, rate(observed, intensities.scaled(1.0 + i * step), params));
  }
  if (1.0 + count * step < kappa_max - 1e-12) best = std::min(best, rate(observed, intensities.scaled(kappa_max), params));
  return best;
}

}  // namespace

Bb84Observed observe_bb84(const LinkConfig& link, const IntensitySet& emitted) {
  return {bb84_observables(link, emitted.mu_s()), bb84_observables(link, emitted.nu_1()),
          bb84_observables(link, emitted.nu_2())};
}

MdiObserved observe_mdi(const LinkConfig& link, const IntensitySet& emitted) {
  const double mu = emitted.mu_s();
  const double n1 = emitted.nu_1();
  const double n2 = emitted.nu_2();
  MdiObserved o;
  o.nu1_nu1 = mdi_observables(link, n1, n1);
  o.nu2_nu2 = mdi_observables(link, n2, n2);
  o.nu1_nu2 = mdi_observables(link, n1, n2);
  o.nu2_nu1 = mdi_observables(link, n2, n1);
  o.mus_mus = mdi_observables(link, mu, mu);
  o.mus_nu2 = mdi_observables(link, mu, n2);
  o.nu2_mus = mdi_observables(link, n2, mu);
  return o;
}

Bb84Bounds estimate_bb84_bounds(const Bb84Observed& o, const IntensitySet& in) {
  const YieldPair z = single_photon_yield(o.mu_s.z, o.nu_1.z, o.nu_2.z, in);
  const YieldPair x = single_photon_yield(o.mu_s.x, o.nu_1.x, o.nu_2.x, in);
  Bb84Bounds b;
  b.y0_l = z.y0;
  b.y1_l_z = z.y1;
  b.y1_l_x = x.y1;
  const double num = o.nu_1.x.qber * o.nu_1.x.gain * std::exp(in.nu_1()) -
                     o.nu_2.x.qber * o.nu_2.x.gain * std::exp(in.nu_2());
  b.e1_u_x = phase_error(num, in.nu_1() - in.nu_2(), b.y1_l_x);
  return b;
}

double bb84_key_rate_lower(const Bb84Bounds& bounds, const BasisStats& signal_z, double assumed_mu_s,
                           const ChannelParams& params) {
  return finish_rate(poisson_weight(assumed_mu_s, 1), bounds.y1_l_z, bounds.e1_u_x, signal_z, params);
}

namespace {

double two_photon_yield(const MdiObserved& o, bool x_basis, const IntensitySet& in) {
  auto g = [&](const Observation& ob) { return x_basis ? ob.x.gain : ob.z.gain; };
  const double mu = in.mu_s();
  const double n1 = in.nu_1();
  const double n2 = in.nu_2();
  const double s_nu1 = g(o.nu1_nu1) * std::exp(2 * n1) + g(o.nu2_nu2) * std::exp(2 * n2) -
                       g(o.nu1_nu2) * std::exp(n1 + n2) - g(o.nu2_nu1) * std::exp(n2 + n1);
  const double s_mu = g(o.mus_mus) * std::exp(2 * mu) + g(o.nu2_nu2) * std::exp(2 * n2) -
                      g(o.mus_nu2) * std::exp(mu + n2) - g(o.nu2_mus) * std::exp(n2 + mu);
  const double num = (mu * mu - n2 * n2) * (mu - n2) * s_nu1 - (n1 * n1 - n2 * n2) * (n1 - n2) * s_mu;
  const double den = (mu - n2) * (mu - n2) * (n1 - n2) * (n1 - n2) * (mu - n1);
  return clamp_unit(num / den);
}

}  // namespace

MdiBounds estimate_mdi_bounds(const MdiObserved& o, const IntensitySet& in) {
  MdiBounds b;
  b.y11_l_z = two_photon_yield(o, false, in);
  b.y11_l_x = two_photon_yield(o, true, in);
  const double n1 = in.nu_1();
  const double n2 = in.nu_2();
  auto ge = [](const Observation& ob) { return ob.x.gain * ob.x.qber; };
  const double num = std::exp(2 * n1) * ge(o.nu1_nu1) + std::exp(2 * n2) * ge(o.nu2_nu2) -
                     std::exp(n1 + n2) * ge(o.nu1_nu2) - std::exp(n2 + n1) * ge(o.nu2_nu1);
  b.e11_u_x = phase_error(num, (n1 - n2) * (n1 - n2), b.y11_l_x);
  return b;
}

double mdi_key_rate_lower(const MdiBounds& bounds, const BasisStats& signal_z, double assumed_mu_s,
                          const ChannelParams& params) {
  const double p1 = poisson_weight(assumed_mu_s, 1);
  return finish_rate(p1 * p1, bounds.y11_l_z, bounds.e11_u_x, signal_z, params);
}

double key_rate_lower(const Bb84Observed& observed, const IntensitySet& assumed, const ChannelParams& params) {
  return bb84_key_rate_lower(estimate_bb84_bounds(observed, assumed), observed.mu_s.z, assumed.mu_s(), params);
}

double key_rate_lower(const MdiObserved& observed, const IntensitySet& assumed, const ChannelParams& params) {
  return mdi_key_rate_lower(estimate_mdi_bounds(observed, assumed), observed.mus_mus.z, assumed.mu_s(), params);
}

KeyRateReport evaluate_attack_scenario(Protocol protocol, const LinkConfig& link, const IntensitySet& intensities,
                                       double kappa) {
  AttackModel{kappa}.validate();
  const IntensitySet emitted = intensities.scaled(kappa);
  KeyRateReport r;
  r.distance_km = link.distance_km;
  r.kappa = kappa;
  if (protocol == Protocol::bb84) {
    const Bb84Observed o = observe_bb84(link, emitted);
    r.r_l_estimated = key_rate_lower(o, intensities, link.params);
    r.r_l_correct = key_rate_lower(o, emitted, link.params);
  } else {
    const MdiObserved o = observe_mdi(link, emitted);
    r.r_l_estimated = key_rate_lower(o, intensities, link.params);
    r.r_l_correct = key_rate_lower(o, emitted, link.params);
  }
  return r;
}

double worst_case_key_rate(const Bb84Observed& observed, const IntensitySet& intensities, double kappa_max,
                           const ChannelParams& params, double step) {
  return grid_minimum(observed, intensities, kappa_max, params, step,
                      [](const Bb84Observed& o, const IntensitySet& in, const ChannelParams& p) {
                        return key_rate_lower(o, in, p);
                      });
}

double worst_case_key_rate(const MdiObserved& observed, const IntensitySet& intensities, double kappa_max,
                           const ChannelParams& params, double step) {
  return grid_minimum(observed, intensities, kappa_max, params, step,
                      [](const MdiObserved& o, const IntensitySet& in, const ChannelParams& p) {
                        return key_rate_lower(o, in, p);
                      });
}

}  // namespace lsa
