#pragma once
// Analytic decoy-state estimation and key-rate lower bounds, with the
// attacked (users assume the nominal intensities) and attack-aware
// variants.

#include <optional>
#include <string_view>

#include "lsa/channel.hpp"

namespace lsa {

enum class Protocol { bb84, mdi };

std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view name);

/// Observations at the three intensity settings, both bases.
struct Bb84Observed {
  Observation mu_s{};
  Observation nu_1{};
  Observation nu_2{};
};

/// Observations for the intensity pairs (Alice, Bob) the MDI estimate uses.
struct MdiObserved {
  Observation nu1_nu1{};
  Observation nu2_nu2{};
  Observation nu1_nu2{};
  Observation nu2_nu1{};
  Observation mus_mus{};
  Observation mus_nu2{};
  Observation nu2_mus{};
};

struct Bb84Bounds {
  double y0_l = 0.0;
  double y1_l_z = 0.0;
  double y1_l_x = 0.0;
  double e1_u_x = 0.5;
};

struct MdiBounds {
  double y11_l_z = 0.0;
  double y11_l_x = 0.0;
  double e11_u_x = 0.5;
};

/// Observations generated by the channel when the devices actually emit
/// `emitted`.
Bb84Observed observe_bb84(const LinkConfig& link, const IntensitySet& emitted);
MdiObserved observe_mdi(const LinkConfig& link, const IntensitySet& emitted);

/// `assumed` is what the users believe was emitted; it enters the formulas
/// regardless of what produced the observations.
Bb84Bounds estimate_bb84_bounds(const Bb84Observed& observed, const IntensitySet& assumed);
double bb84_key_rate_lower(const Bb84Bounds& bounds, const BasisStats& signal_z, double assumed_mu_s,
                           const ChannelParams& params);

MdiBounds estimate_mdi_bounds(const MdiObserved& observed, const IntensitySet& assumed);
double mdi_key_rate_lower(const MdiBounds& bounds, const BasisStats& signal_z, double assumed_mu_s,
                          const ChannelParams& params);

/// Whole pipeline for one protocol: bounds from `observed` under `assumed`,
/// then the rate.
double key_rate_lower(const Bb84Observed& observed, const IntensitySet& assumed, const ChannelParams& params);
double key_rate_lower(const MdiObserved& observed, const IntensitySet& assumed, const ChannelParams& params);

struct KeyRateReport {
  double distance_km = 0.0;
  double kappa = 1.0;
  double r_l_estimated = 0.0;
  double r_l_correct = 0.0;
  std::optional<double> r_u;
};

/// Observations at kappa * intensities; the estimated rate assumes the
/// nominal intensities, the correct one the scaled intensities.
KeyRateReport evaluate_attack_scenario(Protocol protocol, const LinkConfig& link, const IntensitySet& intensities,
                                       double kappa);

/// Countermeasure: minimum of the correct rate over a common scale factor
/// kappa in [1, kappa_max] (grid spacing `step`), given observations whose
/// true emission lies somewhere in that interval.
double worst_case_key_rate(const Bb84Observed& observed, const IntensitySet& intensities, double kappa_max,
                           const ChannelParams& params, double step = 0.01);
double worst_case_key_rate(const MdiObserved& observed, const IntensitySet& intensities, double kappa_max,
                           const ChannelParams& params, double step = 0.01);

}  // namespace lsa
