#pragma once
// Analytic channel model: observed gains and error rates for BB84 and for
// MDI-QKD at a given fiber length and emitted intensity.

#include "lsa/core.hpp"

namespace lsa {

struct LinkConfig {
  double distance_km = 0.0;
  ChannelParams params{};

  void validate() const;
};

/// Overall transmittance including detector efficiency, eta_d * 10^{-alpha L / 10}.
double transmittance(const LinkConfig& link);

/// Transmittance of one MDI arm (user to relay, length L/2), detector
/// efficiency included.
double arm_transmittance(const LinkConfig& link);

/// Gain and QBER in each basis.
struct Observation {
  BasisStats z{};
  BasisStats x{};
};

/// Closed form of the threshold-detector receiver model: per-pulse random
/// basis, polarization rotated by asin(sqrt(e_d)), two detectors per basis
/// with dark probability d such that (1-d)^2 = 1-y0, double clicks assigned
/// at random. Both bases are identical.
Observation bb84_observables(const LinkConfig& link, double mu);

/// Gains and QBERs with Alice at intensity `zeta`, Bob at `omega`, obtained
/// by Poisson aggregation of the relay's photon-level statistics. Throws
/// ErrorCode::truncation if the photon-number tail above the detector
/// model's cap exceeds 1e-10.
Observation mdi_observables(const LinkConfig& link, double zeta, double omega);

}  // namespace lsa
