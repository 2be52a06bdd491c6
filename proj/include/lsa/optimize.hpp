#pragma once
// Per-distance choice of the intensity triple maximizing the no-attack
// lower bound.

#include <optional>

#include "lsa/decoy_bounds.hpp"

namespace lsa {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct OptimizationConfig {
  Range mu_s{0.05, 1.0};
  Range nu_1{0.005, 0.3};
  Range nu_2{1e-4, 0.1};
  int grid_points = 20;   // per axis
  int multistart = 5;
  int max_refinements = 400;
  double min_step = 1e-6;  // relative to each axis' width

  void validate() const;
};

struct OptimizedIntensities {
  std::optional<IntensitySet> intensities;  // empty: no triple gives a positive rate
  double rate = 0.0;

  bool found() const { return intensities.has_value(); }
};

/// No-attack lower bound for a candidate triple (0 for infeasible triples).
double no_attack_rate(Protocol protocol, const LinkConfig& link, const IntensitySet& in);

OptimizedIntensities optimize_intensities(Protocol protocol, const LinkConfig& link,
                                          const OptimizationConfig& config = {});

}  // namespace lsa
