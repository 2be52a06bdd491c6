#include "lsa/optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "lsa/parallel.hpp"

namespace lsa {

void OptimizationConfig::validate() const {
  for (const Range& r : {mu_s, nu_1, nu_2}) {
    if (!(r.lo >= 0.0 && r.hi > r.lo)) throw Error(ErrorCode::config, "optimizer: empty search range");
  }
  if (grid_points < 2 || multistart < 1 || max_refinements < 0 || !(min_step > 0.0)) {
    throw Error(ErrorCode::config, "optimizer: bad grid or refinement settings");
  }
  if (!(mu_s.hi > nu_1.lo + nu_2.lo)) throw Error(ErrorCode::config, "optimizer: no feasible triple in the box");
}

namespace {

using Point = std::array<double, 3>;

std::optional<IntensitySet> to_set(const Point& p) {
  if (!(p[0] > p[1] && p[1] > p[2] && p[2] >= 0.0 && p[0] > p[1] + p[2])) return std::nullopt;
  return IntensitySet::make(p[0], p[1], p[2]);
}

}  // namespace

double no_attack_rate(Protocol protocol, const LinkConfig& link, const IntensitySet& in) {
  if (protocol == Protocol::bb84) return key_rate_lower(observe_bb84(link, in), in, link.params);
  return key_rate_lower(observe_mdi(link, in), in, link.params);
}

OptimizedIntensities optimize_intensities(Protocol protocol, const LinkConfig& link,
                                          const OptimizationConfig& config) {
  config.validate();
  link.validate();
  const std::array<Range, 3> box{config.mu_s, config.nu_1, config.nu_2};
  const int g = config.grid_points;

  auto axis = [&](int d, int i) { return box[d].lo + (box[d].hi - box[d].lo) * i / (g - 1); };
  auto evaluate = [&](const Point& p) {
    const auto in = to_set(p);
    return in ? no_attack_rate(protocol, link, *in) : -1.0;
  };

  const std::size_t total = static_cast<std::size_t>(g) * g * g;
  std::vector<double> values(total, -1.0);
  parallel_for(total, [&](std::size_t idx) {
    const int i = static_cast<int>(idx / (g * g));
    const int j = static_cast<int>(idx / g % g);
    const int k = static_cast<int>(idx % g);
    values[idx] = evaluate({axis(0, i), axis(1, j), axis(2, k)});
  });

  // Best grid points first; stable sort keeps lexicographic order on ties.
  std::vector<std::size_t> order(total);
  for (std::size_t i = 0; i < total; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  if (values[order[0]] <= 0.0) return {};

  const int starts = std::min<int>(config.multistart, static_cast<int>(total));
  std::vector<Point> best_points(starts);
  std::vector<double> best_values(starts, -1.0);
  parallel_for(static_cast<std::size_t>(starts), [&](std::size_t s) {
    const std::size_t idx = order[s];
    Point x{axis(0, static_cast<int>(idx / (g * g))), axis(1, static_cast<int>(idx / g % g)),
            axis(2, static_cast<int>(idx % g))};
    double fx = values[idx];
    std::array<double, 3> step;
    for (int d = 0; d < 3; ++d) step[d] = 0.5 * (box[d].hi - box[d].lo) / (g - 1);
    for (int it = 0; it < config.max_refinements; ++it) {
      bool improved = false;
      for (int d = 0; d < 3 && !improved; ++d) {
        for (double sign : {1.0, -1.0}) {
          Point y = x;
          y[d] = std::clamp(y[d] + sign * step[d], box[d].lo, box[d].hi);
          if (y[d] == x[d]) continue;
          const double fy = evaluate(y);
          if (fy > fx) {
            x = y;
            fx = fy;
            improved = true;
            break;
          }
        }
      }
      if (!improved) {
        bool done = true;
        for (int d = 0; d < 3; ++d) {
          step[d] *= 0.5;
          if (step[d] > config.min_step * (box[d].hi - box[d].lo)) done = false;
        }
        if (done) break;
      }
    }
    best_points[s] = x;
    best_values[s] = fx;
  });

  std::size_t pick = 0;
  for (std::size_t s = 1; s < best_points.size(); ++s) {
    if (best_values[s] > best_values[pick] ||
        (best_values[s] == best_values[pick] && best_points[s] < best_points[pick])) {
      pick = s;
    }
  }
  if (best_values[pick] <= 0.0) return {};
  return {to_set(best_points[pick]), best_values[pick]};
}

}  // namespace lsa
