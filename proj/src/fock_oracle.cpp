#include "lsa/fock_oracle.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace lsa {

namespace {

double binomial_pmf(int n, int k, double p) {
  if (k < 0 || k > n) return 0.0;
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  const double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  return std::exp(log_choose + k * std::log(p) + (n - k) * std::log1p(-p));
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

struct ClickSplit {
  double first = 0.0;   // outcome 0 (Z) or + (X)
  double second = 0.0;  // outcome 1 (Z) or - (X)
  double none = 0.0;
};

// n photons, each surviving with eta and then landing on the first detector
// with probability q. Enumerates survivor count, split, and dark patterns.
ClickSplit enumerate_basis(int n, double eta, double q, double dark) {
  ClickSplit out;
  for (int s = 0; s <= n; ++s) {
    const double ws = binomial_pmf(n, s, eta);
    if (ws == 0.0) continue;
    for (int a = 0; a <= s; ++a) {
      const double wa = ws * binomial_pmf(s, a, q);
      if (wa == 0.0) continue;
      const bool occ1 = a > 0;
      const bool occ2 = (s - a) > 0;
      for (int d1 = 0; d1 < 2; ++d1) {
        for (int d2 = 0; d2 < 2; ++d2) {
          const double w = wa * (d1 ? dark : 1.0 - dark) * (d2 ? dark : 1.0 - dark);
          const bool c1 = occ1 || d1;
          const bool c2 = occ2 || d2;
          if (!c1 && !c2) {
            out.none += w;
          } else if (c1 && !c2) {
            out.first += w;
          } else if (!c1 && c2) {
            out.second += w;
          } else {
            out.first += 0.5 * w;
            out.second += 0.5 * w;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

double polarization_angle(Polarization k) {
  constexpr double quarter = std::numbers::pi / 4.0;
  switch (k) {
    case Polarization::H: return 0.0;
    case Polarization::V: return 2.0 * quarter;
    case Polarization::plus: return quarter;
    case Polarization::minus: return -quarter;
  }
  return 0.0;
}

double misalignment_angle(double e_d) { return std::asin(std::sqrt(e_d)); }

namespace {

// (H, V) amplitudes of state k after rotation by theta. The unrotated
// states are exact so that e_d = 0 leaves no rounding leakage into
// orthogonal detectors.
std::array<double, 2> polarization_amplitudes(Polarization k, double theta) {
  const double r = 1.0 / std::numbers::sqrt2;
  std::array<double, 2> v{};
  switch (k) {
    case Polarization::H: v = {1.0, 0.0}; break;
    case Polarization::V: v = {0.0, 1.0}; break;
    case Polarization::plus: v = {r, r}; break;
    case Polarization::minus: v = {r, -r}; break;
  }
  if (theta == 0.0) return v;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * v[0] - s * v[1], s * v[0] + c * v[1]};
}

}  // namespace

double dark_probability(double y0, int detectors) {
  if (y0 <= 0.0) return 0.0;
  return 1.0 - std::pow(1.0 - y0, 1.0 / detectors);
}

PhotonStatsBB84 bb84_photon_stats(const LinkConfig& link, int n, int cap) {
  link.validate();
  if (n < 0) throw Error(ErrorCode::domain, "bb84_photon_stats: n < 0");
  if (n > cap) throw Error(ErrorCode::cap_exceeded, "bb84_photon_stats: photon number above cap");
  const double eta = transmittance(link);
  const double dark = dark_probability(link.params.y0, 2);
  const double theta = misalignment_angle(link.params.e_d);

  PhotonStatsBB84 stats;
  stats.n = n;
  for (int k = 0; k < kStateCount; ++k) {
    const auto v = polarization_amplitudes(static_cast<Polarization>(k), theta);
    auto& row = stats.p[k];
    // Z measurement selected with probability 1/2, then X.
    const double qz = v[0] * v[0];
    const double proj_plus = (v[0] + v[1]) / std::numbers::sqrt2;
    const double qx = proj_plus * proj_plus;
    const ClickSplit z = enumerate_basis(n, eta, qz, dark);
    const ClickSplit x = enumerate_basis(n, eta, qx, dark);
    constexpr double w = 0.25 * 0.5;
    row[static_cast<int>(BobOutcome::zero)] = w * z.first;
    row[static_cast<int>(BobOutcome::one)] = w * z.second;
    row[static_cast<int>(BobOutcome::plus)] = w * x.first;
    row[static_cast<int>(BobOutcome::minus)] = w * x.second;
    row[static_cast<int>(BobOutcome::vac)] = w * (z.none + x.none);
  }
  return stats;
}

PhotonYield aggregate_yield(const PhotonStatsBB84& stats) {
  const auto& p = stats.p;
  auto prior = [&](int k) {
    double s = 0.0;
    for (double v : p[k]) s += v;
    return s;
  };
  auto basis = [&](int k0, int k1, int j0, int j1, double& yield, double& error) {
    const double clicks = p[k0][j0] + p[k0][j1] + p[k1][j0] + p[k1][j1];
    const double wrong = p[k0][j1] + p[k1][j0];
    const double prepared = prior(k0) + prior(k1);
    yield = prepared > 0.0 ? clicks / (0.5 * prepared) : 0.0;
    error = clicks > 0.0 ? wrong / clicks : 0.0;
  };
  PhotonYield out;
  out.n = stats.n;
  basis(0, 1, 0, 1, out.y_z, out.e_z);
  basis(2, 3, 2, 3, out.y_x, out.e_x);
  return out;
}

std::vector<PhotonYield> aggregate_yields(std::span<const PhotonStatsBB84> stats) {
  std::vector<PhotonYield> out;
  out.reserve(stats.size());
  for (const auto& s : stats) out.push_back(aggregate_yield(s));
  return out;
}

// ---------------------------------------------------------------------------
// MDI relay

namespace {

// Output modes after the beam splitter and polarizing splitters.
enum Mode { cH = 0, cV = 1, dH = 2, dV = 3 };
constexpr int kPsiPlusA = (1 << cH) | (1 << cV);
constexpr int kPsiPlusB = (1 << dH) | (1 << dV);
constexpr int kPsiMinusA = (1 << cH) | (1 << dV);
constexpr int kPsiMinusB = (1 << cV) | (1 << dH);

// Coefficients of a homogeneous polynomial in the four output creation
// operators, stored densely by the first three exponents; the fourth is
// implied by the degree.
class ModePolynomial {
 public:
  explicit ModePolynomial(int cap) : dim_(cap + 1), coef_(static_cast<std::size_t>(dim_) * dim_ * dim_, 0.0) {
    coef_[0] = 1.0;
  }

  double at(int i1, int i2, int i3) const { return coef_[idx(i1, i2, i3)]; }

  // Multiplies by sum_i g[i] o_i^dagger.
  void multiply(const std::array<double, 4>& g, ModePolynomial& out) const {
    const int next = degree_ + 1;
    for (int i1 = 0; i1 <= next; ++i1) {
      for (int i2 = 0; i1 + i2 <= next; ++i2) {
        for (int i3 = 0; i1 + i2 + i3 <= next; ++i3) {
          double v = 0.0;
          if (i1 > 0) v += g[0] * at(i1 - 1, i2, i3);
          if (i2 > 0) v += g[1] * at(i1, i2 - 1, i3);
          if (i3 > 0) v += g[2] * at(i1, i2, i3 - 1);
          if (i1 + i2 + i3 <= degree_) v += g[3] * at(i1, i2, i3);
          out.coef_[idx(i1, i2, i3)] = v;
        }
      }
    }
    out.degree_ = next;
  }

  int degree() const noexcept { return degree_; }

 private:
  std::size_t idx(int i1, int i2, int i3) const {
    return (static_cast<std::size_t>(i1) * dim_ + i2) * dim_ + i3;
  }
  int dim_;
  int degree_ = 0;
  std::vector<double> coef_;
};

std::array<double, 16> occupancy_distribution(const ModePolynomial& poly, int n, int m,
                                              const std::vector<double>& fact) {
  std::array<double, 16> occ{};
  const int deg = poly.degree();
  const double norm = 1.0 / (fact[n] * fact[m]);
  for (int i1 = 0; i1 <= deg; ++i1) {
    for (int i2 = 0; i1 + i2 <= deg; ++i2) {
      for (int i3 = 0; i1 + i2 + i3 <= deg; ++i3) {
        const double c = poly.at(i1, i2, i3);
        if (c == 0.0) continue;
        const int i4 = deg - i1 - i2 - i3;
        const double prob = c * c * fact[i1] * fact[i2] * fact[i3] * fact[i4] * norm;
        const int mask = (i1 > 0 ? 1 : 0) | (i2 > 0 ? 2 : 0) | (i3 > 0 ? 4 : 0) | (i4 > 0 ? 8 : 0);
        occ[mask] += prob;
      }
    }
  }
  return occ;
}

AnnouncementProbs classify(const std::array<double, 16>& occ, double dark) {
  std::array<double, 5> dark_pow{};
  std::array<double, 5> quiet_pow{};
  for (int i = 0; i <= 4; ++i) {
    dark_pow[i] = std::pow(dark, i);
    quiet_pow[i] = std::pow(1.0 - dark, i);
  }
  AnnouncementProbs out;
  for (int clicks = 0; clicks < 16; ++clicks) {
    double p = 0.0;
    // occupied set is a subset of the click set; the rest are dark clicks
    for (int occupied = clicks;; occupied = (occupied - 1) & clicks) {
      const int extra = std::popcount(static_cast<unsigned>(clicks & ~occupied));
      p += occ[occupied] * dark_pow[extra];
      if (occupied == 0) break;
    }
    p *= quiet_pow[4 - std::popcount(static_cast<unsigned>(clicks))];
    if (clicks == kPsiPlusA || clicks == kPsiPlusB) {
      out.p[static_cast<int>(Announcement::psi_plus)] += p;
    } else if (clicks == kPsiMinusA || clicks == kPsiMinusB) {
      out.p[static_cast<int>(Announcement::psi_minus)] += p;
    } else {
      out.p[static_cast<int>(Announcement::inconclusive)] += p;
    }
  }
  return out;
}

}  // namespace

MdiDetectorModel::MdiDetectorModel(double e_d, double y0, int cap) : e_d_(e_d), y0_(y0), cap_(cap) {
  if (cap < 0 || cap > 40) throw Error(ErrorCode::domain, "MdiDetectorModel: cap outside [0,40]");
  if (!(e_d >= 0.0 && e_d <= 0.5) || !(y0 >= 0.0 && y0 <= 1.0)) {
    throw Error(ErrorCode::domain, "MdiDetectorModel: bad e_d or y0");
  }
  const int dim = cap + 1;
  table_.assign(static_cast<std::size_t>(kAnnouncementCount) * kStateCount * kStateCount * dim * dim, 0.0);
  std::vector<double> fact(cap + 1);
  for (int i = 0; i <= cap; ++i) fact[i] = factorial(i);
  const double dark = dark_probability(y0, 4);
  const double theta = misalignment_angle(e_d);
  const double r = 1.0 / std::numbers::sqrt2;

  for (int k = 0; k < kStateCount; ++k) {
    const auto va = polarization_amplitudes(static_cast<Polarization>(k), theta);
    // Alice enters port a: a^dagger -> (c^dagger + d^dagger)/sqrt2
    const std::array<double, 4> alpha{r * va[0], r * va[1], r * va[0], r * va[1]};
    for (int j = 0; j < kStateCount; ++j) {
      const auto vb = polarization_amplitudes(static_cast<Polarization>(j), 0.0);
      // Bob enters port b: b^dagger -> (c^dagger - d^dagger)/sqrt2
      const std::array<double, 4> beta{r * vb[0], r * vb[1], -r * vb[0], -r * vb[1]};
      ModePolynomial base(cap);
      ModePolynomial scratch_a(cap);
      ModePolynomial cur(cap);
      ModePolynomial scratch_b(cap);
      for (int n = 0; n <= cap; ++n) {
        cur = base;
        for (int m = 0; n + m <= cap; ++m) {
          const AnnouncementProbs probs = classify(occupancy_distribution(cur, n, m, fact), dark);
          for (int c = 0; c < kAnnouncementCount; ++c) table_[index(c, k, j, n, m)] = probs.p[c];
          if (n + m < cap) {
            cur.multiply(beta, scratch_b);
            std::swap(cur, scratch_b);
          }
        }
        if (n < cap) {
          base.multiply(alpha, scratch_a);
          std::swap(base, scratch_a);
        }
      }
    }
  }
}

std::shared_ptr<const MdiDetectorModel> MdiDetectorModel::shared(double e_d, double y0) {
  static std::mutex mutex;
  static std::map<std::pair<double, double>, std::shared_ptr<const MdiDetectorModel>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{e_d, y0}];
  if (!slot) slot = std::make_shared<const MdiDetectorModel>(e_d, y0, kDefaultCap);
  return slot;
}

std::size_t MdiDetectorModel::index(int c, int k, int j, int n, int m) const {
  const std::size_t dim = static_cast<std::size_t>(cap_) + 1;
  return ((((static_cast<std::size_t>(c) * kStateCount + k) * kStateCount + j) * dim + n) * dim) + m;
}

AnnouncementProbs MdiDetectorModel::arrived(int n, int m, Polarization k, Polarization j) const {
  if (n < 0 || m < 0) throw Error(ErrorCode::domain, "MdiDetectorModel: negative photon number");
  if (n + m > cap_) throw Error(ErrorCode::cap_exceeded, "MdiDetectorModel: n + m above cap");
  AnnouncementProbs out;
  for (int c = 0; c < kAnnouncementCount; ++c) {
    out.p[c] = table_[index(c, static_cast<int>(k), static_cast<int>(j), n, m)];
  }
  return out;
}

std::span<const double> MdiDetectorModel::row(Announcement c, Polarization k, Polarization j, int n) const {
  if (n < 0 || n > cap_) throw Error(ErrorCode::cap_exceeded, "MdiDetectorModel: row above cap");
  const std::size_t start = index(static_cast<int>(c), static_cast<int>(k), static_cast<int>(j), n, 0);
  return {table_.data() + start, static_cast<std::size_t>(cap_) + 1};
}

PhotonStatsMDI mdi_photon_stats(const LinkConfig& link, int n, int m, int cap) {
  link.validate();
  if (n < 0 || m < 0) throw Error(ErrorCode::domain, "mdi_photon_stats: negative photon number");
  if (n + m > cap) throw Error(ErrorCode::cap_exceeded, "mdi_photon_stats: n + m above cap");
  std::shared_ptr<const MdiDetectorModel> model = MdiDetectorModel::shared(link.params.e_d, link.params.y0);
  if (n + m > model->cap()) model = std::make_shared<const MdiDetectorModel>(link.params.e_d, link.params.y0, n + m);
  const double eta = arm_transmittance(link);

  PhotonStatsMDI stats;
  stats.n = n;
  stats.m = m;
  std::array<std::array<std::array<double, kStateCount>, kStateCount>, kAnnouncementCount> joint{};
  for (int na = 0; na <= n; ++na) {
    const double wa = binomial_pmf(n, na, eta);
    if (wa == 0.0) continue;
    for (int mb = 0; mb <= m; ++mb) {
      const double w = wa * binomial_pmf(m, mb, eta);
      if (w == 0.0) continue;
      for (int k = 0; k < kStateCount; ++k) {
        for (int j = 0; j < kStateCount; ++j) {
          const AnnouncementProbs probs =
              model->arrived(na, mb, static_cast<Polarization>(k), static_cast<Polarization>(j));
          for (int c = 0; c < kAnnouncementCount; ++c) joint[c][k][j] += w * probs.p[c] / 16.0;
        }
      }
    }
  }
  for (int c = 0; c < kAnnouncementCount; ++c) {
    double total = 0.0;
    for (const auto& row : joint[c]) {
      for (double v : row) total += v;
    }
    stats.p_c[c] = total;
    if (total <= 0.0) continue;
    for (int k = 0; k < kStateCount; ++k) {
      for (int j = 0; j < kStateCount; ++j) stats.table[c][k][j] = joint[c][k][j] / total;
    }
  }
  return stats;
}

}  // namespace lsa
