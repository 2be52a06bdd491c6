#pragma once
// Photon-level ground truth: exact enumeration of what the receivers see
// for a given number of emitted photons.

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "lsa/channel.hpp"

namespace lsa {

/// Alice's (and in MDI, Bob's) four BB84 states, in this order everywhere.
enum class Polarization : int { H = 0, V = 1, plus = 2, minus = 3 };
inline constexpr int kStateCount = 4;

/// Outcomes of Bob's qubit-plus-vacuum measurement.
enum class BobOutcome : int { zero = 0, one = 1, plus = 2, minus = 3, vac = 4 };
inline constexpr int kBobOutcomeCount = 5;

/// Polarization angle of each state, in radians (H = 0, + = pi/4).
double polarization_angle(Polarization k);

/// Misalignment rotation angle asin(sqrt(e_d)).
double misalignment_angle(double e_d);

/// Per-detector dark probability d for `detectors` detectors jointly
/// producing background probability y0: 1-(1-d)^detectors = y0.
double dark_probability(double y0, int detectors);

struct PhotonStatsBB84 {
  int n = 0;
  /// p[k][j]: joint probability of Alice's state k (prior 1/4) and Bob's
  /// outcome j, for an n-photon emission.
  std::array<std::array<double, kBobOutcomeCount>, kStateCount> p{};
};

PhotonStatsBB84 bb84_photon_stats(const LinkConfig& link, int n, int cap = 25);

struct PhotonYield {
  int n = 0;
  double y_z = 0.0;
  double e_z = 0.0;
  double y_x = 0.0;
  double e_x = 0.0;
};

/// Yield: click probability for a basis-alpha preparation measured in
/// alpha. Error: fraction of those clicks with the wrong bit.
PhotonYield aggregate_yield(const PhotonStatsBB84& stats);
std::vector<PhotonYield> aggregate_yields(std::span<const PhotonStatsBB84> stats);

enum class Announcement : int { psi_plus = 0, psi_minus = 1, inconclusive = 2 };
inline constexpr int kAnnouncementCount = 3;

struct AnnouncementProbs {
  std::array<double, kAnnouncementCount> p{};
};

/// Relay model for MDI: Alice's and Bob's photons meet on a balanced beam
/// splitter; each output port has a polarizing splitter with H and V
/// threshold detectors (four in total). Evolution is exact in the Fock
/// basis. Alice's photons carry the misalignment rotation. Tables are
/// indexed by the photon numbers that *arrive* at the relay, so the model
/// is independent of distance; channel loss is applied by the callers.
class MdiDetectorModel {
 public:
  MdiDetectorModel(double e_d, double y0, int cap);

  /// Process-wide cached model for (e_d, y0) with the default cap.
  static std::shared_ptr<const MdiDetectorModel> shared(double e_d, double y0);
  static constexpr int kDefaultCap = 18;

  int cap() const noexcept { return cap_; }
  double e_d() const noexcept { return e_d_; }
  double y0() const noexcept { return y0_; }

  /// Announcement probabilities given n Alice photons in state k and m Bob
  /// photons in state j reaching the relay. Requires n + m <= cap().
  AnnouncementProbs arrived(int n, int m, Polarization k, Polarization j) const;

  /// Row of P(c | n, m, k, j) over m = 0..cap (zero where n + m > cap).
  std::span<const double> row(Announcement c, Polarization k, Polarization j, int n) const;

 private:
  std::size_t index(int c, int k, int j, int n, int m) const;

  double e_d_;
  double y0_;
  int cap_;
  std::vector<double> table_;
};

struct PhotonStatsMDI {
  int n = 0;
  int m = 0;
  /// p_c[c] = P(announcement c | n, m), averaged over the 16 input pairs.
  std::array<double, kAnnouncementCount> p_c{};
  /// table[c][k][j] = P(k, j | c, n, m); each announcement's table sums to
  /// 1 when p_c[c] > 0 and is all zero otherwise.
  std::array<std::array<std::array<double, kStateCount>, kStateCount>, kAnnouncementCount> table{};
};

PhotonStatsMDI mdi_photon_stats(const LinkConfig& link, int n, int m, int cap = 12);

}  // namespace lsa
