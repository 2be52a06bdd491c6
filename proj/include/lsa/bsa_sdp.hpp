#pragma once
// Best-separable-approximation programs on the source-replacement states
// and the key-rate upper bounds built from them.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lsa/fock_oracle.hpp"
#include "lsa/sdp.hpp"

namespace lsa {

struct BipartiteState {
  int dim_a = 0;
  int dim_b = 0;
  Eigen::MatrixXcd matrix;

  double trace() const { return matrix.trace().real(); }
};

/// Partial transpose on the second factor.
Eigen::MatrixXcd partial_transpose_b(const Eigen::MatrixXcd& m, int dim_a, int dim_b);
double min_eigenvalue(const Eigen::MatrixXcd& m);

/// Post-hoc checks, independent of the solver's own residuals.
struct BsaCertificate {
  double min_eig_sep = 0.0;
  double min_eig_sep_pt = 0.0;
  double min_eig_remainder = 0.0;  // sigma_AB - sigma_sep
  double stats_residual = 0.0;     // statistics and marginal constraints, max abs
  double dual_lambda_bound = 1.0;  // upper bound on lambda from the dual
  double min_eig_ent_pt = 0.0;     // only meaningful when rho_ent exists

  bool valid(double eig_tol = 1e-9, double stats_tol = 1e-7) const;
};

struct BsaResult {
  double lambda_bsa = 1.0;
  std::optional<BipartiteState> rho_ent;
  BipartiteState sigma_ab;
  BipartiteState sigma_sep;
  BsaCertificate certificate;
  sdp::Status status = sdp::Status::optimal;
  bool trivial = false;  // decided without a solve (e.g. empty announcement)
};

/// Alice's virtual-qudit marginal for n-photon pulses, basis (H, V, +, -).
Eigen::MatrixXcd reduced_state_alice(int n);

/// Bob's measurement on qubit plus vacuum, basis (|0>, |1>, |vac>); order
/// (B_0, B_1, B_+, B_-, B_vac).
std::array<Eigen::MatrixXcd, kBobOutcomeCount> bob_virtual_povm();

/// |k><k| on the 4-dim virtual space.
std::array<Eigen::MatrixXcd, kStateCount> virtual_projectors();

inline constexpr double kSeparableTolerance = 1e-7;

BsaResult solve_bsa_bb84(int n, const PhotonStatsBB84& stats, const sdp::Options& options = {});
BsaResult solve_bsa_mdi(int n, int m, Announcement c, const PhotonStatsMDI& stats,
                        const sdp::Options& options = {});

/// I(A;B) in bits of q_kj = Tr[(A_k x B_j) rho].
double mutual_information_on(const BipartiteState& rho, std::span<const Eigen::MatrixXcd> a_ops,
                             std::span<const Eigen::MatrixXcd> b_ops);

/// I^ent of the rate bounds: mutual information of the full virtual
/// measurement table (Alice's four projectors against Bob's five outcomes,
/// or against Bob's four projectors in MDI).
double bb84_entangled_information(const BipartiteState& rho_ent);
double mdi_entangled_information(const BipartiteState& rho_ent);

/// Photon-number terms of the upper bound at one distance. They do not
/// depend on the emitted intensity, which only enters the Poisson weights.
struct Bb84UpperTerms {
  std::vector<double> lambda;       // index n-1
  std::vector<double> information;  // I_n, zero when lambda is ~1
  std::vector<BsaResult> results;
};

struct MdiUpperTerms {
  int cap = 0;
  // index [c][n-1][m-1] for c in {psi_plus, psi_minus}
  std::array<std::vector<std::vector<double>>, 2> weight;  // p_{c|nm} * (1 - lambda) * I
  std::vector<BsaResult> results;
};

Bb84UpperTerms bb84_upper_terms(const LinkConfig& link, int n_max, const sdp::Options& options = {});
double bb84_upper_bound(const Bb84UpperTerms& terms, double mu_actual);
double bb84_upper_bound(const LinkConfig& link, double mu_actual, int n_max = 10);

MdiUpperTerms mdi_upper_terms(const LinkConfig& link, int cap, const sdp::Options& options = {});
double mdi_upper_bound(const MdiUpperTerms& terms, double mu_actual);
double mdi_upper_bound(const LinkConfig& link, double mu_actual, int cap = 5);

}  // namespace lsa
