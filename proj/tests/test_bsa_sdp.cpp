#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "lsa/bsa_sdp.hpp"

using namespace lsa;
using Eigen::MatrixXcd;

namespace {

LinkConfig ideal_link() {
  ChannelParams p;
  p.y0 = 0.0;
  p.e_d = 0.0;
  p.eta_d = 1.0;
  p.alpha = 0.0;
  return {0.0, p};
}

MatrixXcd random_density(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXcd m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = {g(rng), g(rng)};
  }
  MatrixXcd rho = m * m.adjoint();
  return rho / rho.trace().real();
}

int rank_of(const MatrixXcd& m, double tol) {
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<MatrixXcd>(m).eigenvalues();
  int r = 0;
  for (double v : ev) r += v > tol;
  return r;
}

}  // namespace

TEST_CASE("Alice's virtual marginal") {
  for (int n = 0; n <= 10; ++n) {
    const MatrixXcd r = reduced_state_alice(n);
    CHECK(r.trace().real() == doctest::Approx(1.0));
    CHECK((r - r.adjoint()).norm() < 1e-15);
    CHECK(min_eigenvalue(r) > -1e-12);
  }
  const MatrixXcd r1 = reduced_state_alice(1);
  const double off = 0.25 / std::sqrt(2.0);
  CHECK(std::abs(r1(0, 2)) == doctest::Approx(off));
  CHECK(r1(1, 3).real() == doctest::Approx(-off));
  const MatrixXcd r30 = reduced_state_alice(30);
  CHECK((r30 - 0.25 * MatrixXcd::Identity(4, 4)).norm() < 1e-4);
}

TEST_CASE("Bob's virtual measurement") {
  const auto povm = bob_virtual_povm();
  MatrixXcd sum = MatrixXcd::Zero(3, 3);
  for (const auto& b : povm) {
    CHECK(min_eigenvalue(b) > -1e-15);
    sum += b;
  }
  CHECK((sum - MatrixXcd::Identity(3, 3)).norm() < 1e-14);
  Eigen::VectorXcd plus = Eigen::VectorXcd::Zero(3);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0;
  CHECK((plus.adjoint() * povm[0] * plus)(0, 0).real() == doctest::Approx(0.25));
}

TEST_CASE("partial transpose") {
  // the maximally entangled qubit pair has PT eigenvalue -1/2
  MatrixXcd phi = MatrixXcd::Zero(4, 4);
  phi(0, 0) = phi(0, 3) = phi(3, 0) = phi(3, 3) = 0.5;
  CHECK(min_eigenvalue(partial_transpose_b(phi, 2, 2)) == doctest::Approx(-0.5));
  const MatrixXcd twice = partial_transpose_b(partial_transpose_b(phi, 2, 2), 2, 2);
  CHECK((twice - phi).norm() < 1e-15);
}

TEST_CASE("mutual information") {
  const auto a = virtual_projectors();
  std::mt19937_64 rng(2);
  const MatrixXcd ra = random_density(4, rng);
  const MatrixXcd rb = random_density(4, rng);
  MatrixXcd prod(16, 16);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) prod.block(4 * i, 4 * j, 4, 4) = ra(i, j) * rb;
  }
  CHECK(std::abs(mutual_information_on({4, 4, prod}, a, a)) < 1e-12);

  // classically correlated: half |00>, half |11>
  MatrixXcd corr = MatrixXcd::Zero(16, 16);
  corr(0, 0) = 0.5;
  corr(5, 5) = 0.5;
  CHECK(mutual_information_on({4, 4, corr}, a, a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("separable statistics give lambda = 1") {
  std::mt19937_64 rng(9);
  const auto povm = bob_virtual_povm();
  for (int n : {1, 2, 4}) {
    // sigma = rho_A^n (x) tau: p_kj = <k|rho_A|k> tr(B_j tau)
    const MatrixXcd tau = random_density(3, rng);
    const MatrixXcd ra = reduced_state_alice(n);
    PhotonStatsBB84 s;
    s.n = n;
    for (int k = 0; k < 4; ++k) {
      for (int j = 0; j < 5; ++j) s.p[k][j] = ra(k, k).real() * (povm[j] * tau).trace().real();
    }
    const auto r = solve_bsa_bb84(n, s);
    CHECK(r.lambda_bsa >= 1 - 1e-6);
    CHECK(r.certificate.valid());
    CHECK_FALSE(r.rho_ent.has_value());
  }
  // everything lost
  PhotonStatsBB84 lost;
  lost.n = 3;
  for (int k = 0; k < 4; ++k) lost.p[k][4] = 0.25;
  const auto r = solve_bsa_bb84(3, lost);
  CHECK(r.lambda_bsa >= 1 - 1e-6);
  CHECK(r.certificate.valid());
}

TEST_CASE("noiseless single photons are entangled") {
  const auto stats = bb84_photon_stats(ideal_link(), 1);
  const auto r = solve_bsa_bb84(1, stats);
  CHECK(r.certificate.valid());
  // The statistics pin sigma_AB to a pure NPT state; any PSD operator
  // below a pure state is a multiple of it, so no separable weight fits.
  CHECK(rank_of(r.sigma_ab.matrix, 1e-6) == 1);
  CHECK(min_eigenvalue(partial_transpose_b(r.sigma_ab.matrix, 4, 3)) < -0.1);
  CHECK(r.lambda_bsa < 1e-6);
  CHECK(r.certificate.dual_lambda_bound >= r.lambda_bsa - 1e-8);
  CHECK(r.certificate.dual_lambda_bound < 1e-5);
  REQUIRE(r.rho_ent.has_value());
  CHECK(r.rho_ent->trace() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.certificate.min_eig_ent_pt < -1e-9);
  // full-table information of the ideal single photon: 1 bit on the
  // matching-basis half of the table, 1/2 bit overall
  CHECK(bb84_entangled_information(*r.rho_ent) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("bb84 certificates across photon numbers") {
  const LinkConfig link{40, {}};
  for (int n = 1; n <= 6; ++n) {
    const auto r = solve_bsa_bb84(n, bb84_photon_stats(link, n));
    INFO("n = " << n);
    CHECK(r.certificate.valid());
    CHECK(r.lambda_bsa >= 0.0);
    CHECK(r.lambda_bsa <= 1.0);
    CHECK(r.certificate.dual_lambda_bound >= r.lambda_bsa - 1e-7);
    if (r.rho_ent) CHECK(r.certificate.min_eig_ent_pt < -1e-9);
  }
}

TEST_CASE("mdi BSA fixtures") {
  // ideal (1,1): a psi- announcement heralds an entangled pair
  const auto ideal = mdi_photon_stats(ideal_link(), 1, 1);
  const auto r = solve_bsa_mdi(1, 1, Announcement::psi_minus, ideal);
  CHECK(r.certificate.valid());
  CHECK(r.lambda_bsa < 1 - 1e-3);
  REQUIRE(r.rho_ent.has_value());
  CHECK(r.certificate.min_eig_ent_pt < -1e-9);
  CHECK(mdi_entangled_information(*r.rho_ent) > 0.0);

  // announcements decided by dark counts alone
  const LinkConfig dark_only{3000, {}};
  const auto dark = mdi_photon_stats(dark_only, 1, 1);
  for (auto c : {Announcement::psi_plus, Announcement::psi_minus}) {
    const auto rd = solve_bsa_mdi(1, 1, c, dark);
    CHECK(rd.lambda_bsa >= 1 - 1e-6);
    CHECK(rd.certificate.valid());
  }

  // inconclusive events still give a feasible program
  const auto ri = solve_bsa_mdi(1, 1, Announcement::inconclusive, mdi_photon_stats({40, {}}, 1, 1));
  CHECK(ri.certificate.valid());
  CHECK(ri.lambda_bsa >= 0.0);
}

TEST_CASE("upper bounds") {
  ChannelParams dead;
  dead.y0 = 0.0;
  const LinkConfig cut{5000, dead};
  CHECK(bb84_upper_bound(cut, 0.5, 4) == 0.0);
  CHECK(mdi_upper_bound(cut, 0.5, 2) == 0.0);

  const LinkConfig link{40, {}};
  const auto terms = bb84_upper_terms(link, 10);
  CHECK(terms.lambda.size() == 10);
  for (std::size_t i = 0; i < terms.results.size(); ++i) CHECK(terms.results[i].certificate.valid());
  // composed term by term
  double manual = 0.0;
  for (int n = 1; n <= 10; ++n) {
    const double lam = terms.lambda[n - 1];
    if (lam < 1 - kSeparableTolerance) manual += poisson_weight(0.7, n) * (1 - lam) * terms.information[n - 1];
  }
  CHECK(bb84_upper_bound(terms, 0.7) == doctest::Approx(manual).epsilon(1e-14));
  // only one and two photons carry BSA-entangled weight
  for (int n = 3; n <= 10; ++n) CHECK(terms.lambda[n - 1] >= 1 - 1e-6);

  double last = 1.0;
  for (double km : {20.0, 40.0, 80.0}) {
    const double ru = bb84_upper_bound({km, {}}, 0.7, 4);
    CHECK(ru <= last);
    last = ru;
  }
}
