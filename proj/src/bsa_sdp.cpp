#include "lsa/bsa_sdp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lsa/parallel.hpp"

namespace lsa {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using cd = std::complex<double>;

namespace {

constexpr double kZeroStat = 1e-13;
constexpr double kRankTol = 1e-11;

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Orthonormal basis of the eigenvectors whose eigenvalue is above (range)
// or below (kernel) a relative threshold.
MatrixXcd spectral_subspace(const MatrixXcd& h, bool range) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sdp::hermitian_part(h));
  const VectorXd& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const bool above = ev[i] > kRankTol * scale;
    if (above == range) keep.push_back(i);
  }
  MatrixXcd out(h.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = es.eigenvectors().col(keep[i]);
  return out;
}

MatrixXcd partial_trace_b(const MatrixXcd& m, int da, int db) {
  MatrixXcd out = MatrixXcd::Zero(da, da);
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < da; ++j) {
      for (int k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
    }
  }
  return out;
}

struct Variable {
  MatrixXcd face;  // base-space isometry, N x r
  int dim() const { return static_cast<int>(face.cols()); }
  int coords() const { return sdp::coord_count(dim()); }
};

struct ProgramOutput {
  MatrixXcd y1;
  MatrixXcd y2;
  std::vector<MatrixXcd> others;  // index aligned with vars, key slot empty
  sdp::Solution solution;
};

// Independent subset of the data rows; throws if the dropped rows are not
// implied by the kept ones.
void reduce_rows(MatrixXd& rows, VectorXd& rhs) {
  Eigen::ColPivHouseholderQR<MatrixXd> qr(rows.transpose());
  qr.setThreshold(1e-10);
  qr.compute(rows.transpose());
  const Eigen::Index rank = qr.rank();
  std::vector<Eigen::Index> picked;
  for (Eigen::Index i = 0; i < rank; ++i) picked.push_back(qr.colsPermutation().indices()[i]);
  std::sort(picked.begin(), picked.end());
  MatrixXd sel(rank, rows.cols());
  VectorXd sel_rhs(rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    sel.row(i) = rows.row(picked[static_cast<std::size_t>(i)]);
    sel_rhs[i] = rhs[picked[static_cast<std::size_t>(i)]];
  }
  const VectorXd z = sel.completeOrthogonalDecomposition().solve(sel_rhs);
  const double mismatch = (rows * z - rhs).cwiseAbs().maxCoeff();
  if (mismatch > 1e-9) {
    std::ostringstream os;
    os << "statistics are inconsistent with the source marginal (mismatch " << mismatch << ")";
    throw Error(ErrorCode::infeasible_statistics, os.str());
  }
  rows = std::move(sel);
  rhs = std::move(sel_rhs);
}

// Blocks: Y1 = sigma_sep and Y2 = remainder on the key variable's face,
// Y3 = partial transpose of sigma_sep on the base space, then one block per
// non-key variable. `rows` act on the concatenated logical variables.
ProgramOutput solve_program(int base_da, int base_db, const std::vector<Variable>& vars, std::size_t key,
                            MatrixXd rows, VectorXd rhs, const sdp::Options& options) {
  reduce_rows(rows, rhs);
  const int n_base = base_da * base_db;
  const int base_coords = sdp::coord_count(n_base);
  const Variable& kv = vars[key];

  sdp::Problem p;
  p.block_dims = {kv.dim(), kv.dim(), n_base};
  for (std::size_t t = 0; t < vars.size(); ++t) {
    if (t != key) p.block_dims.push_back(vars[t].dim());
  }
  const int data_rows = static_cast<int>(rows.rows());
  p.a = MatrixXd::Zero(data_rows + base_coords, p.total_coords());
  p.b = VectorXd::Zero(data_rows + base_coords);
  p.c = VectorXd::Zero(p.total_coords());

  std::vector<int> block_of(vars.size());
  {
    int next = 3;
    for (std::size_t t = 0; t < vars.size(); ++t) block_of[t] = t == key ? -1 : next++;
  }
  int logical = 0;
  for (std::size_t t = 0; t < vars.size(); ++t) {
    const int len = vars[t].coords();
    const auto seg = rows.middleCols(logical, len);
    if (t == key) {
      p.a.block(0, p.offset(0), data_rows, len) = seg;
      p.a.block(0, p.offset(1), data_rows, len) = seg;
    } else {
      p.a.block(0, p.offset(block_of[t]), data_rows, len) = seg;
    }
    logical += len;
  }
  p.b.head(data_rows) = rhs;

  // Y3 - PT(V Y1 V^dagger) = 0
  const int key_coords = kv.coords();
  MatrixXd link(base_coords, key_coords);
  for (int s = 0; s < key_coords; ++s) {
    const MatrixXcd e = sdp::smat(VectorXd::Unit(key_coords, s), kv.dim());
    link.col(s) = sdp::svec(partial_transpose_b(kv.face * e * kv.face.adjoint(), base_da, base_db));
  }
  p.a.block(data_rows, p.offset(0), base_coords, key_coords) = -link;
  p.a.block(data_rows, p.offset(2), base_coords, base_coords) = MatrixXd::Identity(base_coords, base_coords);
  p.c.segment(p.offset(0), key_coords) = -sdp::svec(MatrixXcd::Identity(kv.dim(), kv.dim()));

  ProgramOutput out;
  out.solution = sdp::solve(p, options);
  const auto status = out.solution.status;
  if (status == sdp::Status::primal_infeasible) {
    throw Error(ErrorCode::infeasible_statistics, "no separable-plus-remainder state reproduces the statistics");
  }
  if (status == sdp::Status::failed) {
    std::ostringstream os;
    os << "BSA solve did not converge: primal residual " << out.solution.primal_residual << ", dual residual "
       << out.solution.dual_residual << ", gap " << out.solution.gap << " after " << out.solution.iterations
       << " iterations";
    throw Error(ErrorCode::solver_failure, os.str());
  }
  out.y1 = out.solution.x[0];
  out.y2 = out.solution.x[1];
  out.others.resize(vars.size());
  for (std::size_t t = 0; t < vars.size(); ++t) {
    if (t != key) out.others[t] = out.solution.x[static_cast<std::size_t>(block_of[t])];
  }
  return out;
}

MatrixXcd face_for(const std::vector<MatrixXcd>& zero_ops, int n_base) {
  if (zero_ops.empty()) return MatrixXcd::Identity(n_base, n_base);
  MatrixXcd sum = MatrixXcd::Zero(n_base, n_base);
  for (const auto& op : zero_ops) sum += op;
  MatrixXcd face = spectral_subspace(sum, false);
  if (face.cols() == 0) {
    throw Error(ErrorCode::infeasible_statistics, "zero-probability outcomes exclude every state");
  }
  return face;
}

void finish_result(BsaResult& r, const MatrixXcd& lift, const ProgramOutput& out, int da, int db) {
  r.status = out.solution.status;
  r.lambda_bsa = std::clamp(out.y1.trace().real(), 0.0, 1.0);
  r.sigma_sep = {da, db, sdp::hermitian_part(lift * out.y1 * lift.adjoint())};
  const MatrixXcd rem = sdp::hermitian_part(lift * out.y2 * lift.adjoint());
  r.sigma_ab = {da, db, r.sigma_sep.matrix + rem};
  r.certificate.min_eig_sep = min_eigenvalue(r.sigma_sep.matrix);
  r.certificate.min_eig_sep_pt = min_eigenvalue(partial_transpose_b(r.sigma_sep.matrix, da, db));
  r.certificate.min_eig_remainder = min_eigenvalue(rem);
  r.certificate.dual_lambda_bound = -out.solution.dual_objective;
  if (r.lambda_bsa < 1.0 - kSeparableTolerance) {
    BipartiteState ent{da, db, rem / (1.0 - r.lambda_bsa)};
    r.certificate.min_eig_ent_pt = min_eigenvalue(partial_transpose_b(ent.matrix, da, db));
    r.rho_ent = std::move(ent);
  }
}

double shannon_mi(const std::vector<std::vector<double>>& q) {
  double total = 0.0;
  for (const auto& row : q) {
    for (double v : row) total += std::max(v, 0.0);
  }
  if (total <= 0.0) return 0.0;
  const std::size_t na = q.size();
  const std::size_t nb = q.front().size();
  std::vector<double> pa(na, 0.0), pb(nb, 0.0);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      const double v = std::max(q[i][j], 0.0) / total;
      pa[i] += v;
      pb[j] += v;
    }
  }
  double mi = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      const double v = std::max(q[i][j], 0.0) / total;
      if (v > 0.0) mi += v * std::log2(v / (pa[i] * pb[j]));
    }
  }
  return std::max(mi, 0.0);
}

std::vector<std::vector<double>> joint_table(const MatrixXcd& rho, std::span<const MatrixXcd> a_ops,
                                             std::span<const MatrixXcd> b_ops) {
  std::vector<std::vector<double>> q(a_ops.size(), std::vector<double>(b_ops.size(), 0.0));
  for (std::size_t k = 0; k < a_ops.size(); ++k) {
    for (std::size_t j = 0; j < b_ops.size(); ++j) {
      q[k][j] = (kron(a_ops[k], b_ops[j]) * rho).trace().real();
    }
  }
  return q;
}

}  // namespace

MatrixXcd partial_transpose_b(const MatrixXcd& m, int da, int db) {
  MatrixXcd out(m.rows(), m.cols());
  for (int a1 = 0; a1 < da; ++a1) {
    for (int a2 = 0; a2 < da; ++a2) {
      for (int b1 = 0; b1 < db; ++b1) {
        for (int b2 = 0; b2 < db; ++b2) out(a1 * db + b1, a2 * db + b2) = m(a1 * db + b2, a2 * db + b1);
      }
    }
  }
  return out;
}

double min_eigenvalue(const MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<MatrixXcd>(sdp::hermitian_part(m), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

bool BsaCertificate::valid(double eig_tol, double stats_tol) const {
  return min_eig_sep >= -eig_tol && min_eig_sep_pt >= -eig_tol && min_eig_remainder >= -eig_tol &&
         stats_residual < stats_tol;
}

MatrixXcd reduced_state_alice(int n) {
  if (n < 0) throw Error(ErrorCode::domain, "reduced_state_alice: n < 0");
  // Overlaps <k|l>^n; for n = 0 every overlap is 1, including <H|V>^0.
  if (n == 0) return MatrixXcd::Constant(4, 4, 0.25);
  const double a = std::pow(2.0, -0.5 * n);
  const double s = (n % 2 == 0) ? a : -a;
  Eigen::Matrix4d r;
  r << 1, 0, a, a,
       0, 1, a, s,
       a, a, 1, 0,
       a, s, 0, 1;
  return (0.25 * r).cast<cd>();
}

std::array<MatrixXcd, kBobOutcomeCount> bob_virtual_povm() {
  std::array<MatrixXcd, kBobOutcomeCount> out;
  Eigen::Vector3cd e0(1, 0, 0), e1(0, 1, 0), vac(0, 0, 1);
  const Eigen::Vector3cd plus = (e0 + e1) / std::numbers::sqrt2;
  const Eigen::Vector3cd minus = (e0 - e1) / std::numbers::sqrt2;
  out[0] = 0.5 * e0 * e0.adjoint();
  out[1] = 0.5 * e1 * e1.adjoint();
  out[2] = 0.5 * plus * plus.adjoint();
  out[3] = 0.5 * minus * minus.adjoint();
  out[4] = vac * vac.adjoint();
  return out;
}

std::array<MatrixXcd, kStateCount> virtual_projectors() {
  std::array<MatrixXcd, kStateCount> out;
  for (int k = 0; k < kStateCount; ++k) {
    out[k] = MatrixXcd::Zero(kStateCount, kStateCount);
    out[k](k, k) = 1.0;
  }
  return out;
}

BsaResult solve_bsa_bb84(int n, const PhotonStatsBB84& stats, const sdp::Options& options) {
  if (n < 1) throw Error(ErrorCode::domain, "solve_bsa_bb84: n < 1");
  constexpr int da = kStateCount;
  constexpr int db = 3;
  const MatrixXcd rho_a = reduced_state_alice(n);
  const MatrixXcd ua = spectral_subspace(rho_a, true);
  const int ra = static_cast<int>(ua.cols());
  const MatrixXcd w = kron(ua, MatrixXcd::Identity(db, db));
  const int n_base = ra * db;
  const auto a_ops = virtual_projectors();
  const auto b_ops = bob_virtual_povm();

  std::array<std::array<MatrixXcd, kBobOutcomeCount>, kStateCount> full_ops, base_ops;
  std::vector<MatrixXcd> zero_ops;
  for (int k = 0; k < da; ++k) {
    for (int j = 0; j < kBobOutcomeCount; ++j) {
      full_ops[k][j] = kron(a_ops[k], b_ops[j]);
      base_ops[k][j] = sdp::hermitian_part(w.adjoint() * full_ops[k][j] * w);
      if (std::abs(stats.p[k][j]) <= kZeroStat) zero_ops.push_back(base_ops[k][j]);
    }
  }
  Variable var{face_for(zero_ops, n_base)};
  const MatrixXcd& v = var.face;

  const MatrixXcd marginal = sdp::hermitian_part(ua.adjoint() * rho_a * ua);
  const VectorXd marginal_vec = sdp::svec(marginal);
  const int marg_coords = sdp::coord_count(ra);
  std::vector<VectorXd> rows;
  std::vector<double> rhs;
  for (int k = 0; k < da; ++k) {
    for (int j = 0; j < kBobOutcomeCount; ++j) {
      if (std::abs(stats.p[k][j]) <= kZeroStat) continue;
      rows.push_back(sdp::svec(v.adjoint() * base_ops[k][j] * v));
      rhs.push_back(stats.p[k][j]);
    }
  }
  for (int r = 0; r < marg_coords; ++r) {
    const MatrixXcd e = sdp::smat(VectorXd::Unit(marg_coords, r), ra);
    rows.push_back(sdp::svec(v.adjoint() * kron(e, MatrixXcd::Identity(db, db)) * v));
    rhs.push_back(marginal_vec[r]);
  }
  MatrixXd row_mat(static_cast<Eigen::Index>(rows.size()), var.coords());
  for (std::size_t i = 0; i < rows.size(); ++i) row_mat.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  VectorXd rhs_vec = Eigen::Map<VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));

  const ProgramOutput out = solve_program(ra, db, {var}, 0, std::move(row_mat), std::move(rhs_vec), options);
  BsaResult r;
  finish_result(r, w * v, out, da, db);
  double resid = (partial_trace_b(r.sigma_ab.matrix, da, db) - rho_a).cwiseAbs().maxCoeff();
  for (int k = 0; k < da; ++k) {
    for (int j = 0; j < kBobOutcomeCount; ++j) {
      resid = std::max(resid, std::abs((full_ops[k][j] * r.sigma_ab.matrix).trace().real() - stats.p[k][j]));
    }
  }
  r.certificate.stats_residual = resid;
  return r;
}

BsaResult solve_bsa_mdi(int n, int m, Announcement c, const PhotonStatsMDI& stats, const sdp::Options& options) {
  if (n < 1 || m < 1) throw Error(ErrorCode::domain, "solve_bsa_mdi: photon numbers must be >= 1");
  constexpr int d = kStateCount;
  const int ci = static_cast<int>(c);
  BsaResult r;
  if (stats.p_c[ci] <= 1e-14) {
    r.trivial = true;
    r.lambda_bsa = 1.0;
    return r;
  }
  const MatrixXcd rho_a = reduced_state_alice(n);
  const MatrixXcd rho_b = reduced_state_alice(m);
  const MatrixXcd ua = spectral_subspace(rho_a, true);
  const MatrixXcd ub = spectral_subspace(rho_b, true);
  const int ra = static_cast<int>(ua.cols());
  const int rb = static_cast<int>(ub.cols());
  const MatrixXcd w = kron(ua, ub);
  const int n_base = ra * rb;
  const auto proj = virtual_projectors();

  std::array<std::array<MatrixXcd, d>, d> full_ops, base_ops;
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j < d; ++j) {
      full_ops[k][j] = kron(proj[k], proj[j]);
      base_ops[k][j] = sdp::hermitian_part(w.adjoint() * full_ops[k][j] * w);
    }
  }

  std::vector<int> active;
  for (int t = 0; t < kAnnouncementCount; ++t) {
    if (stats.p_c[t] > 1e-14) active.push_back(t);
  }
  std::vector<Variable> vars;
  std::size_t key = 0;
  for (std::size_t i = 0; i < active.size(); ++i) {
    const int t = active[i];
    if (t == ci) key = i;
    std::vector<MatrixXcd> zero_ops;
    for (int k = 0; k < d; ++k) {
      for (int j = 0; j < d; ++j) {
        if (std::abs(stats.table[t][k][j]) <= kZeroStat) zero_ops.push_back(base_ops[k][j]);
      }
    }
    vars.push_back({face_for(zero_ops, n_base)});
  }
  std::vector<int> start(vars.size());
  int total = 0;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    start[i] = total;
    total += vars[i].coords();
  }

  const int base_coords = sdp::coord_count(n_base);
  std::vector<VectorXd> rows;
  std::vector<double> rhs;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const int t = active[i];
    const MatrixXcd& v = vars[i].face;
    for (int k = 0; k < d; ++k) {
      for (int j = 0; j < d; ++j) {
        if (std::abs(stats.table[t][k][j]) <= kZeroStat) continue;
        VectorXd row = VectorXd::Zero(total);
        row.segment(start[i], vars[i].coords()) = sdp::svec(v.adjoint() * base_ops[k][j] * v);
        rows.push_back(std::move(row));
        rhs.push_back(stats.table[t][k][j]);
      }
    }
  }
  const MatrixXcd product = kron(rho_a, rho_b);
  const VectorXd product_vec = sdp::svec(sdp::hermitian_part(w.adjoint() * product * w));
  for (int e_idx = 0; e_idx < base_coords; ++e_idx) {
    const MatrixXcd e = sdp::smat(VectorXd::Unit(base_coords, e_idx), n_base);
    VectorXd row = VectorXd::Zero(total);
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const MatrixXcd& v = vars[i].face;
      row.segment(start[i], vars[i].coords()) = stats.p_c[active[i]] * sdp::svec(v.adjoint() * e * v);
    }
    rows.push_back(std::move(row));
    rhs.push_back(product_vec[e_idx]);
  }
  MatrixXd row_mat(static_cast<Eigen::Index>(rows.size()), total);
  for (std::size_t i = 0; i < rows.size(); ++i) row_mat.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  VectorXd rhs_vec = Eigen::Map<VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));

  const ProgramOutput out = solve_program(ra, rb, vars, key, std::move(row_mat), std::move(rhs_vec), options);
  finish_result(r, w * vars[key].face, out, d, d);

  // Residuals of every announcement's statistics and of the mixture.
  MatrixXcd mixture = stats.p_c[ci] * r.sigma_ab.matrix;
  double resid = 0.0;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const int t = active[i];
    MatrixXcd sigma_t = r.sigma_ab.matrix;
    if (i != key) {
      const MatrixXcd lift = w * vars[i].face;
      sigma_t = sdp::hermitian_part(lift * out.others[i] * lift.adjoint());
      mixture += stats.p_c[t] * sigma_t;
    }
    for (int k = 0; k < d; ++k) {
      for (int j = 0; j < d; ++j) {
        resid = std::max(resid, std::abs((full_ops[k][j] * sigma_t).trace().real() - stats.table[t][k][j]));
      }
    }
  }
  resid = std::max(resid, (mixture - product).cwiseAbs().maxCoeff());
  r.certificate.stats_residual = resid;
  return r;
}

double mutual_information_on(const BipartiteState& rho, std::span<const MatrixXcd> a_ops,
                             std::span<const MatrixXcd> b_ops) {
  if (a_ops.empty() || b_ops.empty()) return 0.0;
  return shannon_mi(joint_table(rho.matrix, a_ops, b_ops));
}

double bb84_entangled_information(const BipartiteState& rho_ent) {
  const auto a = virtual_projectors();
  const auto b = bob_virtual_povm();
  return mutual_information_on(rho_ent, a, b);
}

double mdi_entangled_information(const BipartiteState& rho_ent) {
  const auto p = virtual_projectors();
  return mutual_information_on(rho_ent, p, p);
}

Bb84UpperTerms bb84_upper_terms(const LinkConfig& link, int n_max, const sdp::Options& options) {
  if (n_max < 1) throw Error(ErrorCode::domain, "bb84_upper_terms: n_max < 1");
  Bb84UpperTerms terms;
  terms.lambda.assign(n_max, 1.0);
  terms.information.assign(n_max, 0.0);
  terms.results.resize(n_max);
  parallel_for(static_cast<std::size_t>(n_max), [&](std::size_t i) {
    const int n = static_cast<int>(i) + 1;
    BsaResult r = solve_bsa_bb84(n, bb84_photon_stats(link, n), options);
    terms.lambda[i] = r.lambda_bsa;
    if (r.rho_ent) terms.information[i] = bb84_entangled_information(*r.rho_ent);
    terms.results[i] = std::move(r);
  });
  return terms;
}

double bb84_upper_bound(const Bb84UpperTerms& terms, double mu_actual) {
  double total = 0.0;
  for (std::size_t i = 0; i < terms.lambda.size(); ++i) {
    const double lam = terms.lambda[i];
    if (lam >= 1.0 - kSeparableTolerance) continue;
    total += poisson_weight(mu_actual, static_cast<int>(i) + 1) * (1.0 - lam) * terms.information[i];
  }
  return total;
}

double bb84_upper_bound(const LinkConfig& link, double mu_actual, int n_max) {
  return bb84_upper_bound(bb84_upper_terms(link, n_max), mu_actual);
}

MdiUpperTerms mdi_upper_terms(const LinkConfig& link, int cap, const sdp::Options& options) {
  if (cap < 1) throw Error(ErrorCode::domain, "mdi_upper_terms: cap < 1");
  MdiUpperTerms terms;
  terms.cap = cap;
  for (auto& w : terms.weight) w.assign(cap, std::vector<double>(cap, 0.0));
  const std::size_t pairs = static_cast<std::size_t>(cap) * cap;
  std::vector<PhotonStatsMDI> stats(pairs);
  parallel_for(pairs, [&](std::size_t i) {
    stats[i] = mdi_photon_stats(link, static_cast<int>(i) / cap + 1, static_cast<int>(i) % cap + 1);
  });
  terms.results.resize(2 * pairs);
  parallel_for(2 * pairs, [&](std::size_t task) {
    const std::size_t i = task / 2;
    const int c = static_cast<int>(task % 2);
    const int n = static_cast<int>(i) / cap + 1;
    const int m = static_cast<int>(i) % cap + 1;
    BsaResult r = solve_bsa_mdi(n, m, static_cast<Announcement>(c), stats[i], options);
    if (r.rho_ent) {
      terms.weight[c][n - 1][m - 1] = stats[i].p_c[c] * (1.0 - r.lambda_bsa) * mdi_entangled_information(*r.rho_ent);
    }
    terms.results[task] = std::move(r);
  });
  return terms;
}

double mdi_upper_bound(const MdiUpperTerms& terms, double mu_actual) {
  double total = 0.0;
  for (const auto& w : terms.weight) {
    for (int n = 1; n <= terms.cap; ++n) {
      for (int m = 1; m <= terms.cap; ++m) {
        total += w[n - 1][m - 1] * poisson_weight(mu_actual, n) * poisson_weight(mu_actual, m);
      }
    }
  }
  return total;
}

double mdi_upper_bound(const LinkConfig& link, double mu_actual, int cap) {
  return mdi_upper_bound(mdi_upper_terms(link, cap), mu_actual);
}

}  // namespace lsa
