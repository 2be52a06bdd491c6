#include "lsa/sdp.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numbers>

#include "lsa/core.hpp"

namespace lsa::sdp {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using cd = std::complex<double>;

int coord_count(int dim) { return dim * dim; }

VectorXd svec(const MatrixXcd& h) {
  const int n = static_cast<int>(h.rows());
  VectorXd v(coord_count(n));
  int r = 0;
  for (int p = 0; p < n; ++p) v[r++] = h(p, p).real();
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      // Averaging the two triangles makes svec(G) = svec(Herm(G)).
      const cd z = 0.5 * (h(p, q) + std::conj(h(q, p)));
      v[r++] = std::numbers::sqrt2 * z.real();
      v[r++] = std::numbers::sqrt2 * z.imag();
    }
  }
  return v;
}

MatrixXcd smat(const Eigen::Ref<const VectorXd>& v, int n) {
  MatrixXcd h = MatrixXcd::Zero(n, n);
  int r = 0;
  for (int p = 0; p < n; ++p) h(p, p) = v[r++];
  constexpr double inv = 1.0 / std::numbers::sqrt2;
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      const cd z(v[r] * inv, v[r + 1] * inv);
      r += 2;
      h(p, q) = z;
      h(q, p) = std::conj(z);
    }
  }
  return h;
}

MatrixXcd hermitian_part(const MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

int Problem::total_coords() const {
  int t = 0;
  for (int d : block_dims) t += coord_count(d);
  return t;
}

int Problem::offset(int block) const {
  int t = 0;
  for (int k = 0; k < block; ++k) t += coord_count(block_dims[k]);
  return t;
}

void Problem::check() const {
  const int n = total_coords();
  if (a.cols() != n || c.size() != n || a.rows() != b.size()) {
    throw Error(ErrorCode::domain, "sdp: inconsistent problem dimensions");
  }
  for (int d : block_dims) {
    if (d <= 0) throw Error(ErrorCode::domain, "sdp: empty block");
  }
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::near_optimal: return "near_optimal";
    case Status::primal_infeasible: return "primal_infeasible";
    case Status::failed: return "failed";
  }
  return "unknown";
}

namespace {

VectorXd stack(const Problem& p, const std::vector<MatrixXcd>& blocks) {
  VectorXd v(p.total_coords());
  int off = 0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const int len = coord_count(p.block_dims[k]);
    v.segment(off, len) = svec(blocks[k]);
    off += len;
  }
  return v;
}

std::vector<MatrixXcd> unstack(const Problem& p, const VectorXd& v) {
  std::vector<MatrixXcd> out;
  int off = 0;
  for (int d : p.block_dims) {
    out.push_back(smat(v.segment(off, coord_count(d)), d));
    off += coord_count(d);
  }
  return out;
}

// Matrix of V -> Re-projection of X V S^{-1} in coordinates.
MatrixXd hkm_operator(const MatrixXcd& x, const MatrixXcd& sinv) {
  const int n = static_cast<int>(x.rows());
  const int d = coord_count(n);
  MatrixXd k(d, d);
  constexpr double inv = 1.0 / std::numbers::sqrt2;
  MatrixXcd g(n, n);
  int r = 0;
  auto emit = [&](const MatrixXcd& gm) { k.col(r++) = svec(gm); };
  for (int p = 0; p < n; ++p) {
    g.noalias() = x.col(p) * sinv.row(p);
    emit(g);
  }
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      g.noalias() = inv * (x.col(p) * sinv.row(q) + x.col(q) * sinv.row(p));
      emit(g);
      g.noalias() = cd(0.0, inv) * (x.col(p) * sinv.row(q) - x.col(q) * sinv.row(p));
      emit(g);
    }
  }
  return 0.5 * (k + k.transpose());
}

// Largest alpha keeping m + alpha*dm PSD (infinity if unbounded).
double max_step(const MatrixXcd& m, const MatrixXcd& dm) {
  Eigen::LLT<MatrixXcd> llt(m);
  if (llt.info() != Eigen::Success) return 0.0;
  const MatrixXcd l_inv = llt.matrixL().solve(MatrixXcd::Identity(m.rows(), m.cols()));
  const MatrixXcd t = hermitian_part(l_inv * dm * l_inv.adjoint());
  const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXcd>(t, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

MatrixXcd inverse_pd(const MatrixXcd& m) {
  Eigen::LLT<MatrixXcd> llt(m);
  if (llt.info() != Eigen::Success) return hermitian_part(m.inverse());
  return hermitian_part(llt.solve(MatrixXcd::Identity(m.rows(), m.cols())));
}

double inner(const std::vector<MatrixXcd>& a, const std::vector<MatrixXcd>& b) {
  double t = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) t += (a[k].adjoint() * b[k]).trace().real();
  return t;
}

}  // namespace

Solution solve(const Problem& p, const Options& opt) {
  p.check();
  const int nb = static_cast<int>(p.block_dims.size());
  const int m = static_cast<int>(p.b.size());
  int cone_order = 0;
  for (int d : p.block_dims) cone_order += d;

  // Row scaling; the solution is reported for the original data.
  MatrixXd a = p.a;
  VectorXd b = p.b;
  VectorXd row_scale(m);
  for (int i = 0; i < m; ++i) {
    const double nrm = a.row(i).norm();
    if (nrm == 0.0) throw Error(ErrorCode::domain, "sdp: empty constraint row");
    row_scale[i] = 1.0 / nrm;
    a.row(i) *= row_scale[i];
    b[i] *= row_scale[i];
  }
  const VectorXd& c = p.c;
  const double b_norm = b.norm();
  const double c_norm = c.norm();

  std::vector<MatrixXd> a_blocks(nb);
  for (int k = 0; k < nb; ++k) a_blocks[k] = a.middleCols(p.offset(k), coord_count(p.block_dims[k]));

  std::vector<MatrixXcd> x(nb), s(nb);
  for (int k = 0; k < nb; ++k) {
    const int d = p.block_dims[k];
    const double sq = std::sqrt(static_cast<double>(d));
    double zeta = std::max(10.0, sq);
    for (int i = 0; i < m; ++i) zeta = std::max(zeta, d * (1.0 + std::abs(b[i])) / 2.0);
    const double eta = std::max({10.0, sq, 1.0 + c.segment(p.offset(k), coord_count(d)).norm()});
    x[k] = zeta * MatrixXcd::Identity(d, d);
    s[k] = eta * MatrixXcd::Identity(d, d);
  }
  VectorXd y = VectorXd::Zero(m);

  Solution sol;
  auto record = [&](Status st, int iter) {
    const VectorXd xv = stack(p, x);
    const VectorXd sv = stack(p, s);
    sol.status = st;
    sol.iterations = iter;
    sol.x = x;
    sol.s = s;
    sol.y = y.cwiseProduct(row_scale);
    sol.primal_objective = c.dot(xv);
    sol.dual_objective = b.dot(y);
    sol.primal_residual = (b - a * xv).norm() / (1.0 + b_norm);
    sol.dual_residual = (c - sv - a.transpose() * y).norm() / (1.0 + c_norm);
    sol.gap = std::abs(sol.primal_objective - sol.dual_objective) /
              (1.0 + std::abs(sol.primal_objective) + std::abs(sol.dual_objective));
  };

  double best_merit = std::numeric_limits<double>::infinity();
  std::vector<MatrixXcd> best_x = x, best_s = s;
  VectorXd best_y = y;
  int stall = 0;
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    const VectorXd xv = stack(p, x);
    const VectorXd sv = stack(p, s);
    const VectorXd rp = b - a * xv;
    const VectorXd rd = c - sv - a.transpose() * y;
    const double pobj = c.dot(xv);
    const double dobj = b.dot(y);
    const double relp = rp.norm() / (1.0 + b_norm);
    const double reld = rd.norm() / (1.0 + c_norm);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double mu = inner(x, s) / cone_order;
    if (opt.trace) {
      std::fprintf(stderr, "sdp %3d pobj %+.10e dobj %+.10e relp %.2e reld %.2e gap %.2e mu %.2e\n", iter, pobj, dobj,
                   relp, reld, gap, mu);
    }

    if (relp < opt.tolerance && reld < opt.tolerance && gap < opt.tolerance) {
      record(Status::optimal, iter);
      return sol;
    }
    // A diverging dual objective with a small dual residual certifies primal infeasibility.
    if (dobj > 1e8 * (1.0 + std::abs(pobj)) && reld < 1e-6) {
      record(Status::primal_infeasible, iter);
      return sol;
    }
    const double merit = std::max({relp, reld, gap});
    if (merit < best_merit) {
      if (merit < 0.5 * best_merit) stall = 0;
      best_merit = merit;
      best_x = x;
      best_s = s;
      best_y = y;
    }
    if (++stall > 12) break;

    std::vector<MatrixXcd> sinv(nb), rd_m = unstack(p, rd);
    MatrixXd schur = MatrixXd::Zero(m, m);
    for (int k = 0; k < nb; ++k) {
      sinv[k] = inverse_pd(s[k]);
      const MatrixXd op = hkm_operator(x[k], sinv[k]);
      const MatrixXd ak_op = a_blocks[k] * op;
      schur.noalias() += ak_op * a_blocks[k].transpose();
    }
    schur = 0.5 * (schur + schur.transpose());
    Eigen::LLT<MatrixXd> chol(schur);
    if (chol.info() != Eigen::Success) {
      const double reg = 1e-12 * std::max(1.0, schur.diagonal().maxCoeff());
      chol.compute(schur + reg * MatrixXd::Identity(m, m));
      if (chol.info() != Eigen::Success) break;
    }

    // Direction for a given complementarity target rc (per block).
    auto direction = [&](const std::vector<MatrixXcd>& rc, std::vector<MatrixXcd>& dx, std::vector<MatrixXcd>& ds,
                         VectorXd& dy) {
      std::vector<MatrixXcd> tmp(nb);
      for (int k = 0; k < nb; ++k) tmp[k] = rc[k] - hermitian_part(x[k] * rd_m[k] * sinv[k]);
      const VectorXd rhs_p = rp - a * stack(p, tmp);
      dy = chol.solve(rhs_p);
      // Refinement: the primal part of the step must reproduce rp closely,
      // which plain Cholesky does not guarantee once X is nearly singular.
      for (int round = 0; round < 2; ++round) {
        VectorXd adx = VectorXd::Zero(m);
        const std::vector<MatrixXcd> aty = unstack(p, a.transpose() * dy);
        for (int k = 0; k < nb; ++k) {
          adx += a_blocks[k] * svec(hermitian_part(x[k] * aty[k] * sinv[k]));
        }
        const VectorXd r = rhs_p - adx;
        if (r.norm() <= 1e-15 * (1.0 + rhs_p.norm())) break;
        dy += chol.solve(r);
      }
      const std::vector<MatrixXcd> aty = unstack(p, a.transpose() * dy);
      for (int k = 0; k < nb; ++k) {
        ds[k] = rd_m[k] - aty[k];
        dx[k] = hermitian_part(rc[k] - x[k] * ds[k] * sinv[k]);
      }
    };
    auto steps = [&](const std::vector<MatrixXcd>& dx, const std::vector<MatrixXcd>& ds, double& ap, double& ad) {
      ap = std::numeric_limits<double>::infinity();
      ad = ap;
      for (int k = 0; k < nb; ++k) {
        ap = std::min(ap, max_step(x[k], dx[k]));
        ad = std::min(ad, max_step(s[k], ds[k]));
      }
    };

    std::vector<MatrixXcd> rc(nb), dx(nb), ds(nb);
    VectorXd dy;
    for (int k = 0; k < nb; ++k) rc[k] = -x[k];
    direction(rc, dx, ds, dy);
    double ap, ad;
    steps(dx, ds, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double mu_aff = 0.0;
    for (int k = 0; k < nb; ++k) {
      mu_aff += ((x[k] + ap * dx[k]).adjoint() * (s[k] + ad * ds[k])).trace().real();
    }
    mu_aff /= cone_order;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    for (int k = 0; k < nb; ++k) {
      rc[k] = sigma * mu * sinv[k] - x[k] - hermitian_part(dx[k] * ds[k] * sinv[k]);
    }
    direction(rc, dx, ds, dy);
    steps(dx, ds, ap, ad);
    const double gamma = std::max(0.9, std::min(0.98, 1.0 - 10.0 * mu));
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    if (opt.trace) std::fprintf(stderr, "    sigma %.2e alpha_p %.3e alpha_d %.3e\n", sigma, ap, ad);
    if (ap < 1e-10 && ad < 1e-10) break;
    for (int k = 0; k < nb; ++k) {
      x[k] = hermitian_part(x[k] + ap * dx[k]);
      s[k] = hermitian_part(s[k] + ad * ds[k]);
    }
    y += ad * dy;
    sol.iterations = iter + 1;
  }

  x = best_x;
  s = best_s;
  y = best_y;
  const VectorXd xv = stack(p, x);
  const VectorXd sv = stack(p, s);
  const double relp = (b - a * xv).norm() / (1.0 + b_norm);
  const double reld = (c - sv - a.transpose() * y).norm() / (1.0 + c_norm);
  const double pobj = c.dot(xv);
  const double dobj = b.dot(y);
  const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
  const double loose = std::sqrt(opt.tolerance) * 10.0;
  record((relp < loose && reld < loose && gap < loose) ? Status::near_optimal : Status::failed, sol.iterations);
  return sol;
}

}  // namespace lsa::sdp
