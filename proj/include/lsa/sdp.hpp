#pragma once
// Small dense semidefinite programs over block-diagonal complex Hermitian
// variables, solved with a primal-dual interior-point method (HKM search
// direction, Mehrotra predictor-corrector, infeasible start).
//
//   minimize   <c, x>
//   subject to A x = b,  every block mat(x_k) is PSD
//
// x stacks the real coordinates of each block: diagonal entries, then
// sqrt2*Re and sqrt2*Im of each strictly upper entry, so the Euclidean
// product of coordinate vectors equals Re tr(XY).

#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace lsa::sdp {

int coord_count(int dim);
Eigen::VectorXd svec(const Eigen::MatrixXcd& h);
Eigen::MatrixXcd smat(const Eigen::Ref<const Eigen::VectorXd>& v, int dim);
Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& m);

struct Problem {
  std::vector<int> block_dims;
  Eigen::MatrixXd a;   // rows are constraints, columns are stacked coordinates
  Eigen::VectorXd b;
  Eigen::VectorXd c;

  int total_coords() const;
  int offset(int block) const;
  void check() const;
};

struct Options {
  double tolerance = 1e-8;
  int max_iterations = 120;
  bool trace = false;  // per-iteration residuals on stderr
};

enum class Status { optimal, near_optimal, primal_infeasible, failed };
std::string_view to_string(Status s);

struct Solution {
  Status status = Status::failed;
  std::vector<Eigen::MatrixXcd> x;
  std::vector<Eigen::MatrixXcd> s;
  Eigen::VectorXd y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;  // ||b - Ax|| / (1 + ||b||)
  double dual_residual = 0.0;    // ||c - s - A^T y|| / (1 + ||c||)
  double gap = 0.0;              // |<c,x> - b^T y| / (1 + |<c,x>| + |b^T y|)
  int iterations = 0;
};

Solution solve(const Problem& problem, const Options& options = {});

}  // namespace lsa::sdp
