#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace parec {

/// Row-compressed storage; column indices are strictly increasing within each
/// row once compressed.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// y = A x. Row-parallel: each output entry is accumulated in a fixed order,
/// so the result is bitwise independent of the thread count.
Eigen::VectorXd spmv(const SparseMatrix& matrix, const Eigen::Ref<const Eigen::VectorXd>& x,
                     int jobs = 1);

/// y = A^T x.
Eigen::VectorXd spmv_transpose(const SparseMatrix& matrix,
                               const Eigen::Ref<const Eigen::VectorXd>& x);

struct LsqSolution {
  Eigen::VectorXd x;
  int iterations = 0;
  /// ||A^T (b - A x)|| / ||A^T b||, recomputed from scratch on the returned x.
  double relative_residual = 0.0;
  bool converged = false;
  /// Normal-equation residual norm per iteration (entry 0 is the initial one).
  std::vector<double> residual_history;
};

/// Least-squares min ||A x - b|| by CGLS on the column-scaled system
/// (conjugate gradients on the normal equations, applied through A and A^T
/// without forming A^T A). Column 2-norms are the diagonal preconditioner.
/// Deterministic: x0 = 0, fixed iteration order. Stops when
/// ||A^T (b - A x)|| <= tol * ||A^T b|| or at maxit (best iterate returned,
/// flagged not converged). Throws SolverError on non-finite values.
LsqSolution lsq_solve(const SparseMatrix& matrix, const Eigen::Ref<const Eigen::VectorXd>& rhs,
                      double tol = 1e-8, int max_iterations = 5000, int jobs = 1);

/// Coordinate-triplet text format: one `row col value` line per nonzero,
/// 1-based indices, 17 significant digits.
void write_triplets(std::ostream& out, const SparseMatrix& matrix);
SparseMatrix read_triplets(std::istream& in, int rows, int cols);

}  // namespace parec
