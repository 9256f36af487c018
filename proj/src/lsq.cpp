#include "parec/lsq.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "parec/errors.hpp"
#include "parec/parallel.hpp"

namespace parec {

namespace {

void csr_apply(const SparseMatrix& matrix, const double* x, double* y, int jobs) {
  const int* outer = matrix.outerIndexPtr();
  const int* inner = matrix.innerIndexPtr();
  const double* vals = matrix.valuePtr();
  parallel_for(0, int(matrix.rows()), jobs, [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      double acc = 0.0;
      for (int k = outer[r]; k < outer[r + 1]; ++k) acc += vals[k] * x[inner[k]];
      y[r] = acc;
    }
  });
}

}  // namespace

Eigen::VectorXd spmv(const SparseMatrix& matrix, const Eigen::Ref<const Eigen::VectorXd>& x,
                     int jobs) {
  if (x.size() != matrix.cols()) {
    throw std::invalid_argument("spmv: vector length " + std::to_string(x.size()) +
                                " does not match " + std::to_string(matrix.cols()) + " columns");
  }
  Eigen::VectorXd y(matrix.rows());
  csr_apply(matrix, x.data(), y.data(), jobs);
  return y;
}

Eigen::VectorXd spmv_transpose(const SparseMatrix& matrix,
                               const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != matrix.rows()) {
    throw std::invalid_argument("spmv_transpose: vector length " + std::to_string(x.size()) +
                                " does not match " + std::to_string(matrix.rows()) + " rows");
  }
  return matrix.transpose() * x;
}

LsqSolution lsq_solve(const SparseMatrix& matrix, const Eigen::Ref<const Eigen::VectorXd>& rhs,
                      double tol, int max_iterations, int jobs) {
  if (rhs.size() != matrix.rows()) {
    throw std::invalid_argument("lsq_solve: rhs length does not match matrix rows");
  }
  if (!(tol >= 0.0) || max_iterations < 0) {
    throw std::invalid_argument("lsq_solve: bad tolerance or iteration cap");
  }
  const int n = int(matrix.cols());

  // Column 2-norms as diagonal preconditioner. A zero column means that
  // unknown is absent from every equation; it is diagnosed by leaving its
  // scale at 1 so the iteration keeps it at zero.
  Eigen::VectorXd scale = Eigen::VectorXd::Zero(n);
  {
    const int* inner = matrix.innerIndexPtr();
    const double* vals = matrix.valuePtr();
    for (int k = 0; k < int(matrix.nonZeros()); ++k) scale[inner[k]] += vals[k] * vals[k];
    for (int j = 0; j < n; ++j) scale[j] = scale[j] > 0.0 ? std::sqrt(scale[j]) : 1.0;
  }

  // Explicit transpose so both products stream row-compressed data.
  SparseMatrix transposed = matrix.transpose();

  LsqSolution sol;
  sol.x = Eigen::VectorXd::Zero(n);

  Eigen::VectorXd residual = rhs;                       // b - A x, x = 0
  Eigen::VectorXd grad_raw(n);                          // A^T residual
  csr_apply(transposed, residual.data(), grad_raw.data(), jobs);
  const double grad_norm0 = grad_raw.norm();
  sol.residual_history.push_back(grad_norm0);
  if (grad_norm0 == 0.0) {
    sol.converged = true;
    return sol;
  }

  Eigen::VectorXd grad = grad_raw.cwiseQuotient(scale);  // scaled-space gradient
  Eigen::VectorXd direction = grad;
  Eigen::VectorXd x_scaled = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd ad(matrix.rows());
  Eigen::VectorXd unscaled(n);
  double gamma = grad.squaredNorm();

  const double target = tol * grad_norm0;
  int it = 0;
  while (it < max_iterations) {
    unscaled = direction.cwiseQuotient(scale);
    csr_apply(matrix, unscaled.data(), ad.data(), jobs);
    const double ad_sq = ad.squaredNorm();
    if (ad_sq == 0.0) break;  // direction in the numerical null space
    const double alpha = gamma / ad_sq;
    if (!std::isfinite(alpha)) {
      throw SolverError("lsq_solve: non-finite step size at iteration " + std::to_string(it));
    }
    x_scaled += alpha * direction;
    residual -= alpha * ad;
    csr_apply(transposed, residual.data(), grad_raw.data(), jobs);
    grad = grad_raw.cwiseQuotient(scale);
    const double gamma_next = grad.squaredNorm();
    if (!std::isfinite(gamma_next)) {
      throw SolverError("lsq_solve: non-finite gradient at iteration " + std::to_string(it));
    }
    ++it;
    sol.residual_history.push_back(grad_raw.norm());
    if (grad_raw.norm() <= target) {
      sol.converged = true;
      break;
    }
    direction = grad + (gamma_next / gamma) * direction;
    gamma = gamma_next;
  }

  sol.iterations = it;
  sol.x = x_scaled.cwiseQuotient(scale);

  // Report the residual recomputed from the returned iterate, not the
  // recurrence value.
  Eigen::VectorXd final_res(matrix.rows());
  csr_apply(matrix, sol.x.data(), final_res.data(), jobs);
  final_res = rhs - final_res;
  csr_apply(transposed, final_res.data(), grad_raw.data(), jobs);
  sol.relative_residual = grad_raw.norm() / grad_norm0;
  if (!sol.converged) sol.converged = sol.relative_residual <= tol;
  return sol;
}

void write_triplets(std::ostream& out, const SparseMatrix& matrix) {
  char line[80];
  for (int r = 0; r < int(matrix.outerSize()); ++r) {
    for (SparseMatrix::InnerIterator it(matrix, r); it; ++it) {
      std::snprintf(line, sizeof line, "%d %d %.17g\n", r + 1, int(it.col()) + 1, it.value());
      out << line;
    }
  }
}

SparseMatrix read_triplets(std::istream& in, int rows, int cols) {
  std::vector<Eigen::Triplet<double>> entries;
  int r = 0, c = 0;
  double v = 0.0;
  while (in >> r >> c >> v) {
    if (r < 1 || r > rows || c < 1 || c > cols) {
      throw std::invalid_argument("read_triplets: index (" + std::to_string(r) + ", " +
                                  std::to_string(c) + ") out of bounds");
    }
    entries.emplace_back(r - 1, c - 1, v);
  }
  SparseMatrix matrix(rows, cols);
  matrix.setFromTriplets(entries.begin(), entries.end());
  matrix.makeCompressed();
  return matrix;
}

}  // namespace parec
