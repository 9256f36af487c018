#pragma once

#include <vector>

#include <Eigen/Core>

namespace parec {

/// Orthonormal time basis of L^2(0, T) built from phi_n(t) = (t - T/2)^(n-1) e^(t - T/2)
/// by modified Gram-Schmidt in the composite-Simpson inner product.
///
/// Values and derivatives are sampled on the quadrature grid; column n-1 of
/// `values` holds Psi_n(t_q). Derivatives are propagated through the exact
/// Gram-Schmidt linear combinations starting from phi_n' = phi_n + (n-1) phi_{n-1},
/// so no finite differencing enters.
struct TimeBasis {
  double horizon = 0.0;  // T
  int n_modes = 0;       // N

  Eigen::VectorXd nodes;        // t_q, uniform, nodes[0] = 0, nodes[N_q-1] = T
  Eigen::VectorXd weights;      // composite Simpson weights
  Eigen::MatrixXd values;       // (N_q, N)
  Eigen::MatrixXd derivatives;  // (N_q, N)
  Eigen::VectorXd at_zero;      // Psi_n(0)
  Eigen::VectorXd at_horizon;   // Psi_n(T)

  int n_quad() const { return static_cast<int>(nodes.size()); }

  /// Quadrature inner product of two series sampled on the basis grid.
  double inner(const Eigen::Ref<const Eigen::VectorXd>& a,
               const Eigen::Ref<const Eigen::VectorXd>& b) const;
};

/// Requires T > 0, 1 <= N <= 40, N_q odd and >= 4N + 1. Throws if the built
/// basis loses orthogonality beyond 1e-8 (names the offending pair).
TimeBasis build_basis(double horizon, int n_modes, int n_quad = 4097);

/// s(m-1, n-1) = integral of Psi_n'(t) Psi_m(t) over (0, T), by the basis rule.
Eigen::MatrixXd stiffness(const TimeBasis& basis);

/// Coefficients c_n = integral of series(t) Psi_n(t); series sampled on the
/// quadrature grid.
Eigen::VectorXd project(const TimeBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& series);

/// Series values sum_n coeffs[n-1] Psi_n(t_q) on the quadrature grid.
Eigen::VectorXd synthesize(const TimeBasis& basis,
                           const Eigen::Ref<const Eigen::VectorXd>& coeffs);

/// Max-abs truncation error of partial Fourier sums: for each N' in n_list,
/// the max over columns (nodes) and quadrature times of
/// |series - sum_{n<=N'} c_n Psi_n|. Each column of `series` is one node's
/// time trace.
std::vector<double> truncation_diagnostic(const TimeBasis& basis,
                                          const Eigen::Ref<const Eigen::MatrixXd>& series,
                                          const std::vector<int>& n_list);

}  // namespace parec
