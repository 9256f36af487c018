#include "parec/basis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace parec {

double TimeBasis::inner(const Eigen::Ref<const Eigen::VectorXd>& a,
                        const Eigen::Ref<const Eigen::VectorXd>& b) const {
  return (weights.array() * a.array() * b.array()).sum();
}

TimeBasis build_basis(double horizon, int n_modes, int n_quad) {
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("build_basis: horizon must be positive");
  }
  if (n_modes < 1 || n_modes > 40) {
    throw std::invalid_argument("build_basis: mode count must be in [1, 40], got " +
                                std::to_string(n_modes));
  }
  if (n_quad % 2 == 0 || n_quad < 4 * n_modes + 1) {
    throw std::invalid_argument("build_basis: quadrature node count must be odd and >= 4N + 1");
  }

  TimeBasis basis;
  basis.horizon = horizon;
  basis.n_modes = n_modes;
  basis.nodes = Eigen::VectorXd::LinSpaced(n_quad, 0.0, horizon);

  const double dt = horizon / (n_quad - 1);
  basis.weights.resize(n_quad);
  basis.weights[0] = dt / 3.0;
  basis.weights[n_quad - 1] = dt / 3.0;
  for (int q = 1; q < n_quad - 1; ++q) {
    basis.weights[q] = (q % 2 == 1) ? 4.0 * dt / 3.0 : 2.0 * dt / 3.0;
  }

  // Seed functions phi_n and their derivatives phi_n' = phi_n + (n-1) phi_{n-1}.
  Eigen::MatrixXd phi(n_quad, n_modes);
  Eigen::MatrixXd dphi(n_quad, n_modes);
  const Eigen::ArrayXd shifted = basis.nodes.array() - horizon / 2.0;
  const Eigen::ArrayXd expo = shifted.exp();
  Eigen::ArrayXd power = Eigen::ArrayXd::Ones(n_quad);
  for (int n = 0; n < n_modes; ++n) {
    phi.col(n) = power * expo;
    dphi.col(n) = phi.col(n);
    if (n >= 1) dphi.col(n) += double(n) * phi.col(n - 1);
    power *= shifted;
  }

  // Modified Gram-Schmidt with one re-orthogonalization pass; the monomial-
  // times-exponential family is badly conditioned near N = 35 and a single
  // pass is not enough for 1e-10 orthogonality. Derivative samples receive
  // the same linear combination as the values.
  basis.values = phi;
  basis.derivatives = dphi;
  const auto w = basis.weights.array();
  for (int n = 0; n < n_modes; ++n) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < n; ++j) {
        const double r = (w * basis.values.col(n).array() * basis.values.col(j).array()).sum();
        basis.values.col(n) -= r * basis.values.col(j);
        basis.derivatives.col(n) -= r * basis.derivatives.col(j);
      }
    }
    const double norm =
        std::sqrt((w * basis.values.col(n).array().square()).sum());
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw std::runtime_error("build_basis: Gram-Schmidt breakdown at mode " +
                               std::to_string(n + 1));
    }
    basis.values.col(n) /= norm;
    basis.derivatives.col(n) /= norm;
  }

  // Audit the quadrature Gram matrix before handing the basis out.
  for (int m = 0; m < n_modes; ++m) {
    for (int n = 0; n <= m; ++n) {
      const double g = (w * basis.values.col(m).array() * basis.values.col(n).array()).sum();
      const double dev = std::abs(g - (m == n ? 1.0 : 0.0));
      if (dev > 1e-8) {
        throw std::runtime_error("build_basis: orthogonality loss " + std::to_string(dev) +
                                 " at pair (" + std::to_string(m + 1) + ", " +
                                 std::to_string(n + 1) + ")");
      }
    }
  }

  basis.at_zero = basis.values.row(0).transpose();
  basis.at_horizon = basis.values.row(n_quad - 1).transpose();
  return basis;
}

Eigen::MatrixXd stiffness(const TimeBasis& basis) {
  // s_{mn} = <Psi_n', Psi_m>: derivative on the column index.
  return basis.values.transpose() * basis.weights.asDiagonal() * basis.derivatives;
}

Eigen::VectorXd project(const TimeBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& series) {
  if (series.size() != basis.nodes.size()) {
    throw std::invalid_argument("project: series length " + std::to_string(series.size()) +
                                " does not match quadrature grid " +
                                std::to_string(basis.nodes.size()));
  }
  return basis.values.transpose() * (basis.weights.array() * series.array()).matrix();
}

Eigen::VectorXd synthesize(const TimeBasis& basis,
                           const Eigen::Ref<const Eigen::VectorXd>& coeffs) {
  if (coeffs.size() != basis.n_modes) {
    throw std::invalid_argument("synthesize: expected " + std::to_string(basis.n_modes) +
                                " coefficients, got " + std::to_string(coeffs.size()));
  }
  return basis.values * coeffs;
}

std::vector<double> truncation_diagnostic(const TimeBasis& basis,
                                          const Eigen::Ref<const Eigen::MatrixXd>& series,
                                          const std::vector<int>& n_list) {
  if (series.rows() != basis.nodes.size()) {
    throw std::invalid_argument("truncation_diagnostic: series rows must match quadrature grid");
  }
  // Project every column once at full order, then truncate.
  Eigen::MatrixXd coeffs =
      basis.values.transpose() * basis.weights.asDiagonal() * series;  // (N, n_nodes)
  std::vector<double> errors;
  errors.reserve(n_list.size());
  for (int n_keep : n_list) {
    if (n_keep < 0 || n_keep > basis.n_modes) {
      throw std::invalid_argument("truncation_diagnostic: order " + std::to_string(n_keep) +
                                  " outside [0, " + std::to_string(basis.n_modes) + "]");
    }
    const Eigen::MatrixXd partial = basis.values.leftCols(n_keep) * coeffs.topRows(n_keep);
    errors.push_back((series - partial).array().abs().maxCoeff());
  }
  return errors;
}

}  // namespace parec
