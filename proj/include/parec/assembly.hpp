#pragma once

#include <functional>

#include <Eigen/Core>

#include "parec/grid.hpp"
#include "parec/basis.hpp"
#include "parec/lsq.hpp"

namespace parec {

/// Parameters of the Carleman weight W(x) = exp(lambda * (r(x)/b)^beta) with
/// r(x) = |x - x0|. x0 must lie outside the closed domain and b above
/// max r on it.
struct CarlemanParams {
  double lambda = 40.0;
  double beta = 10.0;
  double scale = 5.0;                  // b
  Eigen::Vector2d anchor{0.0, 1.5};    // x0
};

double carleman_weight(double x, double y, const CarlemanParams& params);

/// Rejects an anchor inside the closed domain or a scale not exceeding
/// max r; warns (once, stderr) when min r <= 1, which the weight tolerates
/// even though the underlying estimate asks for more.
void validate_carleman(const CarlemanParams& params, const SpatialGrid& grid);

struct BlockRange {
  int begin = 0;
  int end = 0;
  int size() const { return end - begin; }
};

/// The stacked least-squares system. Row blocks, in order: Carleman-weighted
/// PDE rows over interior (i, j, m); Dirichlet rows and Neumann rows over
/// boundary nodes x modes, both scaled by the soft-constraint weight omega.
/// `rhs` carries the boundary data; the PDE-block segment is zero and is
/// replaced by the (negated) nonlinear load each iteration.
struct EllipticSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  BlockRange pde, dirichlet, neumann;
  Eigen::VectorXd pde_weights;  // W at the interior node of each PDE row
  double omega = 0.0;
  double max_pde_row_norm = 0.0;
  int nodes_per_axis = 0;
  int n_modes = 0;

  int unknowns() const { return nodes_per_axis * nodes_per_axis * n_modes; }
};

/// Build the stacked system. `coefficient` is c sampled on the grid
/// (entry (i-1, j-1)); `s` the N x N stiffness matrix; `dirichlet_modes` /
/// `neumann_modes` are (boundary-node x mode) data aligned with
/// boundary_nodes(grid). omega must be positive.
EllipticSystem assemble(const SpatialGrid& grid,
                        const Eigen::Ref<const Eigen::MatrixXd>& coefficient,
                        const Eigen::Ref<const Eigen::MatrixXd>& s,
                        const CarlemanParams& params, double omega,
                        const Eigen::Ref<const Eigen::MatrixXd>& dirichlet_modes,
                        const Eigen::Ref<const Eigen::MatrixXd>& neumann_modes);

/// Default soft-constraint weight: 1000 x the largest 2-norm over PDE rows.
double default_constraint_weight(const SpatialGrid& grid,
                                 const Eigen::Ref<const Eigen::MatrixXd>& coefficient,
                                 const Eigen::Ref<const Eigen::MatrixXd>& s,
                                 const CarlemanParams& params);

/// Saturation clamp at +/- bound * sqrt(T); identity inside.
double cutoff(double value, double bound, double horizon);

/// Spectral load q_m at every interior node: clamp the node's coefficients,
/// synthesize the time series, apply q pointwise, project back, and scale by
/// the node's Carleman weight. The result is aligned with the PDE block rows
/// (negate it to obtain that block's right-hand side). Throws on non-finite
/// q values, naming the node.
Eigen::VectorXd nonlinear_load(const SpatialGrid& grid, const TimeBasis& basis,
                               const CarlemanParams& params,
                               const std::function<double(double)>& q, double bound,
                               const Eigen::Ref<const Eigen::VectorXd>& coeffs, int jobs = 1);

}  // namespace parec
