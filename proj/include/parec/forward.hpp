#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "parec/basis.hpp"
#include "parec/grid.hpp"
#include "parec/scenario.hpp"

namespace parec {

/// Resolution of the outer box mesh relative to the inner grid. The outer
/// mesh refines the inner one by `refine` (h1 = h / refine) and extends it by
/// `extend_cells` outer cells per side; 0 picks the count closest to the
/// scenario's target outer half-width. Inner nodes are outer nodes by
/// construction, so traces never need spatial interpolation.
struct ForwardResolution {
  int refine = 1;
  int extend_cells = 0;
};

/// Boundary samples of the synthesized solution: the trace at each inner
/// boundary node plus its first and second inward neighbors on the outer mesh
/// (one column per boundary node, one row per quadrature time).
struct ForwardRecord {
  std::vector<BoundaryNode> nodes;
  Eigen::MatrixXd trace, inward1, inward2;  // (N_q, n_boundary)
  double outer_step = 0.0;                  // h1
  double outer_half_width = 0.0;            // actual R1 of the mesh
  int outer_nodes = 0;                      // N1 per axis
  double dt = 0.0;
  int steps = 0;
  Eigen::MatrixXd initial_field;   // p on the inner grid
  Eigen::VectorXd field_max_abs;   // max |u| over the box at each quadrature time
  double field_bound = 0.0;        // max |u| over all time steps
};

/// March the explicit scheme c u_t = lap u + q(u) on the outer box with zero
/// Dirichlet data, recording boundary samples at every quadrature time
/// (linear interpolation between the two bracketing steps). `safety` scales
/// the stability step dt = safety * c_min * h1^2 / 4 and must be in (0, 0.95].
/// Throws BlowupError if |u| exceeds 1e6.
ForwardRecord solve_forward(const Scenario& scenario, const SpatialGrid& grid,
                            const TimeBasis& basis, const ForwardResolution& resolution = {},
                            double safety = 0.9, int jobs = 1);

/// Dirichlet trace f, Neumann trace g (second-order one-sided difference along
/// the outward normal), and their projections onto the time basis.
struct CauchyRecord {
  std::vector<BoundaryNode> nodes;
  Eigen::MatrixXd dirichlet, neumann;              // (N_q, n_boundary) time traces
  Eigen::MatrixXd dirichlet_modes, neumann_modes;  // (n_boundary, N)
};

CauchyRecord extract_cauchy(const ForwardRecord& record, const TimeBasis& basis);

/// Multiplicative noise on the mode coefficients only (the "indirect" data):
/// each coefficient is scaled by 1 + noise * xi with xi uniform on [-1, 1],
/// drawn from a generator seeded with `seed` (f coefficients first, then g,
/// node-major). The raw time traces pass through untouched.
CauchyRecord add_noise(const CauchyRecord& record, double noise, std::uint64_t seed);

}  // namespace parec
