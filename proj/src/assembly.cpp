#include "parec/assembly.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "parec/parallel.hpp"

namespace parec {

double carleman_weight(double x, double y, const CarlemanParams& params) {
  const double dx = x - params.anchor[0];
  const double dy = y - params.anchor[1];
  const double r = std::sqrt(dx * dx + dy * dy);
  return std::exp(params.lambda * std::pow(r / params.scale, params.beta));
}

void validate_carleman(const CarlemanParams& params, const SpatialGrid& grid) {
  const double R = grid.half_width;
  const double ax = params.anchor[0];
  const double ay = params.anchor[1];
  if (std::max(std::abs(ax), std::abs(ay)) <= R) {
    throw std::invalid_argument("carleman: anchor point lies inside the closed domain");
  }
  double max_r = 0.0, min_r = std::numeric_limits<double>::max();
  for (double cx : {-R, R}) {
    for (double cy : {-R, R}) {
      max_r = std::max(max_r, std::hypot(cx - ax, cy - ay));
    }
  }
  // min r over the square is attained on the boundary; scan its nodes.
  for (const auto& node : boundary_nodes(grid)) {
    min_r = std::min(min_r, std::hypot(grid.x(node.i) - ax, grid.y(node.j) - ay));
  }
  if (!(params.scale > max_r)) {
    throw std::invalid_argument("carleman: scale b must exceed max |x - x0| = " +
                                std::to_string(max_r));
  }
  if (min_r <= 1.0) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true)) {
      std::fprintf(stderr,
                   "parec: warning: min |x - x0| = %.3f <= 1 over the domain; the weight "
                   "is still well defined and this matches the reference configuration\n",
                   min_r);
    }
  }
  if (params.lambda < 0.0 || params.beta <= 0.0) {
    throw std::invalid_argument("carleman: lambda must be >= 0 and beta > 0");
  }
}

EllipticSystem assemble(const SpatialGrid& grid,
                        const Eigen::Ref<const Eigen::MatrixXd>& coefficient,
                        const Eigen::Ref<const Eigen::MatrixXd>& s,
                        const CarlemanParams& params, double omega,
                        const Eigen::Ref<const Eigen::MatrixXd>& dirichlet_modes,
                        const Eigen::Ref<const Eigen::MatrixXd>& neumann_modes) {
  const int nx = grid.nodes_per_axis;
  const int n_modes = int(s.rows());
  if (s.cols() != n_modes) throw std::invalid_argument("assemble: stiffness matrix must be square");
  if (coefficient.rows() != nx || coefficient.cols() != nx) {
    throw std::invalid_argument("assemble: coefficient field does not match the grid");
  }
  if (!(omega > 0.0)) throw std::invalid_argument("assemble: constraint weight must be positive");
  const auto bnodes = boundary_nodes(grid);
  const int n_bound = int(bnodes.size());
  if (dirichlet_modes.rows() != n_bound || dirichlet_modes.cols() != n_modes ||
      neumann_modes.rows() != n_bound || neumann_modes.cols() != n_modes) {
    throw std::invalid_argument("assemble: boundary data must be (boundary nodes) x (modes)");
  }
  validate_carleman(params, grid);

  const int interior = grid.interior_count();
  const int n_pde = interior * n_modes;
  const int n_constraint = n_bound * n_modes;
  const int rows = n_pde + 2 * n_constraint;
  const int cols = nx * nx * n_modes;
  const double h = grid.step;
  const double h2 = h * h;

  auto flat = [&](int i, int j, int m) { return (i - 1) * nx * n_modes + (j - 1) * n_modes + m - 1; };

  EllipticSystem sys;
  sys.nodes_per_axis = nx;
  sys.n_modes = n_modes;
  sys.omega = omega;
  sys.pde = {0, n_pde};
  sys.dirichlet = {n_pde, n_pde + n_constraint};
  sys.neumann = {n_pde + n_constraint, rows};
  sys.rhs = Eigen::VectorXd::Zero(rows);
  sys.pde_weights.resize(n_pde);

  Eigen::VectorXi row_sizes(rows);
  row_sizes.segment(0, n_pde).setConstant(4 + n_modes);
  row_sizes.segment(n_pde, n_constraint).setConstant(1);
  row_sizes.segment(n_pde + n_constraint, n_constraint).setConstant(2);

  SparseMatrix matrix(rows, cols);
  matrix.reserve(row_sizes);

  // PDE block: W * (5-point Laplacian of mode m - c * sum_n s_mn u_n) at each
  // interior node, modes fastest. Columns are inserted in increasing order.
  int row = 0;
  double max_norm_sq = 0.0;
  for (int i = 2; i <= nx - 1; ++i) {
    for (int j = 2; j <= nx - 1; ++j) {
      const double w = carleman_weight(grid.x(i), grid.y(j), params);
      const double wc = w * coefficient(i - 1, j - 1);
      for (int m = 1; m <= n_modes; ++m, ++row) {
        double norm_sq = 4.0 * (w / h2) * (w / h2);
        matrix.insert(row, flat(i - 1, j, m)) = w / h2;
        matrix.insert(row, flat(i, j - 1, m)) = w / h2;
        for (int n = 1; n <= n_modes; ++n) {
          double value = -(wc * s(m - 1, n - 1));
          if (n == m) value = (-4.0 * w / h2) - (wc * s(m - 1, n - 1));
          matrix.insert(row, flat(i, j, n)) = value;
          norm_sq += value * value;
        }
        matrix.insert(row, flat(i, j + 1, m)) = w / h2;
        matrix.insert(row, flat(i + 1, j, m)) = w / h2;
        sys.pde_weights[row] = w;
        max_norm_sq = std::max(max_norm_sq, norm_sq);
      }
    }
  }
  sys.max_pde_row_norm = std::sqrt(max_norm_sq);

  // Dirichlet block: omega * u_m(boundary) = omega * f_m.
  for (int b = 0; b < n_bound; ++b) {
    const auto& node = bnodes[b];
    for (int m = 1; m <= n_modes; ++m, ++row) {
      matrix.insert(row, flat(node.i, node.j, m)) = omega;
      sys.rhs[row] = omega * dirichlet_modes(b, m - 1);
    }
  }

  // Neumann block: omega * (u_m(boundary) - u_m(inward)) / h = omega * g_m,
  // inward neighbor along the node's edge direction.
  for (int b = 0; b < n_bound; ++b) {
    const auto& node = bnodes[b];
    int ii = node.i, jj = node.j;
    switch (node.edge) {
      case Edge::West: ii += 1; break;
      case Edge::East: ii -= 1; break;
      case Edge::South: jj += 1; break;
      case Edge::North: jj -= 1; break;
    }
    for (int m = 1; m <= n_modes; ++m, ++row) {
      const int col_b = flat(node.i, node.j, m);
      const int col_in = flat(ii, jj, m);
      if (col_in < col_b) {
        matrix.insert(row, col_in) = -omega / h;
        matrix.insert(row, col_b) = omega / h;
      } else {
        matrix.insert(row, col_b) = omega / h;
        matrix.insert(row, col_in) = -omega / h;
      }
      sys.rhs[row] = omega * neumann_modes(b, m - 1);
    }
  }

  matrix.makeCompressed();
  sys.matrix = std::move(matrix);
  return sys;
}

double default_constraint_weight(const SpatialGrid& grid,
                                 const Eigen::Ref<const Eigen::MatrixXd>& coefficient,
                                 const Eigen::Ref<const Eigen::MatrixXd>& s,
                                 const CarlemanParams& params) {
  const int nx = grid.nodes_per_axis;
  const int n_modes = int(s.rows());
  const double h2 = grid.step * grid.step;
  double max_norm_sq = 0.0;
  for (int i = 2; i <= nx - 1; ++i) {
    for (int j = 2; j <= nx - 1; ++j) {
      const double w = carleman_weight(grid.x(i), grid.y(j), params);
      const double wc = w * coefficient(i - 1, j - 1);
      for (int m = 1; m <= n_modes; ++m) {
        double norm_sq = 4.0 * (w / h2) * (w / h2);
        for (int n = 1; n <= n_modes; ++n) {
          double value = -(wc * s(m - 1, n - 1));
          if (n == m) value = (-4.0 * w / h2) - (wc * s(m - 1, n - 1));
          norm_sq += value * value;
        }
        max_norm_sq = std::max(max_norm_sq, norm_sq);
      }
    }
  }
  return 1000.0 * std::sqrt(max_norm_sq);
}

double cutoff(double value, double bound, double horizon) {
  const double cap = bound * std::sqrt(horizon);
  if (value > cap) return cap;
  if (value < -cap) return -cap;
  return value;
}

Eigen::VectorXd nonlinear_load(const SpatialGrid& grid, const TimeBasis& basis,
                               const CarlemanParams& params,
                               const std::function<double(double)>& q, double bound,
                               const Eigen::Ref<const Eigen::VectorXd>& coeffs, int jobs) {
  const int nx = grid.nodes_per_axis;
  const int n_modes = basis.n_modes;
  if (coeffs.size() != nx * nx * n_modes) {
    throw std::invalid_argument("nonlinear_load: coefficient vector has wrong length");
  }
  if (!(bound > 0.0)) throw std::invalid_argument("nonlinear_load: cutoff bound must be positive");

  const int side = nx - 2;
  const int interior = side * side;
  Eigen::VectorXd load(interior * n_modes);

  std::atomic<int> bad_node{-1};
  const int block = 64;
  const int n_blocks = (interior + block - 1) / block;
  parallel_for(0, n_blocks, jobs, [&](int lo, int hi) {
    Eigen::MatrixXd clamped(n_modes, block);
    for (int bk = lo; bk < hi; ++bk) {
      const int first = bk * block;
      const int count = std::min(block, interior - first);
      for (int c = 0; c < count; ++c) {
        const int node = first + c;
        const int i = node / side + 2;
        const int j = node % side + 2;
        const int base = ((i - 1) * nx + (j - 1)) * n_modes;
        for (int n = 0; n < n_modes; ++n) {
          clamped(n, c) = cutoff(coeffs[base + n], bound, basis.horizon);
        }
      }
      Eigen::MatrixXd series = basis.values * clamped.leftCols(count);
      for (int c = 0; c < count; ++c) {
        for (int qi = 0; qi < series.rows(); ++qi) {
          series(qi, c) = q(series(qi, c));
          if (!std::isfinite(series(qi, c))) {
            bad_node.store(first + c);
            return;
          }
        }
      }
      const Eigen::MatrixXd modes =
          basis.values.transpose() * (basis.weights.asDiagonal() * series);
      for (int c = 0; c < count; ++c) {
        const int node = first + c;
        const int i = node / side + 2;
        const int j = node % side + 2;
        const double w = carleman_weight(grid.x(i), grid.y(j), params);
        load.segment(node * n_modes, n_modes) = w * modes.col(c);
      }
    }
  });

  if (bad_node.load() >= 0) {
    const int node = bad_node.load();
    const int i = node / side + 2;
    const int j = node % side + 2;
    throw std::runtime_error("nonlinear_load: non-finite nonlinearity value at node (" +
                             std::to_string(i) + ", " + std::to_string(j) + ")");
  }
  return load;
}

}  // namespace parec
