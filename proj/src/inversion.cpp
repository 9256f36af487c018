#include "parec/inversion.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "parec/artifacts.hpp"
#include "parec/parallel.hpp"

namespace parec {

Eigen::MatrixXd reconstruct_initial(const SpatialGrid& grid, const TimeBasis& basis,
                                    const Eigen::Ref<const Eigen::VectorXd>& coeffs) {
  const int nx = grid.nodes_per_axis;
  const int n_modes = basis.n_modes;
  if (coeffs.size() != nx * nx * n_modes) {
    throw std::invalid_argument("reconstruct_initial: coefficient vector has wrong length");
  }
  // The lined-up vector is (node-major, mode-fastest): one GEMV per node
  // column gives p = U^T Psi(0) with U reshaped (modes x nodes).
  Eigen::Map<const Eigen::MatrixXd> by_node(coeffs.data(), n_modes, nx * nx);
  Eigen::VectorXd p_flat = by_node.transpose() * basis.at_zero;
  Eigen::MatrixXd p(nx, nx);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nx; ++j) p(i, j) = p_flat[i * nx + j];
  }
  return p;
}

LsqSolution initial_solve(const EllipticSystem& system, double tol, int max_iterations,
                          int jobs) {
  return lsq_solve(system.matrix, system.rhs, tol, max_iterations, jobs);
}

LsqSolution iterate(const EllipticSystem& system, const SpatialGrid& grid,
                    const TimeBasis& basis, const CarlemanParams& params,
                    const std::function<double(double)>& q, double cutoff_bound,
                    const Eigen::Ref<const Eigen::VectorXd>& u_prev, double tol,
                    int max_iterations, int jobs) {
  Eigen::VectorXd rhs = system.rhs;
  const Eigen::VectorXd load =
      nonlinear_load(grid, basis, params, q, cutoff_bound, u_prev, jobs);
  rhs.segment(system.pde.begin, system.pde.size()) = -load;

  // Correction solve: min ||A d - (b - A u_prev)||, u = u_prev + d. Same
  // minimizer as the plain solve, and the zero-load fixed point costs zero
  // iterations.
  const Eigen::VectorXd residual = rhs - spmv(system.matrix, u_prev, jobs);
  LsqSolution sol = lsq_solve(system.matrix, residual, tol, max_iterations, jobs);
  sol.x += u_prev;
  if (!sol.x.allFinite()) {
    throw SolverError("iterate: non-finite iterate");
  }
  // Residual relative to the full right-hand side, recomputed from scratch.
  const Eigen::VectorXd full_res = rhs - spmv(system.matrix, sol.x, jobs);
  const double denom = spmv_transpose(system.matrix, rhs).norm();
  const double numer = spmv_transpose(system.matrix, full_res).norm();
  sol.relative_residual = denom > 0.0 ? numer / denom : numer;
  return sol;
}

void refresh_boundary_rhs(EllipticSystem& system,
                          const Eigen::Ref<const Eigen::MatrixXd>& dirichlet_modes,
                          const Eigen::Ref<const Eigen::MatrixXd>& neumann_modes) {
  const int n_modes = system.n_modes;
  const int n_bound = system.dirichlet.size() / n_modes;
  if (dirichlet_modes.rows() != n_bound || dirichlet_modes.cols() != n_modes ||
      neumann_modes.rows() != n_bound || neumann_modes.cols() != n_modes) {
    throw std::invalid_argument("refresh_boundary_rhs: data shape mismatch");
  }
  for (int b = 0; b < n_bound; ++b) {
    for (int m = 0; m < n_modes; ++m) {
      system.rhs[system.dirichlet.begin + b * n_modes + m] =
          system.omega * dirichlet_modes(b, m);
      system.rhs[system.neumann.begin + b * n_modes + m] = system.omega * neumann_modes(b, m);
    }
  }
}

ReconstructionResult run_reconstruction(const EllipticSystem& system, const SpatialGrid& grid,
                                        const TimeBasis& basis, const CarlemanParams& params,
                                        const Scenario& scenario, double cutoff_bound,
                                        int iterations, double tol, int max_iterations,
                                        bool early_stop, int jobs) {
  ReconstructionResult result;
  result.scenario_name = scenario.name;
  result.omega = system.omega;
  result.cutoff_bound = cutoff_bound;

  LsqSolution sol = initial_solve(system, tol, max_iterations, jobs);
  IterationState state;
  state.k = 0;
  state.coefficients = sol.x;
  state.reconstruction = reconstruct_initial(grid, basis, sol.x);
  state.solver_iterations = sol.iterations;
  state.solver_residual = sol.relative_residual;
  state.solver_converged = sol.converged;
  result.iterations.push_back(std::move(state));

  const bool zero_q = scenario.q_kind == QKind::Zero;
  double p1_norm = 0.0;
  for (int k = 1; k <= iterations; ++k) {
    const Eigen::VectorXd& u_prev = result.iterations.back().coefficients;
    LsqSolution next;
    if (zero_q) {
      // Zero load: the previous iterate already minimizes the functional.
      next.x = u_prev;
      next.iterations = 0;
      next.relative_residual = result.iterations.back().solver_residual;
      next.converged = true;
    } else {
      next = iterate(system, grid, basis, params, scenario.nonlinearity, cutoff_bound, u_prev,
                     tol, max_iterations, jobs);
    }
    IterationState st;
    st.k = k;
    st.coefficients = next.x;
    st.reconstruction = reconstruct_initial(grid, basis, next.x);
    st.recursive_error =
        (st.reconstruction - result.iterations.back().reconstruction).array().abs().maxCoeff();
    if (!std::isfinite(st.recursive_error)) {
      throw SolverError("run_reconstruction: non-finite recursive error at k = " +
                        std::to_string(k));
    }
    st.solver_iterations = next.iterations;
    st.solver_residual = next.relative_residual;
    st.solver_converged = next.converged;
    result.iterations.push_back(std::move(st));
    if (k == 1) p1_norm = result.iterations[1].reconstruction.array().abs().maxCoeff();
    if (early_stop && result.iterations.back().recursive_error < 1e-6 * p1_norm) break;
  }

  std::vector<double> recursive;
  for (size_t k = 1; k < result.iterations.size(); ++k) {
    recursive.push_back(result.iterations[k].recursive_error);
  }
  result.p_true_known = scenario.initial_known && bool(scenario.initial);
  if (result.p_true_known) {
    result.p_true_field = sample_field(scenario.initial, grid);
  } else {
    result.p_true_field = Eigen::MatrixXd::Zero(grid.nodes_per_axis, grid.nodes_per_axis);
  }
  result.metrics = compute_metrics(grid, params, scenario,
                                   result.iterations.back().reconstruction,
                                   result.p_true_field, recursive);
  return result;
}

ReconstructionResult run(const RunConfig& cfg) {
  const int jobs = worker_count(cfg.jobs);
  const Scenario scenario = resolve_scenario(cfg);
  const SpatialGrid grid = make_grid(cfg.half_width, cfg.nx);
  const TimeBasis basis = build_basis(cfg.horizon, cfg.modes, cfg.quad_nodes);
  const Eigen::MatrixXd s = stiffness(basis);
  const ForwardResolution resolution = forward_resolution(cfg);

  const ForwardRecord fwd = solve_forward(scenario, grid, basis, resolution, cfg.safety, jobs);
  const CauchyRecord clean = extract_cauchy(fwd, basis);
  const CauchyRecord data = add_noise(clean, scenario.noise, cfg.seed);

  const Eigen::MatrixXd c_field = sample_field(scenario.coefficient, grid);
  CarlemanParams params;
  params.lambda = cfg.lambda;
  params.beta = cfg.beta;
  params.scale = cfg.weight_scale;
  params.anchor = {cfg.x0_x, cfg.x0_y};

  const double omega = cfg.omega > 0.0
                           ? cfg.omega
                           : default_constraint_weight(grid, c_field, s, params);
  EllipticSystem system =
      assemble(grid, c_field, s, params, omega, data.dirichlet_modes, data.neumann_modes);

  if (cfg.dump_cauchy || cfg.dump_system) {
    std::filesystem::create_directories(cfg.out_dir);
    if (cfg.dump_cauchy) {
      write_cauchy_csv(cfg.out_dir + "/cauchy.csv", grid, basis, data);
    }
    if (cfg.dump_system) {
      std::ofstream out(cfg.out_dir + "/system_triplets.txt");
      write_triplets(out, system.matrix);
    }
  }

  const double cutoff_bound = std::max(10.0 * fwd.field_bound, 1.0);
  ReconstructionResult result =
      run_reconstruction(system, grid, basis, params, scenario, cutoff_bound, cfg.iterations,
                         cfg.solver_tol, cfg.solver_maxit, cfg.early_stop, jobs);
  result.outer_half_width_actual = fwd.outer_half_width;
  result.outer_nodes = fwd.outer_nodes;
  result.omega = omega;
  return result;
}

RunMetrics compute_metrics(const SpatialGrid& grid, const CarlemanParams& params,
                           const Scenario& scenario, const Eigen::MatrixXd& reconstruction,
                           const Eigen::MatrixXd& p_true,
                           const std::vector<double>& recursive_errors) {
  RunMetrics metrics;
  metrics.recursive_errors = recursive_errors;
  const int nx = grid.nodes_per_axis;

  for (const auto& inc : scenario.inclusions) {
    InclusionMetric im;
    im.label = inc.label;
    im.true_max = inc.true_max;
    double best = -std::numeric_limits<double>::max();
    bool any = false;
    for (int i = 1; i <= nx; ++i) {
      for (int j = 1; j <= nx; ++j) {
        if (inc.contains(grid.x(i), grid.y(j))) {
          best = std::max(best, reconstruction(i - 1, j - 1));
          any = true;
        }
      }
    }
    im.reconstructed_max = any ? best : 0.0;
    im.relative_error =
        im.true_max != 0.0 ? std::abs(im.reconstructed_max - im.true_max) / std::abs(im.true_max)
                           : std::abs(im.reconstructed_max);
    metrics.inclusions.push_back(std::move(im));
  }

  int arg_i = 1, arg_j = 1;
  double arg_v = reconstruction(0, 0);
  for (int i = 1; i <= nx; ++i) {
    for (int j = 1; j <= nx; ++j) {
      if (reconstruction(i - 1, j - 1) > arg_v) {
        arg_v = reconstruction(i - 1, j - 1);
        arg_i = i;
        arg_j = j;
      }
    }
  }
  metrics.argmax_x = grid.x(arg_i);
  metrics.argmax_y = grid.y(arg_j);
  metrics.argmax_value = arg_v;
  metrics.argmax_inside_support = false;
  for (const auto& inc : scenario.inclusions) {
    if (inc.contains(metrics.argmax_x, metrics.argmax_y)) {
      metrics.argmax_inside_support = true;
      break;
    }
  }

  double num_w = 0.0, den_w = 0.0, num = 0.0, den = 0.0;
  for (int i = 1; i <= nx; ++i) {
    for (int j = 1; j <= nx; ++j) {
      const double w = carleman_weight(grid.x(i), grid.y(j), params);
      const double diff = reconstruction(i - 1, j - 1) - p_true(i - 1, j - 1);
      num_w += w * w * diff * diff;
      den_w += w * w * p_true(i - 1, j - 1) * p_true(i - 1, j - 1);
      num += diff * diff;
      den += p_true(i - 1, j - 1) * p_true(i - 1, j - 1);
    }
  }
  const double h2 = grid.step * grid.step;
  if (den > 0.0) {
    metrics.weighted_l2_error = std::sqrt(num_w / den_w);
    metrics.l2_error = std::sqrt(num / den);
    metrics.errors_relative = true;
  } else {
    metrics.weighted_l2_error = std::sqrt(h2 * num_w);
    metrics.l2_error = std::sqrt(h2 * num);
    metrics.errors_relative = false;
  }
  return metrics;
}

double weighted_coefficient_distance(const SpatialGrid& grid, const CarlemanParams& params,
                                     const Eigen::Ref<const Eigen::VectorXd>& a,
                                     const Eigen::Ref<const Eigen::VectorXd>& b) {
  const int nx = grid.nodes_per_axis;
  const int n_modes = int(a.size()) / (nx * nx);
  if (a.size() != b.size() || a.size() != nx * nx * n_modes) {
    throw std::invalid_argument("weighted_coefficient_distance: length mismatch");
  }
  double acc = 0.0;
  for (int i = 1; i <= nx; ++i) {
    for (int j = 1; j <= nx; ++j) {
      const double w = carleman_weight(grid.x(i), grid.y(j), params);
      const int base = ((i - 1) * nx + (j - 1)) * n_modes;
      double node = 0.0;
      for (int m = 0; m < n_modes; ++m) {
        const double d = a[base + m] - b[base + m];
        node += d * d;
      }
      acc += w * w * node;
    }
  }
  return std::sqrt(grid.step * grid.step * acc);
}

}  // namespace parec
