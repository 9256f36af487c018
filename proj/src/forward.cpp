#include "parec/forward.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "parec/errors.hpp"
#include "parec/parallel.hpp"

namespace parec {

namespace {

struct StepResult {
  double max_abs = 0.0;
};

// One explicit step over the interior of the outer box; rows (x index) are
// contiguous, columns are split across workers. Returns the field max for the
// blow-up guard.
template <class QFn>
StepResult explicit_step(const Eigen::MatrixXd& u, Eigen::MatrixXd& next,
                         const Eigen::MatrixXd& dt_over_c, double inv_h2, QFn q, int jobs) {
  const int n = int(u.rows());
  std::vector<double> local_max(size_t(jobs), 0.0);
  std::atomic<int> slot{0};
  parallel_for(1, n - 1, jobs, [&](int j_lo, int j_hi) {
    const int my_slot = slot.fetch_add(1);
    double mx = 0.0;
    for (int j = j_lo; j < j_hi; ++j) {
      const double* col_lo = u.data() + size_t(j - 1) * n;
      const double* col = u.data() + size_t(j) * n;
      const double* col_hi = u.data() + size_t(j + 1) * n;
      const double* dtc = dt_over_c.data() + size_t(j) * n;
      double* out = next.data() + size_t(j) * n;
      for (int i = 1; i < n - 1; ++i) {
        const double center = col[i];
        const double lap = (col[i - 1] + col[i + 1] + col_lo[i] + col_hi[i] - 4.0 * center) * inv_h2;
        const double value = center + dtc[i] * (lap + q(center));
        out[i] = value;
        mx = std::max(mx, std::abs(value));
      }
    }
    local_max[size_t(my_slot)] = std::max(local_max[size_t(my_slot)], mx);
  });
  StepResult r;
  for (double m : local_max) r.max_abs = std::max(r.max_abs, m);
  return r;
}

template <class QFn>
void march(const Scenario& scenario, const SpatialGrid& grid, const TimeBasis& basis,
           ForwardRecord& rec, QFn q, double safety, int jobs,
           const std::vector<int>& sample_index) {
  const int n1 = rec.outer_nodes;
  const double h1 = rec.outer_step;
  const double r1 = rec.outer_half_width;

  Eigen::MatrixXd u(n1, n1), next(n1, n1), dt_over_c(n1, n1);
  double c_min = std::numeric_limits<double>::max();
  for (int j = 0; j < n1; ++j) {
    const double yj = -r1 + j * h1;
    for (int i = 0; i < n1; ++i) {
      const double xi = -r1 + i * h1;
      u(i, j) = scenario.initial(xi, yj);
      const double c = scenario.coefficient(xi, yj);
      if (!(c > 0.0)) {
        throw std::invalid_argument("solve_forward: coefficient must stay positive, got " +
                                    std::to_string(c));
      }
      dt_over_c(i, j) = c;  // holds c for now; scaled once dt is known
      c_min = std::min(c_min, c);
    }
  }

  // Compact support check: p must vanish on and outside the inner boundary.
  const double R = grid.half_width;
  for (int j = 0; j < n1; ++j) {
    const double yj = -r1 + j * h1;
    for (int i = 0; i < n1; ++i) {
      const double xi = -r1 + i * h1;
      if (std::max(std::abs(xi), std::abs(yj)) >= R - 1e-12 && u(i, j) != 0.0) {
        throw std::invalid_argument("solve_forward: initial condition is not supported strictly "
                                    "inside the inner domain");
      }
    }
  }

  const double dt = safety * c_min * h1 * h1 / 4.0;
  const int steps = int(std::ceil(basis.horizon / dt));
  rec.dt = dt;
  rec.steps = steps;
  for (int j = 0; j < n1; ++j) {
    for (int i = 0; i < n1; ++i) dt_over_c(i, j) = dt / dt_over_c(i, j);
  }
  next.setZero();  // outer boundary stays at zero throughout

  // Quadrature times mapped to the step whose interval contains them.
  const int n_quad = basis.n_quad();
  std::vector<int> quad_step(size_t(n_quad));
  std::vector<double> quad_weight(size_t(n_quad));
  for (int qi = 0; qi < n_quad; ++qi) {
    int s = std::min(int(basis.nodes[qi] / dt), steps - 1);
    quad_step[size_t(qi)] = s;
    quad_weight[size_t(qi)] = (basis.nodes[qi] - s * dt) / dt;
  }

  const int n_bound = int(rec.nodes.size());
  auto record_at = [&](int qi, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double w) {
    const double wa = 1.0 - w;
    for (int col = 0; col < n_bound; ++col) {
      const int k0 = sample_index[size_t(3 * col)];
      const int k1 = sample_index[size_t(3 * col + 1)];
      const int k2 = sample_index[size_t(3 * col + 2)];
      rec.trace(qi, col) = wa * a.data()[k0] + w * b.data()[k0];
      rec.inward1(qi, col) = wa * a.data()[k1] + w * b.data()[k1];
      rec.inward2(qi, col) = wa * a.data()[k2] + w * b.data()[k2];
    }
  };

  double initial_max = u.array().abs().maxCoeff();
  rec.field_bound = initial_max;
  int qi = 0;
  double step_max = initial_max;
  for (int s = 0; s < steps; ++s) {
    const StepResult sr = explicit_step(u, next, dt_over_c, 1.0 / (h1 * h1), q, jobs);
    if (sr.max_abs > 1e6) {
      throw BlowupError("solve_forward: field magnitude " + std::to_string(sr.max_abs) +
                        " exceeded 1e6 at t = " + std::to_string((s + 1) * dt));
    }
    while (qi < n_quad && quad_step[size_t(qi)] == s) {
      record_at(qi, u, next, quad_weight[size_t(qi)]);
      rec.field_max_abs[qi] = step_max;  // field max sampled at the bracketing step
      ++qi;
    }
    u.swap(next);
    step_max = sr.max_abs;
    rec.field_bound = std::max(rec.field_bound, sr.max_abs);
  }
  if (qi != n_quad) {
    throw std::logic_error("solve_forward: quadrature times not fully recorded");
  }
}

}  // namespace

ForwardRecord solve_forward(const Scenario& scenario, const SpatialGrid& grid,
                            const TimeBasis& basis, const ForwardResolution& resolution,
                            double safety, int jobs) {
  if (!(safety > 0.0) || safety > 0.95) {
    throw std::invalid_argument("solve_forward: safety factor must be in (0, 0.95]");
  }
  if (resolution.refine < 1) {
    throw std::invalid_argument("solve_forward: refinement must be >= 1");
  }
  if (std::abs(basis.horizon - scenario.horizon) > 1e-12 * std::max(1.0, scenario.horizon)) {
    throw std::invalid_argument("solve_forward: basis horizon does not match the scenario");
  }
  if (!(scenario.outer_half_width > scenario.half_width)) {
    throw std::invalid_argument("solve_forward: outer half-width must exceed the inner one");
  }

  const double h1 = grid.step / resolution.refine;
  int extend = resolution.extend_cells;
  if (extend == 0) {
    extend = int(std::llround((scenario.outer_half_width - grid.half_width) / h1));
  }
  if (extend < 2) {
    throw std::invalid_argument("solve_forward: outer box must extend at least 2 cells beyond "
                                "the inner domain");
  }

  ForwardRecord rec;
  rec.nodes = boundary_nodes(grid);
  rec.outer_step = h1;
  rec.outer_half_width = grid.half_width + extend * h1;
  rec.outer_nodes = resolution.refine * (grid.nodes_per_axis - 1) + 2 * extend + 1;
  const int n_quad = basis.n_quad();
  const int n_bound = int(rec.nodes.size());
  rec.trace.resize(n_quad, n_bound);
  rec.inward1.resize(n_quad, n_bound);
  rec.inward2.resize(n_quad, n_bound);
  rec.field_max_abs.resize(n_quad);
  rec.initial_field = sample_field(scenario.initial, grid);

  // Outer-mesh linear indices (column-major) of each boundary node and its
  // two inward neighbors at h1 spacing.
  const int n1 = rec.outer_nodes;
  std::vector<int> sample_index(size_t(3 * n_bound));
  for (int b = 0; b < n_bound; ++b) {
    const auto& node = rec.nodes[size_t(b)];
    const int oi = extend + resolution.refine * (node.i - 1);
    const int oj = extend + resolution.refine * (node.j - 1);
    int di = 0, dj = 0;
    switch (node.edge) {
      case Edge::West: di = 1; break;
      case Edge::East: di = -1; break;
      case Edge::South: dj = 1; break;
      case Edge::North: dj = -1; break;
    }
    for (int k = 0; k < 3; ++k) {
      sample_index[size_t(3 * b + k)] = (oi + k * di) + (oj + k * dj) * n1;
    }
  }

  switch (scenario.q_kind) {
    case QKind::Zero:
      march(scenario, grid, basis, rec, [](double) { return 0.0; }, safety, jobs, sample_index);
      break;
    case QKind::Fisher:
      march(scenario, grid, basis, rec, [](double s) { return s * (1.0 - s); }, safety, jobs,
            sample_index);
      break;
    case QKind::NegRoot:
      march(scenario, grid, basis, rec,
            [](double s) { return -s * (1.0 - std::sqrt(std::abs(s))); }, safety, jobs,
            sample_index);
      break;
    case QKind::Square:
      march(scenario, grid, basis, rec, [](double s) { return s * s; }, safety, jobs,
            sample_index);
      break;
    case QKind::NegSquare:
      march(scenario, grid, basis, rec, [](double s) { return -s * s; }, safety, jobs,
            sample_index);
      break;
    case QKind::Custom:
      march(scenario, grid, basis, rec, scenario.nonlinearity, safety, jobs, sample_index);
      break;
  }
  return rec;
}

CauchyRecord extract_cauchy(const ForwardRecord& record, const TimeBasis& basis) {
  if (record.trace.rows() != basis.n_quad()) {
    throw std::invalid_argument("extract_cauchy: record and basis quadrature grids differ");
  }
  CauchyRecord cauchy;
  cauchy.nodes = record.nodes;
  cauchy.dirichlet = record.trace;
  cauchy.neumann =
      (3.0 * record.trace - 4.0 * record.inward1 + record.inward2) / (2.0 * record.outer_step);
  const Eigen::MatrixXd projector = basis.weights.asDiagonal() * basis.values;  // (N_q, N)
  cauchy.dirichlet_modes = cauchy.dirichlet.transpose() * projector;
  cauchy.neumann_modes = cauchy.neumann.transpose() * projector;
  return cauchy;
}

CauchyRecord add_noise(const CauchyRecord& record, double noise, std::uint64_t seed) {
  if (noise < 0.0) throw std::invalid_argument("add_noise: noise level must be >= 0");
  CauchyRecord out = record;
  std::mt19937_64 rng(seed);
  // Raw 53-bit mantissa draw; uniform_real_distribution is not reproducible
  // across standard libraries.
  auto uniform01 = [&rng]() { return double(rng() >> 11) * 0x1.0p-53; };
  auto perturb = [&](Eigen::MatrixXd& modes) {
    for (int b = 0; b < modes.rows(); ++b) {
      for (int m = 0; m < modes.cols(); ++m) {
        modes(b, m) *= 1.0 + noise * (2.0 * uniform01() - 1.0);
      }
    }
  };
  perturb(out.dirichlet_modes);
  perturb(out.neumann_modes);
  return out;
}

}  // namespace parec
