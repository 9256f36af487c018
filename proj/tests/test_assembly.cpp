#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "parec/assembly.hpp"
#include "parec/basis.hpp"
#include "parec/grid.hpp"
#include "parec/lsq.hpp"

using namespace parec;

namespace {

struct DenseSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
};

// Independent reference assembler: writes every entry from the block
// definitions (Laplacian and mode-coupling blocks at interior nodes, identity
// and first-difference boundary blocks), with the x-edge rule at corners.
DenseSystem dense_reference(const SpatialGrid& grid, const Eigen::MatrixXd& c,
                            const Eigen::MatrixXd& s, const CarlemanParams& params, double omega,
                            const Eigen::MatrixXd& fm, const Eigen::MatrixXd& gm) {
  const int nx = grid.nodes_per_axis;
  const int n_modes = int(s.rows());
  const int cols = nx * nx * n_modes;
  const auto bnodes = boundary_nodes(grid);
  const int n_pde = grid.interior_count() * n_modes;
  const int n_con = int(bnodes.size()) * n_modes;
  const double h = grid.step;
  const double h2 = h * h;
  auto col_of = [&](int i, int j, int m) { return lineup(i, j, m, nx, n_modes) - 1; };

  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n_pde, cols);
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(n_pde, cols);
  int row = 0;
  for (int i = 2; i <= nx - 1; ++i) {
    for (int j = 2; j <= nx - 1; ++j) {
      const double w = carleman_weight(grid.x(i), grid.y(j), params);
      for (int m = 1; m <= n_modes; ++m, ++row) {
        lap(row, col_of(i, j, m)) = -4.0 * w / h2;
        lap(row, col_of(i - 1, j, m)) = w / h2;
        lap(row, col_of(i + 1, j, m)) = w / h2;
        lap(row, col_of(i, j - 1, m)) = w / h2;
        lap(row, col_of(i, j + 1, m)) = w / h2;
        for (int n = 1; n <= n_modes; ++n) {
          coupling(row, col_of(i, j, n)) = (w * c(i - 1, j - 1)) * s(m - 1, n - 1);
        }
      }
    }
  }

  DenseSystem sys;
  sys.matrix.resize(n_pde + 2 * n_con, cols);
  sys.rhs = Eigen::VectorXd::Zero(n_pde + 2 * n_con);
  sys.matrix.topRows(n_pde) = lap - coupling;

  row = n_pde;
  for (int b = 0; b < int(bnodes.size()); ++b) {
    for (int m = 1; m <= n_modes; ++m, ++row) {
      sys.matrix.row(row).setZero();
      sys.matrix(row, col_of(bnodes[b].i, bnodes[b].j, m)) = omega;
      sys.rhs[row] = omega * fm(b, m - 1);
    }
  }
  for (int b = 0; b < int(bnodes.size()); ++b) {
    int ii = bnodes[b].i, jj = bnodes[b].j;
    switch (bnodes[b].edge) {
      case Edge::West: ii += 1; break;
      case Edge::East: ii -= 1; break;
      case Edge::South: jj += 1; break;
      case Edge::North: jj -= 1; break;
    }
    for (int m = 1; m <= n_modes; ++m, ++row) {
      sys.matrix.row(row).setZero();
      sys.matrix(row, col_of(bnodes[b].i, bnodes[b].j, m)) = omega / grid.step;
      sys.matrix(row, col_of(ii, jj, m)) = -omega / grid.step;
      sys.rhs[row] = omega * gm(b, m - 1);
    }
  }
  return sys;
}

Eigen::MatrixXd random_modes(int rows, int cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = unit(rng);
  }
  return m;
}

CarlemanParams paper_params() {
  return CarlemanParams{40.0, 10.0, 5.0, {0.0, 1.5}};
}

}  // namespace

TEST_CASE("carleman weight reference values") {
  CarlemanParams params = paper_params();

  SUBCASE("lambda = 0 gives a unit weight") {
    params.lambda = 0.0;
    CHECK(carleman_weight(0.3, -0.8, params) == 1.0);
    CHECK(carleman_weight(-1.0, 1.0, params) == 1.0);
  }
  SUBCASE("near point") {
    // r = 0.5, exponent 40 (0.5/5)^10 = 4.096e-9
    const double w = carleman_weight(0.0, 1.0, params);
    const double exponent = 40.0 * std::pow(0.5 / 5.0, 10.0);
    CHECK(exponent == doctest::Approx(4.096e-9).epsilon(1e-12));
    CHECK(w == doctest::Approx(std::exp(exponent)).epsilon(1e-15));
    CHECK(w == doctest::Approx(1.0 + 4.0e-9).epsilon(1e-9));
  }
  SUBCASE("far corner") {
    // r = sqrt(7.25): exponent about 0.0820, weight about 1.0855
    const double w = carleman_weight(-1.0, -1.0, params);
    const double exponent = 40.0 * std::pow(std::sqrt(7.25) / 5.0, 10.0);
    CHECK(exponent == doctest::Approx(0.0820).epsilon(2e-3));
    CHECK(w == doctest::Approx(1.0855).epsilon(1e-4));
    CHECK(w == doctest::Approx(std::exp(exponent)).epsilon(1e-15));
  }
  SUBCASE("monotone in r along rays from the anchor") {
    for (double angle : {0.1, 1.2, 2.8, 4.0, 5.5}) {
      double prev = 0.0;
      for (int k = 1; k <= 8; ++k) {
        const double r = 0.3 * k;
        const double x = params.anchor[0] + r * std::cos(angle);
        const double y = params.anchor[1] + r * std::sin(angle);
        const double w = carleman_weight(x, y, params);
        CHECK(w >= prev);
        prev = w;
      }
    }
  }
}

TEST_CASE("carleman parameter validation") {
  const SpatialGrid grid = make_grid(1.0, 8);
  CarlemanParams inside = paper_params();
  inside.anchor = {0.2, 0.4};
  CHECK_THROWS_AS(validate_carleman(inside, grid), std::invalid_argument);
  CarlemanParams small_b = paper_params();
  small_b.scale = 2.0;  // max r over the box is about 2.69
  CHECK_THROWS_AS(validate_carleman(small_b, grid), std::invalid_argument);
  CHECK_NOTHROW(validate_carleman(paper_params(), grid));
}

TEST_CASE("block dimensions for the 4x4 grid with two modes") {
  const SpatialGrid grid = make_grid(1.0, 4);
  const Eigen::MatrixXd c = Eigen::MatrixXd::Ones(4, 4);
  const Eigen::MatrixXd s = random_modes(2, 2, 1);
  const Eigen::MatrixXd fm = random_modes(12, 2, 2);
  const Eigen::MatrixXd gm = random_modes(12, 2, 3);
  const EllipticSystem sys = assemble(grid, c, s, paper_params(), 10.0, fm, gm);
  CHECK(sys.unknowns() == 32);
  CHECK(sys.pde.size() == 8);        // 4 interior nodes x 2 modes
  CHECK(sys.dirichlet.size() == 24); // 12 boundary nodes x 2 modes
  CHECK(sys.neumann.size() == 24);
  CHECK(sys.matrix.rows() == 56);
  CHECK(sys.matrix.cols() == 32);
}

TEST_CASE("unweighted single-mode system reduces to the discrete Laplacian") {
  const SpatialGrid grid = make_grid(1.0, 5);
  CarlemanParams params = paper_params();
  params.lambda = 0.0;
  const Eigen::MatrixXd c = Eigen::MatrixXd::Ones(5, 5);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(1, 1);
  const Eigen::MatrixXd fm = Eigen::MatrixXd::Zero(16, 1);
  const Eigen::MatrixXd gm = Eigen::MatrixXd::Zero(16, 1);
  const EllipticSystem sys = assemble(grid, c, s, params, 1.0, fm, gm);
  const double h2 = grid.step * grid.step;
  const Eigen::MatrixXd dense = Eigen::MatrixXd(sys.matrix);
  // First PDE row belongs to interior node (2, 2).
  const int center = lineup(2, 2, 1, 5, 1) - 1;
  CHECK(dense(0, center) == -4.0 / h2);
  CHECK(dense(0, lineup(1, 2, 1, 5, 1) - 1) == 1.0 / h2);
  CHECK(dense(0, lineup(3, 2, 1, 5, 1) - 1) == 1.0 / h2);
  CHECK(dense(0, lineup(2, 1, 1, 5, 1) - 1) == 1.0 / h2);
  CHECK(dense(0, lineup(2, 3, 1, 5, 1) - 1) == 1.0 / h2);
  CHECK(dense.row(0).array().abs().sum() ==
        doctest::Approx(8.0 / h2).epsilon(1e-15));  // nothing else in the row
}

TEST_CASE("mode-coupling block is dense in the modes at the node") {
  const SpatialGrid grid = make_grid(1.0, 4);
  const TimeBasis basis = build_basis(1.5, 3, 129);
  const Eigen::MatrixXd s = stiffness(basis);
  Eigen::MatrixXd c(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) c(i, j) = paper_coefficient(grid.x(i + 1), grid.y(j + 1));
  }
  const Eigen::MatrixXd fm = Eigen::MatrixXd::Zero(12, 3);
  const Eigen::MatrixXd gm = Eigen::MatrixXd::Zero(12, 3);
  const CarlemanParams params = paper_params();
  const EllipticSystem sys = assemble(grid, c, s, params, 1.0, fm, gm);
  const Eigen::MatrixXd dense = Eigen::MatrixXd(sys.matrix);
  // Row of (i=2, j=3, m=2): second interior node, second mode.
  const int row = 1 * 3 + (2 - 1);
  const double w = carleman_weight(grid.x(2), grid.y(3), params);
  const double wc = w * c(1, 2);
  for (int n = 1; n <= 3; ++n) {
    const double expected = n == 2 ? (-4.0 * w / (grid.step * grid.step)) - (wc * s(1, n - 1))
                                   : -(wc * s(1, n - 1));
    CHECK(dense(row, lineup(2, 3, n, 4, 3) - 1) == expected);
  }
}

TEST_CASE("sparse system equals the dense reference entry for entry") {
  const TimeBasis basis3 = build_basis(1.5, 3, 129);
  const Eigen::MatrixXd s3 = stiffness(basis3);
  for (int nx : {4, 5, 6}) {
    for (int n_modes : {1, 2, 3}) {
      const SpatialGrid grid = make_grid(1.0, nx);
      const Eigen::MatrixXd s = s3.topLeftCorner(n_modes, n_modes);
      Eigen::MatrixXd c(nx, nx);
      for (int i = 1; i <= nx; ++i) {
        for (int j = 1; j <= nx; ++j) c(i - 1, j - 1) = paper_coefficient(grid.x(i), grid.y(j));
      }
      const int n_bound = grid.boundary_count();
      const Eigen::MatrixXd fm = random_modes(n_bound, n_modes, unsigned(10 * nx + n_modes));
      const Eigen::MatrixXd gm = random_modes(n_bound, n_modes, unsigned(100 * nx + n_modes));
      const double omega = 37.5;
      const EllipticSystem sys = assemble(grid, c, s, paper_params(), omega, fm, gm);
      const DenseSystem ref = dense_reference(grid, c, s, paper_params(), omega, fm, gm);
      const Eigen::MatrixXd dense = Eigen::MatrixXd(sys.matrix);
      REQUIRE(dense.rows() == ref.matrix.rows());
      CHECK((dense - ref.matrix).cwiseAbs().maxCoeff() == 0.0);
      CHECK((sys.rhs - ref.rhs).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("assemble validates its input") {
  const SpatialGrid grid = make_grid(1.0, 4);
  const Eigen::MatrixXd c = Eigen::MatrixXd::Ones(4, 4);
  const Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd fm = Eigen::MatrixXd::Zero(12, 2);
  const Eigen::MatrixXd gm = Eigen::MatrixXd::Zero(12, 2);
  CHECK_THROWS_AS(assemble(grid, c, s, paper_params(), 0.0, fm, gm), std::invalid_argument);
  CHECK_THROWS_AS(assemble(grid, c, s, paper_params(), -1.0, fm, gm), std::invalid_argument);
  CHECK_THROWS_AS(assemble(grid, Eigen::MatrixXd::Ones(3, 3), s, paper_params(), 1.0, fm, gm),
                  std::invalid_argument);
  CHECK_THROWS_AS(assemble(grid, c, s, paper_params(), 1.0, Eigen::MatrixXd::Zero(11, 2), gm),
                  std::invalid_argument);
}

TEST_CASE("default constraint weight matches the assembled block") {
  const SpatialGrid grid = make_grid(1.0, 6);
  const TimeBasis basis = build_basis(1.5, 3, 129);
  const Eigen::MatrixXd s = stiffness(basis);
  Eigen::MatrixXd c(6, 6);
  for (int i = 1; i <= 6; ++i) {
    for (int j = 1; j <= 6; ++j) c(i - 1, j - 1) = paper_coefficient(grid.x(i), grid.y(j));
  }
  const Eigen::MatrixXd fm = Eigen::MatrixXd::Zero(20, 3);
  const Eigen::MatrixXd gm = Eigen::MatrixXd::Zero(20, 3);
  const EllipticSystem sys = assemble(grid, c, s, paper_params(), 5.0, fm, gm);
  double max_norm = 0.0;
  const Eigen::MatrixXd dense = Eigen::MatrixXd(sys.matrix);
  for (int r = sys.pde.begin; r < sys.pde.end; ++r) {
    max_norm = std::max(max_norm, dense.row(r).norm());
  }
  CHECK(default_constraint_weight(grid, c, s, paper_params()) ==
        doctest::Approx(1000.0 * max_norm).epsilon(1e-12));
  CHECK(sys.max_pde_row_norm == doctest::Approx(max_norm).epsilon(1e-12));
}

TEST_CASE("rescaling a constraint block leaves a consistent solution fixed") {
  const SpatialGrid grid = make_grid(1.0, 5);
  const TimeBasis basis = build_basis(1.5, 2, 129);
  const Eigen::MatrixXd s = stiffness(basis);
  const Eigen::MatrixXd c = Eigen::MatrixXd::Constant(5, 5, 1.1);
  const int n_bound = grid.boundary_count();
  const Eigen::MatrixXd fm = Eigen::MatrixXd::Zero(n_bound, 2);
  const Eigen::MatrixXd gm = Eigen::MatrixXd::Zero(n_bound, 2);
  EllipticSystem sys = assemble(grid, c, s, paper_params(), 12.0, fm, gm);

  // Consistent data: rhs = A u for a chosen u, so the residual can vanish.
  const Eigen::VectorXd u_exact = random_modes(sys.unknowns(), 1, 77).col(0);
  const Eigen::VectorXd rhs = spmv(sys.matrix, u_exact);
  const LsqSolution first = lsq_solve(sys.matrix, rhs, 1e-12, 2000);
  REQUIRE(first.converged);
  CHECK((first.x - u_exact).norm() <= 1e-6 * u_exact.norm());

  // Scale the Dirichlet and Neumann blocks (rows and data) by 7.
  SparseMatrix scaled = sys.matrix;
  Eigen::VectorXd rhs_scaled = rhs;
  for (int r = sys.dirichlet.begin; r < scaled.rows(); ++r) {
    for (SparseMatrix::InnerIterator it(scaled, r); it; ++it) it.valueRef() *= 7.0;
    rhs_scaled[r] *= 7.0;
  }
  const LsqSolution second = lsq_solve(scaled, rhs_scaled, 1e-12, 2000);
  REQUIRE(second.converged);
  CHECK((second.x - first.x).norm() <= 1e-6 * first.x.norm());
}

TEST_CASE("cutoff clamp") {
  const double bound = 3.0, horizon = 1.5;
  const double cap = bound * std::sqrt(horizon);
  CHECK(cutoff(2.0 * cap, bound, horizon) == cap);
  CHECK(cutoff(-2.0 * cap, bound, horizon) == -cap);
  CHECK(cutoff(0.0, bound, horizon) == 0.0);
  CHECK(cutoff(0.5 * cap, bound, horizon) == 0.5 * cap);
}

TEST_CASE("nonlinear load") {
  const SpatialGrid grid = make_grid(1.0, 5);
  const TimeBasis basis = build_basis(1.5, 3, 129);
  const CarlemanParams params = paper_params();
  Eigen::VectorXd coeffs = random_modes(5 * 5 * 3, 1, 91).col(0);

  SUBCASE("zero nonlinearity gives a zero load") {
    const Eigen::VectorXd load =
        nonlinear_load(grid, basis, params, [](double) { return 0.0; }, 5.0, coeffs);
    CHECK(load.size() == grid.interior_count() * 3);
    CHECK(load.norm() == 0.0);
  }
  SUBCASE("linear nonlinearity reproduces the coefficients") {
    const double a = 0.37;
    const Eigen::VectorXd load =
        nonlinear_load(grid, basis, params, [a](double v) { return a * v; }, 50.0, coeffs);
    int row = 0;
    for (int i = 2; i <= 4; ++i) {
      for (int j = 2; j <= 4; ++j) {
        const double w = carleman_weight(grid.x(i), grid.y(j), params);
        for (int m = 1; m <= 3; ++m, ++row) {
          const double expected = w * a * coeffs[lineup(i, j, m, 5, 3) - 1];
          CHECK(load[row] == doctest::Approx(expected).epsilon(1e-12));
        }
      }
    }
  }
  SUBCASE("clamp saturates large coefficients") {
    Eigen::VectorXd big = coeffs;
    const double bound = 0.01;
    const double cap = bound * std::sqrt(basis.horizon);
    big.setConstant(100.0);
    const Eigen::VectorXd load =
        nonlinear_load(grid, basis, params, [](double v) { return v; }, bound, big);
    // With every coefficient clamped at the cap, the linear load per mode is
    // w * cap.
    int row = 0;
    for (int i = 2; i <= 4; ++i) {
      for (int j = 2; j <= 4; ++j) {
        const double w = carleman_weight(grid.x(i), grid.y(j), params);
        for (int m = 1; m <= 3; ++m, ++row) {
          CHECK(load[row] == doctest::Approx(w * cap).epsilon(1e-10));
        }
      }
    }
  }
  SUBCASE("non-finite nonlinearity aborts with the node position") {
    CHECK_THROWS_WITH_AS(
        nonlinear_load(grid, basis, params,
                       [](double) { return std::numeric_limits<double>::quiet_NaN(); }, 5.0,
                       coeffs),
        doctest::Contains("node"), std::runtime_error);
  }
}
