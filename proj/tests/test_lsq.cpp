#include <doctest.h>

#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "parec/errors.hpp"
#include "parec/lsq.hpp"

using namespace parec;

namespace {

SparseMatrix from_dense(const Eigen::MatrixXd& dense, double prune = 0.0) {
  SparseMatrix out(dense.rows(), dense.cols());
  std::vector<Eigen::Triplet<double>> entries;
  for (int i = 0; i < dense.rows(); ++i) {
    for (int j = 0; j < dense.cols(); ++j) {
      if (std::abs(dense(i, j)) > prune) entries.emplace_back(i, j, dense(i, j));
    }
  }
  out.setFromTriplets(entries.begin(), entries.end());
  out.makeCompressed();
  return out;
}

Eigen::MatrixXd random_dense(int rows, int cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = unit(rng);
  }
  return m;
}

}  // namespace

TEST_CASE("spmv basics") {
  SUBCASE("identity") {
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(6, 6);
    const SparseMatrix a = from_dense(eye);
    Eigen::VectorXd x = random_dense(6, 1, 1);
    CHECK((spmv(a, x) - x).norm() == 0.0);
  }
  SUBCASE("zero matrix") {
    SparseMatrix a(4, 7);
    a.makeCompressed();
    Eigen::VectorXd x = random_dense(7, 1, 2);
    CHECK(spmv(a, x).norm() == 0.0);
  }
  SUBCASE("matches the dense product") {
    const Eigen::MatrixXd dense = random_dense(5, 7, 3);
    const SparseMatrix a = from_dense(dense);
    const Eigen::VectorXd x = random_dense(7, 1, 4);
    CHECK((spmv(a, x) - dense * x).array().abs().maxCoeff() <= 1e-14);
    const Eigen::VectorXd y = random_dense(5, 1, 5);
    CHECK((spmv_transpose(a, y) - dense.transpose() * y).array().abs().maxCoeff() <= 1e-14);
  }
  SUBCASE("dimension mismatch") {
    const SparseMatrix a = from_dense(random_dense(3, 4, 6));
    CHECK_THROWS_AS(spmv(a, Eigen::VectorXd::Zero(3)), std::invalid_argument);
    CHECK_THROWS_AS(spmv_transpose(a, Eigen::VectorXd::Zero(4)), std::invalid_argument);
  }
  SUBCASE("threaded product is bitwise identical") {
    const Eigen::MatrixXd dense = random_dense(40, 33, 7);
    const SparseMatrix a = from_dense(dense, 0.6);
    const Eigen::VectorXd x = random_dense(33, 1, 8);
    const Eigen::VectorXd y1 = spmv(a, x, 1);
    const Eigen::VectorXd y4 = spmv(a, x, 4);
    CHECK((y1 - y4).norm() == 0.0);
  }
}

TEST_CASE("spmv adjointness") {
  const Eigen::MatrixXd dense = random_dense(12, 9, 11);
  const SparseMatrix a = from_dense(dense, 0.3);
  for (unsigned seed = 0; seed < 5; ++seed) {
    const Eigen::VectorXd x = random_dense(9, 1, 100 + seed);
    const Eigen::VectorXd y = random_dense(12, 1, 200 + seed);
    const double lhs = spmv(a, x).dot(y);
    const double rhs = x.dot(spmv_transpose(a, y));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("lsq_solve on an orthogonal system") {
  // QR of a random square matrix gives an exactly orthogonal Q.
  const Eigen::MatrixXd m = random_dense(15, 15, 21);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(m)
                                .householderQ() * Eigen::MatrixXd::Identity(15, 15);
  const SparseMatrix a = from_dense(q);
  const Eigen::VectorXd b = random_dense(15, 1, 22);
  const LsqSolution sol = lsq_solve(a, b, 1e-12, 100);
  CHECK(sol.converged);
  CHECK((sol.x - q.transpose() * b).array().abs().maxCoeff() <= 1e-10);
}

TEST_CASE("lsq_solve matches dense QR on random overdetermined systems") {
  for (unsigned seed = 0; seed < 8; ++seed) {
    const Eigen::MatrixXd dense = random_dense(50, 20, 500 + seed);
    const SparseMatrix a = from_dense(dense, 0.2);
    const Eigen::MatrixXd pruned = Eigen::MatrixXd(a);
    const Eigen::VectorXd b = random_dense(50, 1, 600 + seed);
    const Eigen::VectorXd reference = pruned.colPivHouseholderQr().solve(b);
    const LsqSolution sol = lsq_solve(a, b, 1e-12, 500);
    CHECK(sol.converged);
    CHECK((sol.x - reference).norm() <= 1e-8 * reference.norm());
  }
}

TEST_CASE("lsq_solve zero right-hand side returns immediately") {
  const SparseMatrix a = from_dense(random_dense(10, 6, 31));
  const LsqSolution sol = lsq_solve(a, Eigen::VectorXd::Zero(10));
  CHECK(sol.converged);
  CHECK(sol.iterations == 0);
  CHECK(sol.x.norm() == 0.0);
}

TEST_CASE("lsq_solve reports an honest recomputed residual") {
  const Eigen::MatrixXd dense = random_dense(30, 12, 41);
  const SparseMatrix a = from_dense(dense);
  const Eigen::VectorXd b = random_dense(30, 1, 42);
  const LsqSolution sol = lsq_solve(a, b, 1e-10, 300);
  const double check =
      (dense.transpose() * (b - dense * sol.x)).norm() / (dense.transpose() * b).norm();
  CHECK(std::abs(sol.relative_residual - check) <= 1e-12);
}

TEST_CASE("lsq_solve flags non-convergence and returns the best effort") {
  const Eigen::MatrixXd dense = random_dense(40, 25, 51);
  const SparseMatrix a = from_dense(dense);
  const Eigen::VectorXd b = random_dense(40, 1, 52);
  const LsqSolution sol = lsq_solve(a, b, 1e-14, 2);
  CHECK_FALSE(sol.converged);
  CHECK(sol.iterations == 2);
  CHECK(sol.x.allFinite());
}

TEST_CASE("normal-equation residual history decreases") {
  // The recorded history backs the convergence monitor; on these
  // well-conditioned systems it decreases up to a tiny rounding slack.
  for (unsigned seed = 0; seed < 4; ++seed) {
    const Eigen::MatrixXd dense = random_dense(60, 24, 700 + seed);
    const SparseMatrix a = from_dense(dense, 0.1);
    const Eigen::VectorXd b = random_dense(60, 1, 800 + seed);
    const LsqSolution sol = lsq_solve(a, b, 1e-10, 400);
    REQUIRE(sol.residual_history.size() >= 2);
    for (size_t k = 1; k < sol.residual_history.size(); ++k) {
      CHECK(sol.residual_history[k] <= sol.residual_history[k - 1] * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("triplet dump round trip") {
  const Eigen::MatrixXd dense = random_dense(7, 5, 61);
  const SparseMatrix a = from_dense(dense, 0.4);
  std::stringstream buffer;
  write_triplets(buffer, a);
  const SparseMatrix back = read_triplets(buffer, 7, 5);
  CHECK((Eigen::MatrixXd(a) - Eigen::MatrixXd(back)).norm() == 0.0);
}
