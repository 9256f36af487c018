#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "parec/assembly.hpp"

namespace parec {

/// Analytic test function vanishing to first order on the boundary of
/// [-R, R]^2, with closed-form first and second derivatives.
struct CarlemanTestFunction {
  std::string label;
  std::function<double(double, double)> v, vx, vy, vxx, vyy, vxy;
};

/// v = a ((R^2 - x^2)(R^2 - y^2))^2.
CarlemanTestFunction polynomial_test(double half_width, double amplitude = 1.0);

/// The polynomial bump modulated by cos(k x).
CarlemanTestFunction cosine_test(double half_width, double amplitude, double wave_number);

/// Default family: the polynomial bump and its cos(x), cos(3x) modulations.
std::vector<CarlemanTestFunction> default_test_family(double half_width);

struct InequalityRow {
  double lambda = 0.0;
  double lhs = 0.0;        // integral of W^2 |lap v|^2
  double term_hess = 0.0;  // integral of W^2 sum |d2 v|^2 (enters with 1/lambda)
  double term_grad = 0.0;  // integral of W^2 |grad v|^2 (enters with lambda)
  double term_val = 0.0;   // integral of W^2 |v|^2 (enters with lambda^3)
  double c_hat = 0.0;      // lhs / (term_hess/lambda + lambda^3 term_val + lambda term_grad)
  bool degenerate = false;
};

struct InequalityReport {
  std::string label;
  std::vector<InequalityRow> rows;
};

/// Weighted integrals of the test function over [-R, R]^2 for a geometric
/// lambda sweep, by tensor Simpson quadrature (quad_nodes >= 401, odd).
/// Rejects functions whose boundary trace or gradient does not vanish
/// numerically (1e-10 relative to the interior scale).
InequalityReport check_inequality(const CarlemanTestFunction& fn, const CarlemanParams& weight,
                                  double half_width, double lambda_min, double lambda_max,
                                  int n_lambda, int quad_nodes = 401);

/// `lambda,lhs,term_hess,term_grad,term_val,c_hat` rows; reports concatenated.
void write_carleman_csv(std::ostream& out, const std::vector<InequalityReport>& reports);

}  // namespace parec
