#include "parec/carleman_check.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace parec {

CarlemanTestFunction polynomial_test(double half_width, double amplitude) {
  const double R2 = half_width * half_width;
  auto G = [R2](double s) { return (R2 - s * s) * (R2 - s * s); };
  auto Gp = [R2](double s) { return -4.0 * s * (R2 - s * s); };
  auto Gpp = [R2](double s) { return 12.0 * s * s - 4.0 * R2; };
  CarlemanTestFunction f;
  f.label = "poly";
  const double a = amplitude;
  f.v = [=](double x, double y) { return a * G(x) * G(y); };
  f.vx = [=](double x, double y) { return a * Gp(x) * G(y); };
  f.vy = [=](double x, double y) { return a * G(x) * Gp(y); };
  f.vxx = [=](double x, double y) { return a * Gpp(x) * G(y); };
  f.vyy = [=](double x, double y) { return a * G(x) * Gpp(y); };
  f.vxy = [=](double x, double y) { return a * Gp(x) * Gp(y); };
  return f;
}

CarlemanTestFunction cosine_test(double half_width, double amplitude, double wave_number) {
  const double R2 = half_width * half_width;
  const double k = wave_number;
  auto G = [R2](double s) { return (R2 - s * s) * (R2 - s * s); };
  auto Gp = [R2](double s) { return -4.0 * s * (R2 - s * s); };
  auto Gpp = [R2](double s) { return 12.0 * s * s - 4.0 * R2; };
  auto u = [=](double x) { return G(x) * std::cos(k * x); };
  auto up = [=](double x) { return Gp(x) * std::cos(k * x) - k * G(x) * std::sin(k * x); };
  auto upp = [=](double x) {
    return Gpp(x) * std::cos(k * x) - 2.0 * k * Gp(x) * std::sin(k * x) -
           k * k * G(x) * std::cos(k * x);
  };
  CarlemanTestFunction f;
  char label[32];
  std::snprintf(label, sizeof label, "cos_k%g", k);
  f.label = label;
  const double a = amplitude;
  f.v = [=](double x, double y) { return a * u(x) * G(y); };
  f.vx = [=](double x, double y) { return a * up(x) * G(y); };
  f.vy = [=](double x, double y) { return a * u(x) * Gp(y); };
  f.vxx = [=](double x, double y) { return a * upp(x) * G(y); };
  f.vyy = [=](double x, double y) { return a * u(x) * Gpp(y); };
  f.vxy = [=](double x, double y) { return a * up(x) * Gp(y); };
  return f;
}

std::vector<CarlemanTestFunction> default_test_family(double half_width) {
  return {polynomial_test(half_width), cosine_test(half_width, 1.0, 1.0),
          cosine_test(half_width, 1.0, 3.0)};
}

InequalityReport check_inequality(const CarlemanTestFunction& fn, const CarlemanParams& weight,
                                  double half_width, double lambda_min, double lambda_max,
                                  int n_lambda, int quad_nodes) {
  if (quad_nodes < 401 || quad_nodes % 2 == 0) {
    throw std::invalid_argument("check_inequality: quadrature grid must be odd and >= 401");
  }
  if (!(lambda_min > 0.0) || lambda_max < lambda_min || n_lambda < 1) {
    throw std::invalid_argument("check_inequality: bad lambda sweep");
  }
  const double R = half_width;
  const int n = quad_nodes;
  const double dx = 2.0 * R / (n - 1);
  Eigen::VectorXd w1(n);
  w1[0] = w1[n - 1] = dx / 3.0;
  for (int i = 1; i < n - 1; ++i) w1[i] = (i % 2 == 1) ? 4.0 * dx / 3.0 : 2.0 * dx / 3.0;
  auto coord = [&](int i) { return -R + i * dx; };

  // Interior scale for the boundary-vanishing check.
  double interior_scale = 0.0;
  for (int i = 0; i < n; i += 8) {
    for (int j = 0; j < n; j += 8) {
      interior_scale = std::max(interior_scale, std::abs(fn.v(coord(i), coord(j))));
    }
  }
  const double tol = 1e-10 * std::max(1.0, interior_scale);
  for (int i = 0; i < n; ++i) {
    for (double s : {-R, R}) {
      const double t = coord(i);
      for (auto [x, y] : {std::pair{s, t}, std::pair{t, s}}) {
        if (std::abs(fn.v(x, y)) > tol || std::abs(fn.vx(x, y)) > tol ||
            std::abs(fn.vy(x, y)) > tol) {
          throw std::invalid_argument("check_inequality: test function \"" + fn.label +
                                      "\" does not vanish to first order on the boundary");
        }
      }
    }
  }

  // Lambda-independent integrand pieces plus the weight exponent base
  // t(x) = (r/b)^beta, so W^2 = exp(2 lambda t).
  const int total = n * n;
  Eigen::VectorXd lap2(total), hess2(total), grad2(total), val2(total), expbase(total), ww(total);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double x = coord(i);
      const double y = coord(j);
      const int idx = j * n + i;
      const double vxx = fn.vxx(x, y);
      const double vyy = fn.vyy(x, y);
      const double vxy = fn.vxy(x, y);
      const double vx = fn.vx(x, y);
      const double vy = fn.vy(x, y);
      const double v = fn.v(x, y);
      lap2[idx] = (vxx + vyy) * (vxx + vyy);
      hess2[idx] = vxx * vxx + 2.0 * vxy * vxy + vyy * vyy;
      grad2[idx] = vx * vx + vy * vy;
      val2[idx] = v * v;
      const double r = std::hypot(x - weight.anchor[0], y - weight.anchor[1]);
      expbase[idx] = std::pow(r / weight.scale, weight.beta);
      ww[idx] = w1[i] * w1[j];
    }
  }

  InequalityReport report;
  report.label = fn.label;
  for (int il = 0; il < n_lambda; ++il) {
    const double lambda =
        n_lambda == 1 ? lambda_min
                      : lambda_min * std::pow(lambda_max / lambda_min, double(il) / (n_lambda - 1));
    InequalityRow row;
    row.lambda = lambda;
    for (int idx = 0; idx < total; ++idx) {
      const double w2 = ww[idx] * std::exp(2.0 * lambda * expbase[idx]);
      row.lhs += w2 * lap2[idx];
      row.term_hess += w2 * hess2[idx];
      row.term_grad += w2 * grad2[idx];
      row.term_val += w2 * val2[idx];
    }
    const double denom =
        row.term_hess / lambda + lambda * lambda * lambda * row.term_val + lambda * row.term_grad;
    row.degenerate = !(denom > 0.0);
    row.c_hat = row.degenerate ? 0.0 : row.lhs / denom;
    report.rows.push_back(row);
  }
  return report;
}

void write_carleman_csv(std::ostream& out, const std::vector<InequalityReport>& reports) {
  out << "lambda,lhs,term_hess,term_grad,term_val,c_hat\n";
  char buf[240];
  for (const auto& report : reports) {
    for (const auto& row : report.rows) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.lambda, row.lhs,
                    row.term_hess, row.term_grad, row.term_val, row.c_hat);
      out << buf;
    }
  }
}

}  // namespace parec
