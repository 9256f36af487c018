#include "parec/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "parec/expr.hpp"

namespace parec {

double paper_coefficient(double x, double y) {
  const double u = 3.0 * x;
  const double v = 3.0 * y;
  const double peaks = 3.0 * (1.0 - u) * (1.0 - u) * std::exp(-u * u - (v + 1.0) * (v + 1.0)) -
                       10.0 * (u / 5.0 - u * u * u - std::pow(v, 5)) * std::exp(-u * u - v * v) -
                       (1.0 / 3.0) * std::exp(-(u + 1.0) * (u + 1.0) - v * v);
  return 1.0 + peaks / 30.0;
}

std::pair<std::function<double(double)>, QKind> make_nonlinearity(const std::string& label) {
  if (label == "zero") return {[](double) { return 0.0; }, QKind::Zero};
  if (label == "fisher") return {[](double s) { return s * (1.0 - s); }, QKind::Fisher};
  if (label == "neg_root") {
    return {[](double s) { return -s * (1.0 - std::sqrt(std::abs(s))); }, QKind::NegRoot};
  }
  if (label == "square") return {[](double s) { return s * s; }, QKind::Square};
  if (label == "neg_square") return {[](double s) { return -s * s; }, QKind::NegSquare};
  const std::string text = label.rfind("expr:", 0) == 0 ? label.substr(5) : label;
  return {compile_expression(text), QKind::Custom};
}

Eigen::MatrixXd sample_field(const std::function<double(double, double)>& fn,
                             const SpatialGrid& grid) {
  Eigen::MatrixXd field(grid.nodes_per_axis, grid.nodes_per_axis);
  for (int i = 1; i <= grid.nodes_per_axis; ++i) {
    for (int j = 1; j <= grid.nodes_per_axis; ++j) {
      field(i - 1, j - 1) = fn(grid.x(i), grid.y(j));
    }
  }
  return field;
}

std::function<double(double, double)> make_coefficient(const std::string& label) {
  if (label == "paper") return paper_coefficient;
  if (label.rfind("constant:", 0) == 0) {
    const double value = std::stod(label.substr(9));
    if (!(value > 0.0)) {
      throw std::invalid_argument("make_coefficient: constant must be positive");
    }
    return [value](double, double) { return value; };
  }
  throw std::invalid_argument("make_coefficient: unknown label \"" + label + "\"");
}

Inclusion make_disk(std::string label, double value, double cx, double cy, double radius) {
  return {std::move(label), value, [=](double x, double y) {
            return (x - cx) * (x - cx) + (y - cy) * (y - cy) < radius * radius;
          }};
}

Inclusion make_ring(std::string label, double value, double cx, double cy, double r_in,
                    double r_out) {
  return {std::move(label), value, [=](double x, double y) {
            const double rr = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            return rr > r_in * r_in && rr < r_out * r_out;
          }};
}

Inclusion make_box(std::string label, double value, double cx, double cy, double x_half,
                   double y_half) {
  return {std::move(label), value, [=](double x, double y) {
            return std::abs(x - cx) < x_half && std::abs(y - cy) < y_half;
          }};
}

std::function<double(double, double)> initial_from_inclusions(std::vector<Inclusion> incs) {
  return [incs = std::move(incs)](double x, double y) {
    for (const auto& inc : incs) {
      if (inc.contains(x, y)) return inc.true_max;
    }
    return 0.0;
  };
}

namespace {

Inclusion disk(std::string label, double value, double cx, double cy, double radius) {
  return make_disk(std::move(label), value, cx, cy, radius);
}

Inclusion ring(std::string label, double value, double r_in, double r_out) {
  return make_ring(std::move(label), value, 0.0, 0.0, r_in, r_out);
}

Inclusion box(std::string label, double value, double x_half, double cy, double y_half) {
  return make_box(std::move(label), value, 0.0, cy, x_half, y_half);
}

std::function<double(double, double)> from_inclusions(std::vector<Inclusion> incs) {
  return initial_from_inclusions(std::move(incs));
}

Scenario base_scenario(std::string name, const std::string& q_label) {
  Scenario sc;
  sc.name = std::move(name);
  sc.coefficient = paper_coefficient;
  sc.coefficient_label = "paper";
  std::tie(sc.nonlinearity, sc.q_kind) = make_nonlinearity(q_label);
  sc.q_label = q_label;
  return sc;
}

}  // namespace

Scenario make_scenario(const std::string& name) {
  if (name == "test1") {
    Scenario sc = base_scenario(name, "fisher");
    sc.inclusions = {disk("disk", 8.0, 0.0, 0.3, 0.45)};
    sc.initial = from_inclusions(sc.inclusions);
    return sc;
  }
  if (name == "test2") {
    Scenario sc = base_scenario(name, "neg_root");
    sc.inclusions = {disk("upper_left", 9.0, -0.5, 0.5, 0.35),
                     disk("upper_right", 12.0, 0.5, 0.5, 0.35),
                     disk("lower_left", 10.0, -0.5, -0.5, 0.35),
                     disk("lower_right", 14.0, 0.5, -0.5, 0.35)};
    sc.initial = from_inclusions(sc.inclusions);
    return sc;
  }
  if (name == "test3") {
    Scenario sc = base_scenario(name, "square");
    sc.inclusions = {ring("ring", 1.0, 0.2, 0.8)};
    sc.initial = from_inclusions(sc.inclusions);
    return sc;
  }
  if (name == "test4") {
    Scenario sc = base_scenario(name, "neg_square");
    sc.inclusions = {box("upper_line", 10.0, 0.8, 0.6, 0.225),
                     box("lower_line", 8.0, 0.8, -0.6, 0.225)};
    sc.initial = from_inclusions(sc.inclusions);
    return sc;
  }
  if (name == "zero-smoke") {
    Scenario sc = base_scenario(name, "zero");
    sc.coefficient = [](double, double) { return 1.0; };
    sc.coefficient_label = "constant:1";
    sc.initial = [](double, double) { return 0.0; };
    sc.noise = 0.0;
    return sc;
  }
  if (name == "bump") {
    // Smooth compactly supported source for linear sanity runs.
    Scenario sc = base_scenario(name, "zero");
    sc.coefficient = [](double, double) { return 1.0; };
    sc.coefficient_label = "constant:1";
    const double r0 = 0.6;
    sc.initial = [r0](double x, double y) {
      const double rr = (x * x + y * y) / (r0 * r0);
      return rr < 1.0 ? std::pow(1.0 - rr, 3) : 0.0;
    };
    sc.inclusions = {{"bump", 1.0,
                      [r0](double x, double y) { return x * x + y * y < r0 * r0; }}};
    sc.noise = 0.0;
    return sc;
  }
  throw std::invalid_argument("make_scenario: unknown scenario \"" + name + "\"");
}

std::vector<std::string> builtin_scenarios() {
  return {"test1", "test2", "test3", "test4", "zero-smoke", "bump"};
}

}  // namespace parec
