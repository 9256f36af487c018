#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "parec/grid.hpp"

namespace parec {

/// Labeled support region of the true source, used for per-inclusion metrics.
struct Inclusion {
  std::string label;
  double true_max = 0.0;
  std::function<bool(double, double)> contains;
};

/// Nonlinearity dispatch tag; the forward march specializes the builtin kinds.
enum class QKind { Zero, Fisher, NegRoot, Square, NegSquare, Custom };

/// One synthetic experiment: coefficient c, nonlinearity q, true initial
/// condition p, domain/box sizes, horizon, and noise level.
struct Scenario {
  std::string name;
  std::function<double(double, double)> coefficient;
  std::string coefficient_label = "paper";
  std::function<double(double)> nonlinearity;
  std::string q_label = "zero";
  QKind q_kind = QKind::Zero;
  std::function<double(double, double)> initial;
  bool initial_known = true;
  double outer_half_width = 6.0;  // R1 (target; the forward mesh may land within one cell)
  double half_width = 1.0;        // R
  double horizon = 1.5;           // T
  double noise = 0.2;             // delta
  std::vector<Inclusion> inclusions;
};

/// The variable coefficient of the reference configuration,
/// c(x, y) = 1 + peaks(3x, 3y)/30; range about [0.8, 1.25] on the unit box.
double paper_coefficient(double x, double y);

/// Builtin scenarios: test1..test4 (disk / four disks / ring / two lines with
/// their nonlinearities), zero-smoke, and bump (smooth source, q = 0, c = 1).
Scenario make_scenario(const std::string& name);
std::vector<std::string> builtin_scenarios();

/// Nonlinearities by label: fisher, neg_root, square, neg_square, zero, or a
/// custom expression in the variable s (prefix "expr:" or any string that is
/// not a builtin label).
std::pair<std::function<double(double)>, QKind> make_nonlinearity(const std::string& label);

/// Coefficient by label: "paper" or "constant:<value>".
std::function<double(double, double)> make_coefficient(const std::string& label);

/// Shape constructors for inline scenario definitions.
Inclusion make_disk(std::string label, double value, double cx, double cy, double radius);
Inclusion make_ring(std::string label, double value, double cx, double cy, double r_in,
                    double r_out);
Inclusion make_box(std::string label, double value, double cx, double cy, double x_half,
                   double y_half);

/// Piecewise-constant source from labeled inclusions (first match wins).
std::function<double(double, double)> initial_from_inclusions(std::vector<Inclusion> inclusions);

Eigen::MatrixXd sample_field(const std::function<double(double, double)>& fn,
                             const SpatialGrid& grid);

}  // namespace parec
