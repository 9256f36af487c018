#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parec/forward.hpp"
#include "parec/scenario.hpp"

namespace parec {

/// Inline source shape: type is "disk" (cx, cy, radius), "ring" (cx, cy,
/// r_in, r_out) or "box" (cx, cy, x_half, y_half).
struct ShapeSpec {
  std::string type;
  std::string label;
  double value = 0.0;
  double cx = 0.0, cy = 0.0;
  double radius = 0.0;
  double r_in = 0.0, r_out = 0.0;
  double x_half = 0.0, y_half = 0.0;
};

/// Full pipeline configuration. Defaults reproduce the reference setup:
/// R1 = 6, R = 1, T = 1.5, N_x = 80, N = 35, lambda = 40, beta = 10, b = 5,
/// x0 = (0, 1.5), 20% noise, 5 iterations.
struct RunConfig {
  std::string scenario = "test1";
  std::vector<ShapeSpec> shapes;  // non-empty: inline source definition
  std::string q;                  // override nonlinearity label (empty: scenario's)
  std::string c;                  // override coefficient label (empty: scenario's)

  int nx = 80;
  int forward_refine = 1;
  int n1 = 0;  // outer nodes per axis; 0 derives the aligned count from r1
  double half_width = 1.0;        // R
  double outer_half_width = 6.0;  // R1 target
  double horizon = 1.5;           // T

  int modes = 35;      // N
  int quad_nodes = 4097;  // N_q

  double lambda = 40.0;
  double beta = 10.0;
  double weight_scale = 5.0;  // b
  double x0_x = 0.0, x0_y = 1.5;

  double omega = 0.0;   // soft-constraint weight; 0 = 1000 x max PDE row norm
  double noise = -1.0;  // delta; negative = scenario default
  std::uint64_t seed = 1;
  int iterations = 5;  // K
  double safety = 0.9;

  double solver_tol = 1e-8;
  int solver_maxit = 5000;
  bool early_stop = false;

  int jobs = 0;  // 0 = CR_THREADS / hardware
  std::string out_dir = "out";
  bool dump_cauchy = false;
  bool dump_system = false;
};

/// CI-speed preset: N_x = 40, N = 25.
RunConfig apply_desk_preset(RunConfig cfg);

RunConfig parse_config_json(const std::string& text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& cfg);

/// Builtin scenario or inline shapes, with q / c / noise / geometry overrides
/// applied.
Scenario resolve_scenario(const RunConfig& cfg);

/// Outer-mesh resolution from the config; validates an explicit n1 against
/// the aligned family k(N_x - 1) + 2E + 1.
ForwardResolution forward_resolution(const RunConfig& cfg);

}  // namespace parec
