#include "parec/artifacts.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace parec {

namespace {

using Json = nlohmann::ordered_json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("artifacts: cannot write \"" + path + "\"");
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_grid_csv(const std::string& path, const SpatialGrid& grid,
                    const Eigen::MatrixXd& field) {
  if (field.rows() != grid.nodes_per_axis || field.cols() != grid.nodes_per_axis) {
    throw std::invalid_argument("write_grid_csv: field does not match the grid");
  }
  auto out = open_out(path);
  out << "x,y,value\n";
  for (int i = 1; i <= grid.nodes_per_axis; ++i) {
    for (int j = 1; j <= grid.nodes_per_axis; ++j) {
      out << fmt(grid.x(i)) << ',' << fmt(grid.y(j)) << ',' << fmt(field(i - 1, j - 1)) << '\n';
    }
  }
}

void write_cauchy_csv(const std::string& path, const SpatialGrid& grid, const TimeBasis& basis,
                      const CauchyRecord& record) {
  auto out = open_out(path);
  out << "edge,i,j,t,f,g\n";
  for (int b = 0; b < int(record.nodes.size()); ++b) {
    const auto& node = record.nodes[size_t(b)];
    for (int q = 0; q < basis.n_quad(); ++q) {
      out << edge_name(node.edge) << ',' << node.i << ',' << node.j << ','
          << fmt(basis.nodes[q]) << ',' << fmt(record.dirichlet(q, b)) << ','
          << fmt(record.neumann(q, b)) << '\n';
    }
  }
  (void)grid;
}

void write_run_artifacts(const std::string& dir, const RunConfig& cfg,
                         const ReconstructionResult& result) {
  std::filesystem::create_directories(dir);
  const SpatialGrid grid = make_grid(cfg.half_width, cfg.nx);

  if (result.p_true_known) {
    write_grid_csv(dir + "/p_true.csv", grid, result.p_true_field);
  }
  for (const auto& state : result.iterations) {
    write_grid_csv(dir + "/p_iter_" + std::to_string(state.k) + ".csv", grid,
                   state.reconstruction);
  }

  {
    auto out = open_out(dir + "/recursive_error.csv");
    out << "k,error\n";
    for (size_t k = 0; k < result.metrics.recursive_errors.size(); ++k) {
      out << (k + 1) << ',' << fmt(result.metrics.recursive_errors[k]) << '\n';
    }
  }

  {
    Json j;
    j["scenario"] = result.scenario_name;
    Json params;
    params["nx"] = cfg.nx;
    params["modes"] = cfg.modes;
    params["quad_nodes"] = cfg.quad_nodes;
    params["lambda"] = cfg.lambda;
    params["beta"] = cfg.beta;
    params["b"] = cfg.weight_scale;
    params["x0"] = {cfg.x0_x, cfg.x0_y};
    params["omega"] = result.omega;
    params["noise"] = cfg.noise;
    params["seed"] = cfg.seed;
    params["iterations"] = cfg.iterations;
    params["outer_nodes"] = result.outer_nodes;
    params["outer_half_width"] = result.outer_half_width_actual;
    params["cutoff_bound"] = result.cutoff_bound;
    j["parameters"] = params;

    Json inclusions = Json::array();
    for (const auto& im : result.metrics.inclusions) {
      Json e;
      e["label"] = im.label;
      e["true_max"] = im.true_max;
      e["reconstructed_max"] = im.reconstructed_max;
      e["relative_error"] = im.relative_error;
      inclusions.push_back(e);
    }
    j["inclusions"] = inclusions;

    Json argmax;
    argmax["x"] = result.metrics.argmax_x;
    argmax["y"] = result.metrics.argmax_y;
    argmax["value"] = result.metrics.argmax_value;
    argmax["inside_support"] = result.metrics.argmax_inside_support;
    j["argmax"] = argmax;

    Json errors;
    errors["weighted_l2"] = result.metrics.weighted_l2_error;
    errors["l2"] = result.metrics.l2_error;
    errors["relative"] = result.metrics.errors_relative;
    j["errors"] = errors;

    j["recursive_errors"] = result.metrics.recursive_errors;
    Json decay = Json::array();
    const auto& re = result.metrics.recursive_errors;
    for (size_t k = 1; k < re.size(); ++k) {
      decay.push_back(re[k - 1] > 0.0 ? re[k] / re[k - 1] : 0.0);
    }
    j["recursive_error_ratios"] = decay;

    Json solver = Json::array();
    for (const auto& state : result.iterations) {
      Json s;
      s["k"] = state.k;
      s["iterations"] = state.solver_iterations;
      s["residual"] = state.solver_residual;
      s["converged"] = state.solver_converged;
      solver.push_back(s);
    }
    j["solver"] = solver;

    auto out = open_out(dir + "/metrics.json");
    out << j.dump(2) << '\n';
  }

  {
    RunConfig echo = cfg;
    echo.omega = result.omega;  // resolved value; a re-run reproduces the same system
    auto out = open_out(dir + "/config_echo.json");
    out << config_to_json(echo);
  }
}

}  // namespace parec
