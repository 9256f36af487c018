#include "parec/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace parec {

namespace {

using Json = nlohmann::ordered_json;

ShapeSpec shape_from_json(const Json& j) {
  ShapeSpec s;
  s.type = j.at("type").get<std::string>();
  s.value = j.at("value").get<double>();
  s.label = j.value("label", s.type);
  s.cx = j.value("cx", 0.0);
  s.cy = j.value("cy", 0.0);
  s.radius = j.value("radius", 0.0);
  s.r_in = j.value("r_in", 0.0);
  s.r_out = j.value("r_out", 0.0);
  s.x_half = j.value("x_half", 0.0);
  s.y_half = j.value("y_half", 0.0);
  if (s.type != "disk" && s.type != "ring" && s.type != "box") {
    throw std::invalid_argument("config: unknown shape type \"" + s.type + "\"");
  }
  return s;
}

Json shape_to_json(const ShapeSpec& s) {
  Json j;
  j["type"] = s.type;
  j["label"] = s.label;
  j["value"] = s.value;
  j["cx"] = s.cx;
  j["cy"] = s.cy;
  if (s.type == "disk") j["radius"] = s.radius;
  if (s.type == "ring") {
    j["r_in"] = s.r_in;
    j["r_out"] = s.r_out;
  }
  if (s.type == "box") {
    j["x_half"] = s.x_half;
    j["y_half"] = s.y_half;
  }
  return j;
}

}  // namespace

RunConfig apply_desk_preset(RunConfig cfg) {
  cfg.nx = 40;
  cfg.modes = 25;
  cfg.n1 = 0;
  return cfg;
}

RunConfig parse_config_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  RunConfig cfg;
  try {
    cfg.scenario = j.value("scenario", cfg.scenario);
    if (j.contains("shapes")) {
      for (const auto& s : j.at("shapes")) cfg.shapes.push_back(shape_from_json(s));
    }
    cfg.q = j.value("q", cfg.q);
    if (j.contains("c")) {
      if (j.at("c").is_object()) {
        cfg.c = "constant:" + std::to_string(j.at("c").at("constant").get<double>());
      } else {
        cfg.c = j.at("c").get<std::string>();
      }
    }
    cfg.nx = j.value("nx", cfg.nx);
    cfg.forward_refine = j.value("forward_refine", cfg.forward_refine);
    cfg.n1 = j.value("n1", cfg.n1);
    cfg.half_width = j.value("half_width", cfg.half_width);
    cfg.outer_half_width = j.value("outer_half_width", cfg.outer_half_width);
    cfg.horizon = j.value("horizon", cfg.horizon);
    cfg.modes = j.value("modes", cfg.modes);
    cfg.quad_nodes = j.value("quad_nodes", cfg.quad_nodes);
    cfg.lambda = j.value("lambda", cfg.lambda);
    cfg.beta = j.value("beta", cfg.beta);
    cfg.weight_scale = j.value("b", cfg.weight_scale);
    if (j.contains("x0")) {
      const auto& x0 = j.at("x0");
      cfg.x0_x = x0.at(0).get<double>();
      cfg.x0_y = x0.at(1).get<double>();
    }
    cfg.omega = j.value("omega", cfg.omega);
    cfg.noise = j.value("noise", cfg.noise);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.iterations = j.value("iterations", cfg.iterations);
    cfg.safety = j.value("safety", cfg.safety);
    cfg.solver_tol = j.value("solver_tol", cfg.solver_tol);
    cfg.solver_maxit = j.value("solver_maxit", cfg.solver_maxit);
    cfg.early_stop = j.value("early_stop", cfg.early_stop);
    cfg.jobs = j.value("jobs", cfg.jobs);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.dump_cauchy = j.value("dump_cauchy", cfg.dump_cauchy);
    cfg.dump_system = j.value("dump_system", cfg.dump_system);
    if (j.value("preset", std::string()) == "desk") cfg = apply_desk_preset(cfg);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open \"" + path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_json(buffer.str());
}

std::string config_to_json(const RunConfig& cfg) {
  Json j;
  j["scenario"] = cfg.scenario;
  if (!cfg.shapes.empty()) {
    Json shapes = Json::array();
    for (const auto& s : cfg.shapes) shapes.push_back(shape_to_json(s));
    j["shapes"] = shapes;
  }
  if (!cfg.q.empty()) j["q"] = cfg.q;
  if (!cfg.c.empty()) j["c"] = cfg.c;
  j["nx"] = cfg.nx;
  j["forward_refine"] = cfg.forward_refine;
  j["n1"] = cfg.n1;
  j["half_width"] = cfg.half_width;
  j["outer_half_width"] = cfg.outer_half_width;
  j["horizon"] = cfg.horizon;
  j["modes"] = cfg.modes;
  j["quad_nodes"] = cfg.quad_nodes;
  j["lambda"] = cfg.lambda;
  j["beta"] = cfg.beta;
  j["b"] = cfg.weight_scale;
  j["x0"] = {cfg.x0_x, cfg.x0_y};
  j["omega"] = cfg.omega;
  j["noise"] = cfg.noise;
  j["seed"] = cfg.seed;
  j["iterations"] = cfg.iterations;
  j["safety"] = cfg.safety;
  j["solver_tol"] = cfg.solver_tol;
  j["solver_maxit"] = cfg.solver_maxit;
  j["early_stop"] = cfg.early_stop;
  j["jobs"] = cfg.jobs;
  j["out_dir"] = cfg.out_dir;
  j["dump_cauchy"] = cfg.dump_cauchy;
  j["dump_system"] = cfg.dump_system;
  return j.dump(2) + "\n";
}

Scenario resolve_scenario(const RunConfig& cfg) {
  Scenario sc;
  if (!cfg.shapes.empty()) {
    sc.name = cfg.scenario.empty() ? "custom" : cfg.scenario;
    for (const auto& s : cfg.shapes) {
      if (s.type == "disk") {
        sc.inclusions.push_back(make_disk(s.label, s.value, s.cx, s.cy, s.radius));
      } else if (s.type == "ring") {
        sc.inclusions.push_back(make_ring(s.label, s.value, s.cx, s.cy, s.r_in, s.r_out));
      } else {
        sc.inclusions.push_back(make_box(s.label, s.value, s.cx, s.cy, s.x_half, s.y_half));
      }
    }
    sc.initial = initial_from_inclusions(sc.inclusions);
    sc.coefficient = paper_coefficient;
    sc.coefficient_label = "paper";
    std::tie(sc.nonlinearity, sc.q_kind) = make_nonlinearity(cfg.q.empty() ? "zero" : cfg.q);
    sc.q_label = cfg.q.empty() ? "zero" : cfg.q;
  } else {
    sc = make_scenario(cfg.scenario);
    if (!cfg.q.empty()) {
      std::tie(sc.nonlinearity, sc.q_kind) = make_nonlinearity(cfg.q);
      sc.q_label = cfg.q;
    }
  }
  if (!cfg.c.empty()) {
    sc.coefficient = make_coefficient(cfg.c);
    sc.coefficient_label = cfg.c;
  }
  if (cfg.noise >= 0.0) sc.noise = cfg.noise;
  sc.half_width = cfg.half_width;
  sc.outer_half_width = cfg.outer_half_width;
  sc.horizon = cfg.horizon;
  return sc;
}

ForwardResolution forward_resolution(const RunConfig& cfg) {
  if (cfg.forward_refine < 1) {
    throw std::invalid_argument("config: forward_refine must be >= 1");
  }
  ForwardResolution res;
  res.refine = cfg.forward_refine;
  if (cfg.n1 > 0) {
    const int extra = cfg.n1 - 1 - cfg.forward_refine * (cfg.nx - 1);
    if (extra < 4 || extra % 2 != 0) {
      throw std::invalid_argument(
          "config: n1 = " + std::to_string(cfg.n1) +
          " does not align the outer mesh with the inner grid; admissible values are "
          "k(nx-1) + 2E + 1 (k = forward_refine, E >= 2 extension cells), e.g. " +
          std::to_string(cfg.forward_refine * (cfg.nx - 1) + 2 * ((extra < 4 ? 4 : extra + 1) / 2) + 1));
    }
    res.extend_cells = extra / 2;
  }
  return res;
}

}  // namespace parec
