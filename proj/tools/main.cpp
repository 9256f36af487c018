#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parec/artifacts.hpp"
#include "parec/carleman_check.hpp"
#include "parec/config.hpp"
#include "parec/errors.hpp"
#include "parec/inversion.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitBlowup = 4;

bool parse_point(const std::string& text, double& x, double& y) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return false;
  try {
    x = std::stod(text.substr(0, comma));
    y = std::stod(text.substr(comma + 1));
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

int run_command(const std::string& target, parec::RunConfig cfg, const std::string& preset,
                const std::string& x0_text) {
  if (!x0_text.empty() && !parse_point(x0_text, cfg.x0_x, cfg.x0_y)) {
    std::cerr << "parec: bad --x0, expected \"x,y\"\n";
    return kExitConfig;
  }
  if (std::filesystem::exists(target) && target.size() > 5 &&
      target.substr(target.size() - 5) == ".json") {
    parec::RunConfig file_cfg = parec::load_config(target);
    // Command-line overrides apply on top of the file.
    file_cfg.out_dir = cfg.out_dir;
    if (cfg.seed != 1) file_cfg.seed = cfg.seed;
    if (cfg.noise >= 0.0) file_cfg.noise = cfg.noise;
    if (cfg.jobs > 0) file_cfg.jobs = cfg.jobs;
    cfg = file_cfg;
  } else {
    cfg.scenario = target;
  }
  if (preset == "desk") {
    cfg = parec::apply_desk_preset(cfg);
  } else if (!preset.empty()) {
    std::cerr << "parec: unknown preset \"" << preset << "\"\n";
    return kExitConfig;
  }

  const parec::ReconstructionResult result = parec::run(cfg);
  parec::write_run_artifacts(cfg.out_dir, cfg, result);

  std::printf("scenario %s: %d iterations, omega = %.6g\n", result.scenario_name.c_str(),
              int(result.iterations.size()) - 1, result.omega);
  for (const auto& im : result.metrics.inclusions) {
    std::printf("  %-12s true %-8.6g computed %-10.6g relative error %.2f%%\n",
                im.label.c_str(), im.true_max, im.reconstructed_max,
                100.0 * im.relative_error);
  }
  if (!result.metrics.recursive_errors.empty()) {
    std::printf("  recursive errors:");
    for (double e : result.metrics.recursive_errors) std::printf(" %.3g", e);
    std::printf("\n");
  }
  std::printf("  artifacts in %s\n", cfg.out_dir.c_str());
  return kExitOk;
}

int carleman_command(double lambda_min, double lambda_max, int samples,
                     const std::string& family, double wave_number, double beta, double scale,
                     const std::string& x0_text, double half_width, int quad_nodes,
                     const std::string& out_dir) {
  parec::CarlemanParams params;
  params.beta = beta;
  params.scale = scale;
  if (!x0_text.empty() && !parse_point(x0_text, params.anchor[0], params.anchor[1])) {
    std::cerr << "parec: bad --x0, expected \"x,y\"\n";
    return kExitConfig;
  }
  std::vector<parec::CarlemanTestFunction> functions;
  if (family == "default") {
    functions = parec::default_test_family(half_width);
  } else if (family == "poly") {
    functions = {parec::polynomial_test(half_width)};
  } else if (family == "cosine") {
    functions = {parec::cosine_test(half_width, 1.0, wave_number)};
  } else {
    std::cerr << "parec: unknown family \"" << family << "\" (default|poly|cosine)\n";
    return kExitConfig;
  }

  std::vector<parec::InequalityReport> reports;
  for (const auto& fn : functions) {
    reports.push_back(parec::check_inequality(fn, params, half_width, lambda_min, lambda_max,
                                              samples, quad_nodes));
  }
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/carleman_report.csv";
  std::ofstream out(path, std::ios::binary);
  parec::write_carleman_csv(out, reports);

  bool all_positive = true;
  for (const auto& report : reports) {
    for (const auto& row : report.rows) {
      if (!row.degenerate && !(row.c_hat > 0.0)) all_positive = false;
    }
  }
  std::printf("carleman report (%zu functions, %d lambdas) -> %s; empirical constant %s\n",
              reports.size(), samples, path.c_str(),
              all_positive ? "positive throughout" : "NOT positive");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Initial-condition reconstruction for quasilinear parabolic equations "
               "from boundary Cauchy data"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Synthesize data and run the reconstruction pipeline");
  std::string target = "test1";
  std::string preset, x0_text;
  parec::RunConfig cfg;
  run->add_option("scenario", target, "Builtin scenario name or JSON config path");
  run->add_option("--nx", cfg.nx, "Inner grid nodes per axis");
  run->add_option("--modes", cfg.modes, "Number of time-basis modes");
  run->add_option("--nq", cfg.quad_nodes, "Quadrature nodes (odd)");
  run->add_option("--n1", cfg.n1, "Outer mesh nodes per axis (must align; 0 = auto)");
  run->add_option("--refine", cfg.forward_refine, "Outer mesh refinement factor");
  run->add_option("--lambda", cfg.lambda, "Carleman weight strength");
  run->add_option("--beta", cfg.beta, "Carleman weight exponent");
  run->add_option("--b", cfg.weight_scale, "Carleman weight scale");
  run->add_option("--x0", x0_text, "Carleman anchor point \"x,y\"");
  run->add_option("--omega", cfg.omega, "Soft-constraint weight (0 = auto)");
  run->add_option("--noise", cfg.noise, "Noise level (overrides scenario)");
  run->add_option("--seed", cfg.seed, "Noise seed");
  run->add_option("--iters", cfg.iterations, "Iteration count K");
  run->add_option("--q", cfg.q, "Nonlinearity label or expression override");
  run->add_option("--c", cfg.c, "Coefficient label override (paper|constant:<v>)");
  run->add_option("--safety", cfg.safety, "Explicit-step safety factor (<= 0.95)");
  run->add_option("--solver-tol", cfg.solver_tol, "Least-squares relative tolerance");
  run->add_option("--solver-maxit", cfg.solver_maxit, "Least-squares iteration cap");
  run->add_option("--out", cfg.out_dir, "Output directory");
  run->add_option("--preset", preset, "Named preset (desk)");
  run->add_option("--jobs", cfg.jobs, "Worker threads (0 = auto, capped by CR_THREADS)");
  run->add_flag("--early-stop", cfg.early_stop, "Stop when the recursive error stalls");
  run->add_flag("--dump-cauchy", cfg.dump_cauchy, "Dump the boundary record CSV");
  run->add_flag("--dump-system", cfg.dump_system, "Dump the system in triplet form");

  // carleman-check
  auto* check = app.add_subcommand("carleman-check", "Probe the weighted coercivity inequality");
  double lambda_min = 40.0, lambda_max = 400.0, wave_number = 1.0;
  int samples = 7, quad_nodes = 401;
  double beta = 10.0, scale = 5.0, half_width = 1.0;
  std::string family = "default", check_x0, check_out = "out";
  check->add_option("--lambda-min", lambda_min, "Sweep start");
  check->add_option("--lambda-max", lambda_max, "Sweep end");
  check->add_option("--samples", samples, "Sweep points (geometric)");
  check->add_option("--family", family, "Test family: default|poly|cosine");
  check->add_option("--k", wave_number, "Cosine modulation wave number");
  check->add_option("--beta", beta, "Weight exponent");
  check->add_option("--b", scale, "Weight scale");
  check->add_option("--x0", check_x0, "Weight anchor \"x,y\"");
  check->add_option("--R", half_width, "Domain half-width");
  check->add_option("--quad-nodes", quad_nodes, "Simpson nodes per axis (odd, >= 401)");
  check->add_option("--out", check_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(target, cfg, preset, x0_text);
    return carleman_command(lambda_min, lambda_max, samples, family, wave_number, beta, scale,
                            check_x0, half_width, quad_nodes, check_out);
  } catch (const parec::BlowupError& e) {
    std::cerr << "parec: numerical blow-up: " << e.what() << "\n";
    return kExitBlowup;
  } catch (const parec::SolverError& e) {
    std::cerr << "parec: solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "parec: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "parec: error: " << e.what() << "\n";
    return 1;
  }
}
