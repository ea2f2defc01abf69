// fracdual: solve, verify, generate and sweep fractional programs.
//
//   fracdual solve INSTANCE [--output FILE] [solver flags]
//   fracdual verify INSTANCE [--resolution R] [--seed S] [solver flags]
//   fracdual gen --n N --m M --seed S [--conditioning C] [--output FILE]
//   fracdual sweep INSTANCE [--grid N] [--at-mu MU --landscape AxB] [--output FILE]
//
// The THREADS environment variable sets the worker count for the mu grid.
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fracdual/commands.hpp"

namespace {

void add_solver_flags(CLI::App* app, fracdual::SolverOptions& opts) {
  app->add_option("--grid", opts.grid, "Number of mu grid points")->check(CLI::PositiveNumber);
  app->add_option("--max-iter", opts.max_iter, "Iteration cap per dual maximization")
      ->check(CLI::PositiveNumber);
  app->add_option("--tol-gap", opts.tol_gap, "Relative duality-gap tolerance")->check(CLI::PositiveNumber);
  app->add_option("--tol-grad", opts.tol_grad, "Relative projected-gradient tolerance")
      ->check(CLI::PositiveNumber);
  app->add_option("--refine-rounds", opts.refine_rounds, "Golden-section refinement rounds")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--seed", opts.seed, "Seed (recorded in the result; used by the verify oracle)");
}

int threads_from_env() {
  if (const char* env = std::getenv("THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global minimization of f + g/h over an elliptic set via its canonical dual"};
  app.require_subcommand(1);

  fracdual::SolveCommand solve_cmd;
  auto* solve = app.add_subcommand("solve", "Solve an instance and write a result file");
  solve->add_option("instance", solve_cmd.instance_path, "Instance file")->required();
  solve->add_option("-o,--output", solve_cmd.output_path, "Result file ('-' for stdout)");
  add_solver_flags(solve, solve_cmd.options);

  fracdual::VerifyCommand verify_cmd;
  double resolution = 0.0;
  auto* verify = app.add_subcommand("verify", "Compare the solver against the brute-force oracle");
  verify->add_option("instance", verify_cmd.instance_path, "Instance file")->required();
  auto* resolution_opt =
      verify->add_option("--resolution", resolution, "Oracle grid resolution")->check(CLI::PositiveNumber);
  add_solver_flags(verify, verify_cmd.options);

  fracdual::GenCommand gen_cmd;
  auto* gen = app.add_subcommand("gen", "Generate a random valid instance");
  gen->add_option("--n", gen_cmd.generator.n, "Dimension")->required()->check(CLI::PositiveNumber);
  gen->add_option("--m", gen_cmd.generator.m, "Rows of B")->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", gen_cmd.generator.seed, "Random seed");
  gen->add_option("--conditioning", gen_cmd.generator.conditioning, "Weight of A'A in -H")
      ->check(CLI::PositiveNumber);
  gen->add_option("-o,--output", gen_cmd.output_path, "Instance file ('-' for stdout)");

  fracdual::SweepCommand sweep_cmd;
  std::string landscape;
  auto* sweep = app.add_subcommand("sweep", "Dump the mu profile or a dual landscape as CSV");
  sweep->add_option("instance", sweep_cmd.instance_path, "Instance file")->required();
  sweep->add_option("--at-mu", sweep_cmd.at_mu, "Fixed mu for --landscape");
  sweep->add_option("--landscape", landscape, "Landscape size as AxB (varsigma x sigma)");
  sweep->add_option("-o,--output", sweep_cmd.output_path, "CSV file ('-' for stdout)");
  add_solver_flags(sweep, sweep_cmd.options);

  CLI11_PARSE(app, argc, argv);

  const int threads = threads_from_env();
  if (*solve) {
    solve_cmd.options.threads = threads;
    return fracdual::cmd_solve(solve_cmd, std::cout, std::cerr);
  }
  if (*verify) {
    verify_cmd.options.threads = threads;
    verify_cmd.seed = verify_cmd.options.seed;
    if (resolution_opt->count() > 0) verify_cmd.resolution = resolution;
    return fracdual::cmd_verify(verify_cmd, std::cout, std::cerr);
  }
  if (*gen) return fracdual::cmd_gen(gen_cmd, std::cout, std::cerr);
  if (*sweep) {
    sweep_cmd.options.threads = threads;
    if (!landscape.empty()) {
      const auto x = landscape.find('x');
      try {
        if (x == std::string::npos) throw std::invalid_argument(landscape);
        sweep_cmd.landscape_varsigma = std::stoi(landscape.substr(0, x));
        sweep_cmd.landscape_sigma = std::stoi(landscape.substr(x + 1));
      } catch (const std::exception&) {
        std::cerr << "error: --landscape expects AxB, got '" << landscape << "'\n";
        return fracdual::kExitError;
      }
      if (!sweep_cmd.at_mu) {
        std::cerr << "error: --landscape requires --at-mu\n";
        return fracdual::kExitError;
      }
    }
    return fracdual::cmd_sweep(sweep_cmd, std::cout, std::cerr);
  }
  return fracdual::kExitError;
}
