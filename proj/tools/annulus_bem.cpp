// Batch front-end for the layered-medium boundary-element solver.
//
//   annulus_bem verify   --config problem.json [--out DIR] [--nodes N]
//   annulus_bem solve    --config problem.json [--out DIR] [--nodes N] [--seed-branch S]
//   annulus_bem continue --config problem.json [--out DIR] [--nodes N] [--seed-branch S]
//   annulus_bem radial   --config problem.json [--out DIR]
//
// Exit codes: 0 success, 1 numerical failure (non-convergence or guard),
// 2 usage or config error.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "annulus/errors.hpp"
#include "annulus/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  int nodes = 0;
  std::string seed;
};

void add_common(CLI::App* sub, CommonArgs& args, bool with_seed) {
  sub->add_option("--config", args.config_path, "Problem config (JSON)")->required();
  sub->add_option("--out", args.out_dir, "Output directory (default: current)");
  sub->add_option("--nodes", args.nodes, "Override both boundary node counts");
  if (with_seed) {
    sub->add_option("--seed-branch", args.seed, "Initial iterate: zero | radial:T");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-phase boundary-element transmission solver"};
  app.require_subcommand(1);

  CommonArgs verify_args, solve_args, continue_args, radial_args;
  CLI::App* verify = app.add_subcommand("verify", "Run the operator identity suite");
  add_common(verify, verify_args, false);
  CLI::App* solve = app.add_subcommand("solve", "Solve the general transmission problem");
  add_common(solve, solve_args, true);
  CLI::App* cont = app.add_subcommand("continue", "Trace the perturbed branch in epsilon");
  add_common(cont, continue_args, true);
  CLI::App* radial = app.add_subcommand("radial", "Closed-form concentric benchmark");
  add_common(radial, radial_args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const CommonArgs* args = nullptr;
  int (*command)(const annulus::ProblemConfig&, const std::string&) = nullptr;
  if (verify->parsed()) {
    args = &verify_args;
    command = annulus::cmd_verify;
  } else if (solve->parsed()) {
    args = &solve_args;
    command = annulus::cmd_solve;
  } else if (cont->parsed()) {
    args = &continue_args;
    command = annulus::cmd_continue;
  } else {
    args = &radial_args;
    command = annulus::cmd_radial;
  }

  try {
    annulus::ProblemConfig cfg = annulus::load_config(args->config_path);
    annulus::RunOverrides overrides;
    if (args->nodes > 0) overrides.nodes = args->nodes;
    if (!args->seed.empty()) overrides.seed = annulus::parse_seed(args->seed);
    annulus::apply_overrides(cfg, overrides);
    return command(cfg, args->out_dir);
  } catch (const annulus::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
