#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tayopt/commands.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iters;
  std::optional<int> stagnation;
  std::optional<bool> parallel;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "problem description JSON")->required();
  cmd->add_option("--out", f.out, "output directory, overrides config output_dir");
  cmd->add_option("--seed", f.seed, "run seed N; sets doe_seed=N and ei_seed=N+1");
  cmd->add_option("--max-iters", f.max_iters, "refinement iteration budget");
  cmd->add_option("--stagnation", f.stagnation, "iterations without improvement before stopping");
  cmd->add_option("--parallel", f.parallel, "evaluate candidates concurrently (true/false)");
  cmd->add_option("--set", f.sets,
                  "config override KEY=VALUE with dotted path, repeatable; applied last");
}

// Sugar flags become overrides first, explicit --set entries last so they
// win.
std::vector<std::string> to_overrides(const CommonFlags& f) {
  std::vector<std::string> overrides;
  if (!f.out.empty()) overrides.push_back("output_dir=" + f.out);
  if (f.seed) {
    overrides.push_back("optimizer.doe_seed=" + std::to_string(*f.seed));
    overrides.push_back("optimizer.ei_seed=" + std::to_string(*f.seed + 1));
  }
  if (f.max_iters)
    overrides.push_back("optimizer.max_iterations=" + std::to_string(*f.max_iters));
  if (f.stagnation)
    overrides.push_back("optimizer.stagnation_limit=" + std::to_string(*f.stagnation));
  if (f.parallel)
    overrides.push_back(std::string("optimizer.parallel_evals=") +
                        (*f.parallel ? "true" : "false"));
  overrides.insert(overrides.end(), f.sets.begin(), f.sets.end());
  return overrides;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surrogate-based global optimizer for frequency-domain responses"};
  app.require_subcommand(1);

  CommonFlags optimize_flags;
  CLI::App* optimize = app.add_subcommand("optimize", "run the optimization loop");
  add_common(optimize, optimize_flags);

  CommonFlags surface_flags;
  int resolution = 101;
  CLI::App* surface =
      app.add_subcommand("surface", "dump the initial surrogate surface of a 2-parameter problem");
  add_common(surface, surface_flags);
  surface->add_option("--resolution", resolution, "grid points per axis (default 101)");

  CommonFlags check_flags;
  CLI::App* check = app.add_subcommand("check", "verify analytic derivatives by finite differences");
  add_common(check, check_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? tayopt::kExitOk : tayopt::kExitConfigError;
  }

  if (optimize->parsed())
    return tayopt::cmd_optimize(optimize_flags.config, to_overrides(optimize_flags), std::cout,
                                std::cerr);
  if (surface->parsed())
    return tayopt::cmd_surface(surface_flags.config, to_overrides(surface_flags), resolution,
                               std::cout, std::cerr);
  return tayopt::cmd_check(check_flags.config, to_overrides(check_flags), std::cout, std::cerr);
}
