#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tayopt/driver.hpp"

namespace tayopt {

// Exit codes shared by all commands:
//   0  success
//   1  check threshold exceeded
//   2  configuration or environment error
//   3  solver failure
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSolverError = 3;

// Artifact writers used by cmd_optimize; exposed for direct testing. All
// reals print with 17 significant digits so parsed values round-trip
// exactly.
void write_history_csv(std::ostream& out, const RunHistory& history, const ParameterSpace& space);
void write_best_json(std::ostream& out, const RunHistory& history, const ParameterSpace& space);

// Runs the optimization described by the config (plus KEY=VALUE overrides)
// and writes history.csv, best.json, best_spectrum.csv and progress.log into
// the configured output directory. Artifacts are deterministic: a rerun with
// identical inputs rewrites byte-identical files.
int cmd_optimize(const std::string& config_path, const std::vector<std::string>& overrides,
                 std::ostream& out, std::ostream& err);

// Evaluates the initial design set only, then dumps the blended surrogate
// objective and its uncertainty on a resolution x resolution grid to
// surface.csv. Two-parameter problems only.
int cmd_surface(const std::string& config_path, const std::vector<std::string>& overrides,
                int resolution, std::ostream& out, std::ostream& err);

// Verifies analytic derivatives against finite differences at 20 seeded
// random interior points; fails when the worst error exceeds 1e-5. Builtin
// solver instances only.
int cmd_check(const std::string& config_path, const std::vector<std::string>& overrides,
              std::ostream& out, std::ostream& err);

}  // namespace tayopt
