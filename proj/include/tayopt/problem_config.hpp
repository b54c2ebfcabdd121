#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tayopt/driver.hpp"
#include "tayopt/testbed.hpp"

namespace tayopt {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BuiltinSolverConfig {
  std::string instance;
  double derivative_scale = 1.0;
  double q_scale = 1.0;
};

struct GridBand {
  double lo_ghz = 0.0;
  double hi_ghz = 0.0;
  int points = 101;
};

struct ExternalSolverConfig {
  std::string command;
  std::string workdir = ".";
  std::vector<GridBand> bands;
};

// Parsed problem description; see README for the schema. Builtin problems
// may omit parameters and objective (the instance supplies them); external
// problems must state both.
struct ProblemConfig {
  std::optional<BuiltinSolverConfig> builtin;
  std::optional<ExternalSolverConfig> external;
  std::optional<std::vector<Parameter>> parameters;
  std::optional<std::vector<double>> targets_ghz;
  OptimizerConfig optimizer;
  std::string output_dir = "out";

  // Both throw ConfigError with the offending key and, when locatable, its
  // line in the source text. Overrides are dotted KEY=VALUE paths applied
  // onto the document before validation, later entries winning.
  static ProblemConfig parse_file(const std::string& path,
                                  const std::vector<std::string>& overrides = {});
  static ProblemConfig parse_text(const std::string& text,
                                  const std::vector<std::string>& overrides = {});
};

// Ready-to-run problem assembled from a config.
struct Problem {
  ParameterSpace space;
  ObjectiveSpec objective;
  std::shared_ptr<Solver> solver;
  std::shared_ptr<ResonatorModel> builtin_model;  // null when external
  OptimizerConfig optimizer;
  std::string output_dir;
};

Problem materialize(const ProblemConfig& config);

}  // namespace tayopt
