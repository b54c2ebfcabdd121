#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tayopt/global_model.hpp"
#include "tayopt/local_model.hpp"

namespace tayopt {

enum class Origin { Doe, Global, Local };

// Stable tags used in history exports.
const char* origin_name(Origin origin);

struct HistoryEntry {
  int iteration = 0;  // 0 for the initial design set
  Origin origin = Origin::Doe;
  DesignEvaluation eval;
};

// Ordered record of every solver call in a run; one entry per call.
class RunHistory {
 public:
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<HistoryEntry>& entries() const { return entries_; }
  const HistoryEntry& entry(std::size_t i) const { return entries_.at(i); }

  std::size_t best_index() const;
  const DesignEvaluation& best() const;

  // Appends and re-points best on strict objective decrease, so the best
  // index is always the earliest minimum.
  void add(int iteration, Origin origin, DesignEvaluation eval);

 private:
  std::vector<HistoryEntry> entries_;
  std::size_t best_index_ = 0;
};

enum class DoeKind { Lhs, FullFactorial };

struct DoeConfig {
  DoeKind kind = DoeKind::Lhs;
  int size = 20;            // Latin hypercube point count
  std::vector<int> levels;  // full factorial per-dimension levels
};

struct OptimizerConfig {
  DoeConfig doe;
  int max_iterations = 15;
  int stagnation_limit = 5;
  double improvement_tol = 1e-6;  // dB decrease that counts as progress
  double initial_half_width = 0.25;
  double shrink_factor = 0.5;
  double min_half_width = 1e-4;
  std::uint64_t doe_seed = 1;
  std::uint64_t ei_seed = 2;
  bool parallel_evals = false;

  // Throws std::invalid_argument with a specific message on any bad field.
  void validate(const ParameterSpace& space) const;
};

struct IterationReport {
  int iteration = 0;
  double best_db = 0.0;          // after the iteration
  double global_ei = 0.0;
  bool ei_exhausted = false;
  bool global_evaluated = false;
  bool local_evaluated = false;
  bool improved = false;
  double trust_half_width = 0.0;  // max component after the step
};

using ProgressFn = std::function<void(const IterationReport&)>;

// Thrown when candidate evaluation fails hard; carries whatever completed.
class RunAborted : public std::runtime_error {
 public:
  RunAborted(const std::string& what, DesignVector failed_design, RunHistory partial);
  const DesignVector& failed_design() const { return failed_design_; }
  const RunHistory& partial_history() const { return partial_; }

 private:
  DesignVector failed_design_;
  RunHistory partial_;
};

// The outer loop: design-of-experiments initialization, then per iteration
// one acquisition-driven global candidate and one trust-region local
// candidate, stopping on stagnation or the iteration budget.
class OptimizationDriver {
 public:
  OptimizationDriver(OptimizerConfig config, const ParameterSpace& space, const Solver& solver,
                     const ObjectiveSpec& spec);

  const RunHistory& history() const { return history_; }
  int iterations_done() const { return iteration_; }
  bool finished() const;

  // Evaluates the initial design set (concurrently when configured); all
  // entries carry origin "doe" and iteration 0.
  void initialize();

  // One refinement iteration; requires initialize() first. Appends at most
  // two evaluations.
  IterationReport iterate();

 private:
  DesignVector plan_local_candidate(const DesignEvaluation& best, std::uint64_t seed) const;
  bool near_existing_anchor(const DesignVector& x) const;

  OptimizerConfig config_;
  const ParameterSpace& space_;
  const Solver& solver_;
  const ObjectiveSpec& spec_;
  RunHistory history_;
  std::optional<TrustRegion> region_;
  int iteration_ = 0;
  int stale_ = 0;
  bool initialized_ = false;
};

// Generates the configured initial design set (points only, not evaluated).
std::vector<DesignVector> doe_points(const OptimizerConfig& config, const ParameterSpace& space);

// Convenience wrappers mirroring the driver phases.
RunHistory initialize(const OptimizerConfig& config, const ParameterSpace& space,
                      const Solver& solver, const ObjectiveSpec& spec);

struct RunResult {
  RunHistory history;
  std::vector<IterationReport> reports;
};

RunResult run(const OptimizerConfig& config, const ParameterSpace& space, const Solver& solver,
              const ObjectiveSpec& spec, const ProgressFn& progress = {});

}  // namespace tayopt
