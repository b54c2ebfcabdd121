#include "tayopt/driver.hpp"

#include <algorithm>
#include <future>
#include <utility>

#include "tayopt/rng.hpp"

namespace tayopt {

const char* origin_name(Origin origin) {
  switch (origin) {
    case Origin::Doe: return "doe";
    case Origin::Global: return "global";
    case Origin::Local: return "local";
  }
  return "unknown";
}

std::size_t RunHistory::best_index() const {
  if (entries_.empty()) throw std::logic_error("history is empty");
  return best_index_;
}

const DesignEvaluation& RunHistory::best() const { return entries_.at(best_index()).eval; }

void RunHistory::add(int iteration, Origin origin, DesignEvaluation eval) {
  entries_.push_back({iteration, origin, std::move(eval)});
  const std::size_t last = entries_.size() - 1;
  if (last == 0 || entries_[last].eval.objective_db < entries_[best_index_].eval.objective_db)
    best_index_ = last;
}

void OptimizerConfig::validate(const ParameterSpace& space) const {
  if (doe.kind == DoeKind::Lhs) {
    if (doe.size < 2) throw std::invalid_argument("doe size must be at least 2");
  } else {
    if (doe.levels.size() != space.dimension())
      throw std::invalid_argument("doe levels must list one entry per parameter");
    for (const int level : doe.levels)
      if (level < 2) throw std::invalid_argument("doe levels must be at least 2");
  }
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
  if (stagnation_limit < 1) throw std::invalid_argument("stagnation_limit must be at least 1");
  if (!(improvement_tol >= 0.0)) throw std::invalid_argument("improvement_tol must be non-negative");
  if (!(initial_half_width > 0.0) || !(initial_half_width <= 1.0))
    throw std::invalid_argument("initial_half_width must lie in (0, 1]");
  if (!(shrink_factor > 0.0) || !(shrink_factor < 1.0))
    throw std::invalid_argument("shrink_factor must lie in (0, 1)");
  if (!(min_half_width > 0.0) || min_half_width > initial_half_width)
    throw std::invalid_argument("min_half_width must lie in (0, initial_half_width]");
}

RunAborted::RunAborted(const std::string& what, DesignVector failed_design, RunHistory partial)
    : std::runtime_error(what),
      failed_design_(std::move(failed_design)),
      partial_(std::move(partial)) {}

std::vector<DesignVector> doe_points(const OptimizerConfig& config, const ParameterSpace& space) {
  if (config.doe.kind == DoeKind::Lhs)
    return latin_hypercube(space, config.doe.size, config.doe_seed);
  return full_factorial(space, config.doe.levels);
}

OptimizationDriver::OptimizationDriver(OptimizerConfig config, const ParameterSpace& space,
                                       const Solver& solver, const ObjectiveSpec& spec)
    : config_(std::move(config)), space_(space), solver_(solver), spec_(spec) {
  config_.validate(space_);
}

bool OptimizationDriver::finished() const {
  return initialized_ &&
         (iteration_ >= config_.max_iterations || stale_ >= config_.stagnation_limit);
}

void OptimizationDriver::initialize() {
  if (initialized_) throw std::logic_error("driver already initialized");
  const std::vector<DesignVector> points = doe_points(config_, space_);

  std::vector<DesignEvaluation> evals;
  evals.reserve(points.size());
  if (config_.parallel_evals) {
    std::vector<std::future<DesignEvaluation>> futures;
    futures.reserve(points.size());
    for (const DesignVector& x : points)
      futures.push_back(std::async(std::launch::async,
                                   [&, x] { return evaluate_design(solver_, x, spec_); }));
    for (std::size_t i = 0; i < futures.size(); ++i) {
      try {
        evals.push_back(futures[i].get());
      } catch (const SolverError& err) {
        // Later successes are dropped so the partial record does not depend
        // on completion order.
        for (std::size_t k = 0; k < evals.size(); ++k)
          history_.add(0, Origin::Doe, std::move(evals[k]));
        throw RunAborted(std::string("initial design evaluation failed: ") + err.what(),
                         points[i], std::move(history_));
      }
    }
  } else {
    for (const DesignVector& x : points) {
      try {
        evals.push_back(evaluate_design(solver_, x, spec_));
      } catch (const SolverError& err) {
        for (std::size_t k = 0; k < evals.size(); ++k)
          history_.add(0, Origin::Doe, std::move(evals[k]));
        throw RunAborted(std::string("initial design evaluation failed: ") + err.what(), x,
                         std::move(history_));
      }
    }
  }
  for (DesignEvaluation& eval : evals) history_.add(0, Origin::Doe, std::move(eval));
  initialized_ = true;
}

bool OptimizationDriver::near_existing_anchor(const DesignVector& x) const {
  for (const HistoryEntry& entry : history_.entries())
    if (space_.distance(x, entry.eval.x) <= kMergeToleranceNorm) return true;
  return false;
}

DesignVector OptimizationDriver::plan_local_candidate(const DesignEvaluation& best,
                                                      std::uint64_t seed) const {
  const TaylorModel model(best);
  LocalSearchOptions options;
  options.seed = seed;
  return minimize_on_region(model, *region_, spec_, space_, options);
}

IterationReport OptimizationDriver::iterate() {
  if (!initialized_) throw std::logic_error("driver not initialized");
  ++iteration_;

  IterationReport report;
  report.iteration = iteration_;

  // Both candidates derive from the state frozen at iteration entry: the
  // surrogate over all previous evaluations and the incumbent best.
  const DesignEvaluation frozen_best = history_.best();

  if (!region_ || region_->center != frozen_best.x)
    region_ = make_trust_region(space_, frozen_best.x, config_.initial_half_width,
                                config_.shrink_factor, config_.min_half_width);

  std::optional<DesignVector> global_point;
  {
    std::vector<DesignEvaluation> anchors;
    anchors.reserve(history_.size());
    for (const HistoryEntry& entry : history_.entries()) anchors.push_back(entry.eval);
    const GlobalSurrogate surrogate(space_, anchors, spec_);
    const EiResult ei = propose_global_candidate(
        surrogate, frozen_best.objective_db, space_,
        rng::mix(config_.ei_seed, static_cast<std::uint64_t>(iteration_) * 2));
    report.global_ei = ei.ei;
    report.ei_exhausted = ei.exhausted;
    if (!ei.exhausted && !near_existing_anchor(ei.candidate)) global_point = ei.candidate;
  }

  std::optional<DesignVector> local_point = plan_local_candidate(
      frozen_best, rng::mix(config_.ei_seed, static_cast<std::uint64_t>(iteration_) * 2 + 1));
  if (near_existing_anchor(*local_point) ||
      (global_point && normalized_distance(space_.normalize(*global_point),
                                           space_.normalize(*local_point)) <= kMergeToleranceNorm))
    local_point.reset();

  // Evaluate the surviving candidates; a single failure is tolerated, two
  // failures abort the run.
  std::optional<DesignEvaluation> global_eval;
  std::optional<DesignEvaluation> local_eval;
  int failures = 0;
  std::string failure_message;
  DesignVector failed_design;

  const auto note_failure = [&](const SolverError& err) {
    ++failures;
    failure_message = err.what();
    failed_design = err.design();
  };

  if (config_.parallel_evals && global_point && local_point) {
    auto global_future = std::async(std::launch::async, [&] {
      return evaluate_design(solver_, *global_point, spec_);
    });
    auto local_future = std::async(std::launch::async, [&] {
      return evaluate_design(solver_, *local_point, spec_);
    });
    try {
      global_eval = global_future.get();
    } catch (const SolverError& err) {
      note_failure(err);
    }
    try {
      local_eval = local_future.get();
    } catch (const SolverError& err) {
      note_failure(err);
    }
  } else {
    if (global_point) {
      try {
        global_eval = evaluate_design(solver_, *global_point, spec_);
      } catch (const SolverError& err) {
        note_failure(err);
      }
    }
    if (local_point) {
      try {
        local_eval = evaluate_design(solver_, *local_point, spec_);
      } catch (const SolverError& err) {
        note_failure(err);
      }
    }
  }
  if (failures >= 2)
    throw RunAborted("both candidate evaluations failed: " + failure_message, failed_design,
                     history_);

  if (global_eval) {
    report.global_evaluated = true;
    history_.add(iteration_, Origin::Global, std::move(*global_eval));
  }

  const TrustRegionAdvance advance = advance_trust_region(
      *region_, frozen_best.objective_db, local_eval ? &*local_eval : nullptr);
  region_ = advance.region;
  if (local_eval) {
    report.local_evaluated = true;
    history_.add(iteration_, Origin::Local, std::move(*local_eval));
  }

  report.best_db = history_.best().objective_db;
  report.improved = report.best_db < frozen_best.objective_db - config_.improvement_tol;
  if (report.improved)
    stale_ = 0;
  else
    ++stale_;
  report.trust_half_width =
      *std::max_element(region_->half_width.begin(), region_->half_width.end());
  return report;
}

RunHistory initialize(const OptimizerConfig& config, const ParameterSpace& space,
                      const Solver& solver, const ObjectiveSpec& spec) {
  OptimizationDriver driver(config, space, solver, spec);
  driver.initialize();
  return driver.history();
}

RunResult run(const OptimizerConfig& config, const ParameterSpace& space, const Solver& solver,
              const ObjectiveSpec& spec, const ProgressFn& progress) {
  OptimizationDriver driver(config, space, solver, spec);
  driver.initialize();
  RunResult result;
  while (!driver.finished()) {
    const IterationReport report = driver.iterate();
    result.reports.push_back(report);
    if (progress) progress(report);
  }
  result.history = driver.history();
  return result;
}

}  // namespace tayopt
