#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tayopt/solver.hpp"

namespace tayopt {

// Strict decrease below this many dB does not count as improvement; keeps the
// trust-region state machine from cycling on numerically flat plateaus.
inline constexpr double kImprovementEpsDb = 1e-9;

// Proposed points closer than this normalized distance to an already
// evaluated design are not re-evaluated (keeps the interpolation weights
// well conditioned).
inline constexpr double kMergeToleranceNorm = 1e-9;

// Record of one solver call: inputs, response, derivatives and the derived
// scalar objective.
struct DesignEvaluation {
  DesignVector x;
  ComplexSpectrum spectrum;
  DerivativeSet deriv;
  double objective_db = 0.0;

  // Validates shapes and finiteness; computes the cached objective.
  static DesignEvaluation make(DesignVector x, SolverResponse response, const ObjectiveSpec& spec);
};

DesignEvaluation evaluate_design(const Solver& solver, const DesignVector& x,
                                 const ObjectiveSpec& spec);

// First-order predictor of the complex spectrum anchored at one evaluation:
// linear in the parameters per node, exact at the anchor. Non-owning; the
// anchor must outlive the model.
class TaylorModel {
 public:
  explicit TaylorModel(const DesignEvaluation& anchor) : anchor_(&anchor) {}

  const DesignEvaluation& anchor() const { return *anchor_; }

  std::complex<double> predict_node(std::size_t node, const DesignVector& x) const;
  ComplexSpectrum predict(const DesignVector& x) const;

  double objective(const DesignVector& x, const ObjectiveSpec& spec) const;
  // Same value with the target sampling nodes precomputed by the caller.
  double objective_at(const std::vector<TargetNode>& nodes, const DesignVector& x) const;

 private:
  const DesignEvaluation* anchor_;
};

ComplexSpectrum taylor_predict(const TaylorModel& model, const DesignVector& x);

// Linear re/im prediction assembled into the nonlinear dB objective.
double local_objective(const TaylorModel& model, const DesignVector& x, const ObjectiveSpec& spec);

// Box around the current best in which the local model is trusted. The
// center is kept in physical units, widths in normalized units.
struct TrustRegion {
  DesignVector center;
  std::vector<double> half_width;
  double shrink_factor = 0.5;
  double min_half_width = 1e-4;
};

TrustRegion make_trust_region(const ParameterSpace& space, const DesignVector& center,
                              double initial_half_width = 0.25, double shrink_factor = 0.5,
                              double min_half_width = 1e-4);

struct LocalSearchOptions {
  int grid_per_dim = 33;     // dense seeding for d <= 2
  int random_per_dim = 256;  // seeded cloud size per dimension for d > 2
  double step_tol = 1e-6;    // normalized pattern-search termination
  std::uint64_t seed = 0;
};

// Minimizes the model objective over (trust-region box ∩ bounds) by dense
// seeding plus coordinate-descent polish. Deterministic for a fixed seed;
// ties resolve to the region center.
DesignVector minimize_on_region(const TaylorModel& model, const TrustRegion& region,
                                const ObjectiveSpec& spec, const ParameterSpace& space,
                                const LocalSearchOptions& options = {});

// Optional veto on evaluating a proposed candidate; returning false skips the
// solver call and the step counts as non-improving. Used by the outer driver
// to avoid duplicating existing anchors.
using CandidateFilter = std::function<bool(const DesignVector&)>;

struct TrustRegionAdvance {
  TrustRegion region;
  bool improved = false;
};

// State transition after a candidate outcome: recenter on strict improvement
// over the incumbent objective, then shrink either way; widths saturate at
// the minimum. A missing outcome (vetoed or failed evaluation) counts as
// non-improving.
TrustRegionAdvance advance_trust_region(TrustRegion region, double incumbent_objective_db,
                                        const DesignEvaluation* outcome);

struct LocalStepResult {
  DesignVector candidate;
  std::optional<DesignEvaluation> evaluation;  // empty when the filter vetoed
  TrustRegion region;
  bool improved = false;
};

// One shrinking-search-domain step: model at `best`, surrogate search for a
// candidate, real solver evaluation, then recenter-and-shrink on improvement
// or shrink-in-place otherwise. Widths never drop below min_half_width.
// Requires region.center == best.x.
LocalStepResult local_step(const TrustRegion& region, const DesignEvaluation& best,
                           const Solver& solver, const ObjectiveSpec& spec,
                           const ParameterSpace& space, const LocalSearchOptions& options = {},
                           const CandidateFilter& accept = {});

struct LocalRunConfig {
  int max_steps = 30;
  int stagnation_limit = 3;
  double initial_half_width = 0.25;
  double shrink_factor = 0.5;
  double min_half_width = 1e-4;
  LocalSearchOptions search;
};

// Repeated local steps from an evaluated start until the configured number
// of consecutive non-improving steps or the step budget is hit. Returns all
// evaluations in order, the start first.
std::vector<DesignEvaluation> run_local(const DesignEvaluation& start, const LocalRunConfig& config,
                                        const Solver& solver, const ObjectiveSpec& spec,
                                        const ParameterSpace& space);

}  // namespace tayopt
