#pragma once

#include <cstdint>
#include <vector>

#include "tayopt/local_model.hpp"

namespace tayopt {

struct SurrogateOptions {
  double weight_exponent = 4.0;     // inverse-distance power p
  double regularization_eps = 1e-5; // keeps weights finite at the anchors
};

// Global predictor blending one first-order model per evaluated design with
// normalized inverse-distance weights: w_i(x) ~ (|x - x_i|^2 + eps^2)^(-p/2)
// on normalized coordinates. Reproduces every anchor spectrum (up to the
// regularization) and falls back to a distance-weighted average far away.
// Non-owning; the anchor evaluations must outlive the surrogate.
class GlobalSurrogate {
 public:
  GlobalSurrogate(const ParameterSpace& space, const std::vector<DesignEvaluation>& anchors,
                  const ObjectiveSpec& spec, SurrogateOptions options = {});

  std::size_t anchor_count() const { return anchors_.size(); }
  const DesignEvaluation& anchor(std::size_t i) const { return *anchors_[i]; }
  const std::vector<TargetNode>& target_nodes() const { return nodes_; }

  // Normalized weights; non-negative and summing to one.
  std::vector<double> weights(const DesignVector& x) const;

  ComplexSpectrum predict(const DesignVector& x) const;

  // Objective of the blended prediction, evaluated only at the nodes the
  // targets touch.
  double objective(const DesignVector& x) const;

  // Model disagreement used as the uncertainty input to expected
  // improvement: |global objective - objective of the nearest anchor's own
  // first-order model|. Near zero at the anchors, grows where the local
  // models disagree.
  double sigma(const DesignVector& x) const;

  struct ScalarPrediction {
    double objective = 0.0;
    double sigma = 0.0;
  };
  // objective() and sigma() in one pass; the acquisition search hot path.
  ScalarPrediction scalar(const DesignVector& x) const;

  // Index of the closest anchor in normalized distance; ties resolve to the
  // lowest index.
  std::size_t nearest_anchor(const DesignVector& x) const;

 private:
  const ParameterSpace* space_;
  std::vector<const DesignEvaluation*> anchors_;
  std::vector<std::vector<double>> anchors_unit_;
  std::vector<TargetNode> nodes_;
  SurrogateOptions options_;
};

// Expected improvement of a Gaussian belief N(objective_approx, sigma^2)
// below the incumbent objective_best. Non-negative; collapses to
// max(objective_best - objective_approx, 0) when sigma vanishes.
double expected_improvement(double objective_best, double objective_approx, double sigma);

struct EiResult {
  DesignVector candidate;
  double ei = 0.0;
  double objective_approx = 0.0;
  double sigma = 0.0;
  bool exhausted = false;  // best achievable EI fell below the threshold
};

struct EiSearchOptions {
  int cloud_per_dim = 4096;
  int cloud_cap = 50000;
  double step_tol = 1e-6;
  double exhaustion_threshold = 1e-15;
};

// Maximizes expected improvement over the whole design space: seeded
// Latin-hypercube cloud plus coordinate-descent polish from the cloud
// optimum. Deterministic for a fixed seed; the returned EI is never below
// the best cloud value.
EiResult propose_global_candidate(const GlobalSurrogate& surrogate, double objective_best,
                                  const ParameterSpace& space, std::uint64_t seed,
                                  const EiSearchOptions& options = {});

}  // namespace tayopt
