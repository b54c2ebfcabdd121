#include "tayopt/local_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tayopt/detail/pattern_search.hpp"
#include "tayopt/rng.hpp"

namespace tayopt {

namespace {

void require_finite(const std::vector<double>& values, const char* what) {
  for (const double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " contains a non-finite value");
  }
}

}  // namespace

DesignEvaluation DesignEvaluation::make(DesignVector x, SolverResponse response,
                                        const ObjectiveSpec& spec) {
  validate_spectrum(response.spectrum);
  const std::size_t m = response.spectrum.grid.size();
  const std::size_t d = x.size();
  if (d == 0) throw std::invalid_argument("design vector is empty");
  require_finite(x, "design vector");
  const DerivativeSet& deriv = response.deriv;
  if (deriv.nodes != m || deriv.params != d)
    throw std::invalid_argument("derivative block shape does not match spectrum and design");
  if (deriv.re.size() != m * d || deriv.im.size() != m * d)
    throw std::invalid_argument("derivative array length does not match declared shape");
  require_finite(deriv.re, "re derivatives");
  require_finite(deriv.im, "im derivatives");

  DesignEvaluation eval;
  eval.x = std::move(x);
  eval.objective_db = tayopt::objective_db(response.spectrum, spec);
  eval.spectrum = std::move(response.spectrum);
  eval.deriv = std::move(response.deriv);
  return eval;
}

DesignEvaluation evaluate_design(const Solver& solver, const DesignVector& x,
                                 const ObjectiveSpec& spec) {
  return DesignEvaluation::make(x, solver.compute(x), spec);
}

std::complex<double> TaylorModel::predict_node(std::size_t node, const DesignVector& x) const {
  const DesignEvaluation& a = *anchor_;
  const std::size_t d = a.x.size();
  double re = a.spectrum.re[node];
  double im = a.spectrum.im[node];
  for (std::size_t i = 0; i < d; ++i) {
    const double dx = x[i] - a.x[i];
    re += a.deriv.dre(node, i) * dx;
    im += a.deriv.dim(node, i) * dx;
  }
  return {re, im};
}

ComplexSpectrum TaylorModel::predict(const DesignVector& x) const {
  const DesignEvaluation& a = *anchor_;
  if (x.size() != a.x.size()) throw std::invalid_argument("design dimension does not match anchor");
  const std::size_t m = a.spectrum.grid.size();
  ComplexSpectrum out;
  out.grid = a.spectrum.grid;
  out.re.resize(m);
  out.im.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::complex<double> z = predict_node(k, x);
    out.re[k] = z.real();
    out.im[k] = z.imag();
  }
  return out;
}

double TaylorModel::objective(const DesignVector& x, const ObjectiveSpec& spec) const {
  return objective_at(locate_targets(anchor_->spectrum.grid, spec), x);
}

double TaylorModel::objective_at(const std::vector<TargetNode>& nodes,
                                 const DesignVector& x) const {
  return objective_at_nodes(nodes,
                            [&](std::size_t node) { return predict_node(node, x); });
}

ComplexSpectrum taylor_predict(const TaylorModel& model, const DesignVector& x) {
  return model.predict(x);
}

double local_objective(const TaylorModel& model, const DesignVector& x,
                       const ObjectiveSpec& spec) {
  return model.objective(x, spec);
}

TrustRegion make_trust_region(const ParameterSpace& space, const DesignVector& center,
                              double initial_half_width, double shrink_factor,
                              double min_half_width) {
  space.require_in_bounds(center);
  if (!(initial_half_width > 0.0) || !(initial_half_width <= 1.0))
    throw std::invalid_argument("initial half width must lie in (0, 1]");
  if (!(shrink_factor > 0.0) || !(shrink_factor < 1.0))
    throw std::invalid_argument("shrink factor must lie in (0, 1)");
  if (!(min_half_width > 0.0) || min_half_width > initial_half_width)
    throw std::invalid_argument("minimum half width must lie in (0, initial]");
  TrustRegion region;
  region.center = center;
  region.half_width.assign(space.dimension(), initial_half_width);
  region.shrink_factor = shrink_factor;
  region.min_half_width = min_half_width;
  return region;
}

namespace {

// Trust-region box intersected with the unit cube, in normalized units.
detail::SearchBox region_box(const TrustRegion& region, const ParameterSpace& space) {
  const DesignVector center_n = space.normalize(region.center);
  const std::size_t d = center_n.size();
  detail::SearchBox box;
  box.lo.resize(d);
  box.hi.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    box.lo[i] = std::max(0.0, center_n[i] - region.half_width[i]);
    box.hi[i] = std::min(1.0, center_n[i] + region.half_width[i]);
  }
  return box;
}

void shrink(TrustRegion& region) {
  for (double& w : region.half_width)
    w = std::max(region.min_half_width, w * region.shrink_factor);
}

}  // namespace

DesignVector minimize_on_region(const TaylorModel& model, const TrustRegion& region,
                                const ObjectiveSpec& spec, const ParameterSpace& space,
                                const LocalSearchOptions& options) {
  const std::size_t d = space.dimension();
  if (region.center.size() != d || region.half_width.size() != d)
    throw std::invalid_argument("trust region dimension does not match space");
  const detail::SearchBox box = region_box(region, space);
  const std::vector<TargetNode> nodes = locate_targets(model.anchor().spectrum.grid, spec);
  const auto objective = [&](const DesignVector& u) {
    return model.objective_at(nodes, space.denormalize(u));
  };

  DesignVector best_u = space.normalize(region.center);
  for (std::size_t i = 0; i < d; ++i) best_u[i] = std::clamp(best_u[i], box.lo[i], box.hi[i]);
  double best_value = objective(best_u);

  const auto consider = [&](const DesignVector& u) {
    const double value = objective(u);
    if (value < best_value - kImprovementEpsDb) {
      best_value = value;
      best_u = u;
    }
  };

  if (d <= 2) {
    const int n = std::max(2, options.grid_per_dim);
    DesignVector u(d);
    std::vector<int> idx(d, 0);
    for (;;) {
      for (std::size_t i = 0; i < d; ++i)
        u[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * idx[i] / double(n - 1);
      consider(u);
      std::size_t j = d;
      while (j > 0) {
        if (++idx[j - 1] < n) break;
        idx[j - 1] = 0;
        --j;
      }
      if (j == 0) break;
    }
  } else {
    rng::Engine eng(rng::mix(options.seed, 0x10ca15eedULL));
    const int count = options.random_per_dim * static_cast<int>(d);
    DesignVector u(d);
    for (int s = 0; s < count; ++s) {
      for (std::size_t i = 0; i < d; ++i)
        u[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * rng::uniform01(eng);
      consider(u);
    }
  }

  const double max_width = *std::max_element(region.half_width.begin(), region.half_width.end());
  const auto polished =
      detail::pattern_search(objective, best_u, box, 0.25 * max_width, options.step_tol);
  if (polished.best_value < best_value - kImprovementEpsDb) {
    best_u = polished.best_point;
  }
  return space.denormalize(best_u);
}

TrustRegionAdvance advance_trust_region(TrustRegion region, double incumbent_objective_db,
                                        const DesignEvaluation* outcome) {
  TrustRegionAdvance next;
  if (outcome && outcome->objective_db < incumbent_objective_db - kImprovementEpsDb) {
    next.improved = true;
    region.center = outcome->x;
  }
  // Both branches tighten: around the new center on success, in place on
  // failure. Widths saturate at the configured minimum.
  shrink(region);
  next.region = std::move(region);
  return next;
}

LocalStepResult local_step(const TrustRegion& region, const DesignEvaluation& best,
                           const Solver& solver, const ObjectiveSpec& spec,
                           const ParameterSpace& space, const LocalSearchOptions& options,
                           const CandidateFilter& accept) {
  if (region.center != best.x)
    throw std::invalid_argument("trust region must be centered on the incumbent evaluation");

  const TaylorModel model(best);
  LocalStepResult result;
  result.candidate = minimize_on_region(model, region, spec, space, options);

  if (accept && !accept(result.candidate)) {
    result.region = advance_trust_region(region, best.objective_db, nullptr).region;
    return result;
  }

  DesignEvaluation eval = evaluate_design(solver, result.candidate, spec);
  TrustRegionAdvance advance = advance_trust_region(region, best.objective_db, &eval);
  result.improved = advance.improved;
  result.region = std::move(advance.region);
  result.evaluation = std::move(eval);
  return result;
}

std::vector<DesignEvaluation> run_local(const DesignEvaluation& start, const LocalRunConfig& config,
                                        const Solver& solver, const ObjectiveSpec& spec,
                                        const ParameterSpace& space) {
  if (config.max_steps < 0) throw std::invalid_argument("max_steps must be non-negative");
  if (config.stagnation_limit < 1) throw std::invalid_argument("stagnation_limit must be positive");

  std::vector<DesignEvaluation> history;
  history.push_back(start);
  std::size_t best_index = 0;
  TrustRegion region = make_trust_region(space, start.x, config.initial_half_width,
                                         config.shrink_factor, config.min_half_width);

  int stale = 0;
  for (int step = 0; step < config.max_steps && stale < config.stagnation_limit; ++step) {
    LocalSearchOptions options = config.search;
    options.seed = rng::mix(config.search.seed, static_cast<std::uint64_t>(step) + 1);
    LocalStepResult result =
        local_step(region, history[best_index], solver, spec, space, options);
    region = result.region;
    history.push_back(std::move(*result.evaluation));
    if (result.improved) {
      best_index = history.size() - 1;
      stale = 0;
    } else {
      ++stale;
    }
  }
  return history;
}

}  // namespace tayopt
