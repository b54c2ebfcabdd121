#include "tayopt/global_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tayopt/detail/pattern_search.hpp"
#include "tayopt/design_space.hpp"

namespace tayopt {

GlobalSurrogate::GlobalSurrogate(const ParameterSpace& space,
                                 const std::vector<DesignEvaluation>& anchors,
                                 const ObjectiveSpec& spec, SurrogateOptions options)
    : space_(&space), options_(options) {
  if (anchors.empty()) throw std::invalid_argument("surrogate needs at least one anchor");
  if (!(options_.weight_exponent > 0.0))
    throw std::invalid_argument("weight exponent must be positive");
  if (!(options_.regularization_eps > 0.0))
    throw std::invalid_argument("regularization must be positive");

  anchors_.reserve(anchors.size());
  anchors_unit_.reserve(anchors.size());
  for (const DesignEvaluation& a : anchors) {
    if (a.x.size() != space.dimension())
      throw std::invalid_argument("anchor dimension does not match space");
    if (!(a.spectrum.grid == anchors.front().spectrum.grid))
      throw std::invalid_argument("anchors must share one frequency grid");
    anchors_.push_back(&a);
    anchors_unit_.push_back(space.normalize(a.x));
  }
  for (std::size_t i = 0; i < anchors_unit_.size(); ++i)
    for (std::size_t j = i + 1; j < anchors_unit_.size(); ++j)
      if (normalized_distance(anchors_unit_[i], anchors_unit_[j]) <= kMergeToleranceNorm)
        throw std::invalid_argument("anchors must be pairwise distinct");

  nodes_ = locate_targets(anchors.front().spectrum.grid, spec);
}

std::vector<double> GlobalSurrogate::weights(const DesignVector& x) const {
  const std::vector<double> u = space_->normalize(x);
  const double eps2 = options_.regularization_eps * options_.regularization_eps;
  const double half_p = 0.5 * options_.weight_exponent;
  std::vector<double> w(anchors_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double diff = u[k] - anchors_unit_[i][k];
      d2 += diff * diff;
    }
    const double base = d2 + eps2;
    w[i] = (options_.weight_exponent == 4.0) ? 1.0 / (base * base) : std::pow(base, -half_p);
    total += w[i];
  }
  for (double& wi : w) wi /= total;
  return w;
}

ComplexSpectrum GlobalSurrogate::predict(const DesignVector& x) const {
  const std::vector<double> w = weights(x);
  const std::size_t m = anchors_.front()->spectrum.grid.size();
  const std::size_t d = space_->dimension();
  ComplexSpectrum out;
  out.grid = anchors_.front()->spectrum.grid;
  out.re.assign(m, 0.0);
  out.im.assign(m, 0.0);
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    const DesignEvaluation& a = *anchors_[i];
    for (std::size_t k = 0; k < m; ++k) {
      double re = a.spectrum.re[k];
      double im = a.spectrum.im[k];
      for (std::size_t j = 0; j < d; ++j) {
        const double dx = x[j] - a.x[j];
        re += a.deriv.dre(k, j) * dx;
        im += a.deriv.dim(k, j) * dx;
      }
      out.re[k] += w[i] * re;
      out.im[k] += w[i] * im;
    }
  }
  return out;
}

double GlobalSurrogate::objective(const DesignVector& x) const {
  const std::vector<double> w = weights(x);
  const std::size_t d = space_->dimension();
  return objective_at_nodes(nodes_, [&](std::size_t node) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < anchors_.size(); ++i) {
      const DesignEvaluation& a = *anchors_[i];
      double are = a.spectrum.re[node];
      double aim = a.spectrum.im[node];
      for (std::size_t j = 0; j < d; ++j) {
        const double dx = x[j] - a.x[j];
        are += a.deriv.dre(node, j) * dx;
        aim += a.deriv.dim(node, j) * dx;
      }
      re += w[i] * are;
      im += w[i] * aim;
    }
    return std::complex<double>(re, im);
  });
}

double GlobalSurrogate::sigma(const DesignVector& x) const { return scalar(x).sigma; }

GlobalSurrogate::ScalarPrediction GlobalSurrogate::scalar(const DesignVector& x) const {
  ScalarPrediction p;
  p.objective = objective(x);
  const TaylorModel nearest(*anchors_[nearest_anchor(x)]);
  p.sigma = std::abs(p.objective - nearest.objective_at(nodes_, x));
  return p;
}

std::size_t GlobalSurrogate::nearest_anchor(const DesignVector& x) const {
  const std::vector<double> u = space_->normalize(x);
  std::size_t best = 0;
  double best_d = normalized_distance(u, anchors_unit_[0]);
  for (std::size_t i = 1; i < anchors_.size(); ++i) {
    const double d = normalized_distance(u, anchors_unit_[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

double expected_improvement(double objective_best, double objective_approx, double sigma) {
  const double gain = objective_best - objective_approx;
  if (!(sigma >= 1e-12)) return std::max(gain, 0.0);
  const double z = gain / sigma;
  const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.141592653589793238462643383279502884);
  return std::max(gain * cdf + sigma * pdf, 0.0);
}

EiResult propose_global_candidate(const GlobalSurrogate& surrogate, double objective_best,
                                  const ParameterSpace& space, std::uint64_t seed,
                                  const EiSearchOptions& options) {
  const std::size_t d = space.dimension();
  const std::size_t cloud =
      std::min<std::size_t>(static_cast<std::size_t>(options.cloud_per_dim) * d,
                            static_cast<std::size_t>(options.cloud_cap));
  if (cloud == 0) throw std::invalid_argument("candidate cloud must not be empty");

  const auto negative_ei = [&](const std::vector<double>& u) {
    const DesignVector x = space.denormalize(u);
    const auto p = surrogate.scalar(x);
    return -expected_improvement(objective_best, p.objective, p.sigma);
  };

  const std::vector<std::vector<double>> samples = latin_hypercube_unit(cloud, d, seed);
  std::vector<double> best_u = samples.front();
  double best_neg = negative_ei(best_u);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double v = negative_ei(samples[i]);
    if (v < best_neg) {
      best_neg = v;
      best_u = samples[i];
    }
  }

  detail::SearchBox box;
  box.lo.assign(d, 0.0);
  box.hi.assign(d, 1.0);
  const auto polished = detail::pattern_search(negative_ei, best_u, box, 0.125, options.step_tol);
  if (polished.best_value < best_neg) {
    best_neg = polished.best_value;
    best_u = polished.best_point;
  }

  EiResult result;
  result.candidate = space.denormalize(best_u);
  result.ei = -best_neg;
  const auto p = surrogate.scalar(result.candidate);
  result.objective_approx = p.objective;
  result.sigma = p.sigma;
  result.exhausted = !(result.ei >= options.exhaustion_threshold);
  return result;
}

}  // namespace tayopt
