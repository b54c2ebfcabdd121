#include "tayopt/design_space.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tayopt/rng.hpp"

namespace tayopt {

ParameterSpace::ParameterSpace(std::vector<Parameter> params) : params_(std::move(params)) {
  if (params_.empty()) {
    throw std::invalid_argument("ParameterSpace: at least one parameter required");
  }
  std::set<std::string> names;
  for (const Parameter& p : params_) {
    if (p.name.empty()) {
      throw std::invalid_argument("ParameterSpace: parameter name must not be empty");
    }
    if (!names.insert(p.name).second) {
      throw std::invalid_argument("ParameterSpace: duplicate parameter name '" + p.name + "'");
    }
    if (!std::isfinite(p.lower) || !std::isfinite(p.upper) || !(p.lower < p.upper)) {
      throw std::invalid_argument("ParameterSpace: parameter '" + p.name +
                                  "' requires finite lower < upper");
    }
  }
}

void ParameterSpace::require_dimension(const std::vector<double>& x) const {
  if (x.size() != params_.size()) {
    std::ostringstream msg;
    msg << "dimension mismatch: expected " << params_.size() << " values, got " << x.size();
    throw std::invalid_argument(msg.str());
  }
}

bool ParameterSpace::contains(const DesignVector& x) const {
  if (x.size() != params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!(x[i] >= params_[i].lower && x[i] <= params_[i].upper)) return false;
  }
  return true;
}

void ParameterSpace::require_in_bounds(const DesignVector& x) const {
  require_dimension(x);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!(x[i] >= params_[i].lower && x[i] <= params_[i].upper)) {
      std::ostringstream msg;
      msg << "design out of bounds: " << params_[i].name << " = " << x[i] << " not in ["
          << params_[i].lower << ", " << params_[i].upper << "]";
      throw std::invalid_argument(msg.str());
    }
  }
}

std::vector<double> ParameterSpace::normalize(const DesignVector& x) const {
  require_in_bounds(x);
  std::vector<double> unit(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    unit[i] = (x[i] - params_[i].lower) / (params_[i].upper - params_[i].lower);
  }
  return unit;
}

DesignVector ParameterSpace::denormalize(const std::vector<double>& unit) const {
  require_dimension(unit);
  DesignVector x(unit.size());
  for (std::size_t i = 0; i < unit.size(); ++i) {
    // Convex form is exact at both endpoints.
    x[i] = params_[i].lower * (1.0 - unit[i]) + params_[i].upper * unit[i];
  }
  return x;
}

DesignVector ParameterSpace::clamp(DesignVector x) const {
  require_dimension(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < params_[i].lower) x[i] = params_[i].lower;
    if (x[i] > params_[i].upper) x[i] = params_[i].upper;
  }
  return x;
}

DesignVector ParameterSpace::center() const {
  DesignVector x(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    x[i] = 0.5 * (params_[i].lower + params_[i].upper);
  }
  return x;
}

double ParameterSpace::distance(const DesignVector& a, const DesignVector& b) const {
  return normalized_distance(normalize(a), normalize(b));
}

double normalized_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("normalized_distance: dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

std::vector<DesignVector> full_factorial(const ParameterSpace& space, const std::vector<int>& levels) {
  if (levels.size() != space.dimension()) {
    throw std::invalid_argument("full_factorial: one level count per dimension required");
  }
  std::size_t count = 1;
  for (int l : levels) {
    if (l < 2) throw std::invalid_argument("full_factorial: every dimension needs >= 2 levels");
    count *= static_cast<std::size_t>(l);
    if (count > 1000000u) throw std::invalid_argument("full_factorial: more than 10^6 points");
  }

  const std::size_t d = space.dimension();
  std::vector<DesignVector> points;
  points.reserve(count);
  std::vector<int> index(d, 0);
  for (std::size_t n = 0; n < count; ++n) {
    std::vector<double> unit(d);
    for (std::size_t i = 0; i < d; ++i) {
      unit[i] = static_cast<double>(index[i]) / static_cast<double>(levels[i] - 1);
    }
    points.push_back(space.denormalize(unit));
    // Odometer increment, last dimension fastest.
    for (std::size_t i = d; i-- > 0;) {
      if (++index[i] < levels[i]) break;
      index[i] = 0;
    }
  }
  return points;
}

std::vector<std::vector<double>> latin_hypercube_unit(std::size_t n, std::size_t dim, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("latin_hypercube: n >= 1 required");
  rng::Engine eng(seed);
  std::vector<std::vector<double>> points(n, std::vector<double>(dim));
  std::vector<std::size_t> bins(n);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < n; ++j) bins[j] = j;
    rng::shuffle(bins, eng);
    for (std::size_t j = 0; j < n; ++j) {
      points[j][i] = (static_cast<double>(bins[j]) + rng::uniform01(eng)) / static_cast<double>(n);
    }
  }
  return points;
}

std::vector<DesignVector> latin_hypercube(const ParameterSpace& space, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("latin_hypercube: n >= 1 required");
  const auto unit = latin_hypercube_unit(static_cast<std::size_t>(n), space.dimension(), seed);
  std::vector<DesignVector> points;
  points.reserve(unit.size());
  for (const auto& u : unit) points.push_back(space.denormalize(u));
  return points;
}

}  // namespace tayopt
