#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tayopt {

struct Parameter {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
};

// One value per parameter, in physical units.
using DesignVector = std::vector<double>;

// Bounded, named parameter domain. All surrogate math, distances and trust
// regions operate in coordinates normalized to the unit hypercube; solver
// calls always receive physical units.
class ParameterSpace {
 public:
  explicit ParameterSpace(std::vector<Parameter> params);

  std::size_t dimension() const { return params_.size(); }
  const std::vector<Parameter>& parameters() const { return params_; }
  const Parameter& parameter(std::size_t i) const { return params_.at(i); }

  bool contains(const DesignVector& x) const;
  void require_in_bounds(const DesignVector& x) const;

  std::vector<double> normalize(const DesignVector& x) const;
  DesignVector denormalize(const std::vector<double>& unit) const;
  DesignVector clamp(DesignVector x) const;
  DesignVector center() const;

  // Euclidean distance between normalized coordinates; zero iff a == b.
  double distance(const DesignVector& a, const DesignVector& b) const;

 private:
  void require_dimension(const std::vector<double>& x) const;

  std::vector<Parameter> params_;
};

// Euclidean distance between two already-normalized coordinate vectors.
double normalized_distance(const std::vector<double>& a, const std::vector<double>& b);

// Cartesian product of equally spaced levels per dimension, both bounds
// included. Deterministic ordering, last dimension varying fastest. Rejects
// products above 10^6 points.
std::vector<DesignVector> full_factorial(const ParameterSpace& space, const std::vector<int>& levels);

// Plain Latin hypercube sample: in every dimension each of the n equal-width
// bins holds exactly one point, placed uniformly at random within its bin.
std::vector<DesignVector> latin_hypercube(const ParameterSpace& space, int n, std::uint64_t seed);

// Unit-cube variant backing latin_hypercube; also used for candidate clouds.
std::vector<std::vector<double>> latin_hypercube_unit(std::size_t n, std::size_t dim, std::uint64_t seed);

}  // namespace tayopt
