#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "tayopt/design_space.hpp"
#include "tayopt/spectrum.hpp"

namespace tayopt {

// Per-frequency partial derivatives of the response with respect to the
// design parameters, in physical units. Node-major storage: the entry for
// frequency node k and parameter i lives at k * params + i.
struct DerivativeSet {
  std::size_t nodes = 0;
  std::size_t params = 0;
  std::vector<double> re;
  std::vector<double> im;

  double dre(std::size_t k, std::size_t i) const { return re[k * params + i]; }
  double dim(std::size_t k, std::size_t i) const { return im[k * params + i]; }
};

// One solver call: complex spectrum plus its analytical derivatives.
struct SolverResponse {
  ComplexSpectrum spectrum;
  DerivativeSet deriv;
};

// Solver failures carry the design vector that caused them.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, DesignVector x)
      : std::runtime_error(what), design_(std::move(x)) {}
  const DesignVector& design() const { return design_; }

 private:
  DesignVector design_;
};

class Solver {
 public:
  virtual ~Solver() = default;
  virtual SolverResponse compute(const DesignVector& x) const = 0;
};

}  // namespace tayopt
