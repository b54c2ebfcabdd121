#pragma once

#include <complex>
#include <string>
#include <vector>

#include "tayopt/solver.hpp"

namespace tayopt {

// Derivative components where both the analytic and the finite-difference
// value fall below this magnitude carry no signal and are exempt from the
// error comparison.
inline constexpr double kFdExemptBelow = 1e-9;

struct Resonance {
  double f0_ghz = 1.0;            // unshifted resonant frequency
  double q = 10.0;                // quality factor, controls notch width
  std::complex<double> coupling;  // unshifted coupling amplitude
};

// Analytic multi-resonator reflection response standing in for a field
// simulator:
//
//   S(f; x) = 1 - sum_k c_k(x) / (1 + 2j Q_k (f - f_k(x)) / f_k(x))
//   f_k(x)  = f0_k (1 + sum_i g[k][i] xhat_i)
//   c_k(x)  = c0_k (1 + sum_i h[k][i] xhat_i)
//   xhat    = 2 normalize(x) - 1
//
// with exact chain-rule derivatives per frequency node and parameter.
// Deterministic and pure; concurrent calls are safe.
class ResonatorModel : public Solver {
 public:
  ResonatorModel(std::string name, ParameterSpace space, FrequencyGrid grid,
                 std::vector<Resonance> resonances,
                 std::vector<std::vector<double>> freq_sensitivity,
                 std::vector<std::vector<double>> coupling_sensitivity, ObjectiveSpec objective);

  const std::string& name() const { return name_; }
  const ParameterSpace& space() const { return space_; }
  const FrequencyGrid& grid() const { return grid_; }
  const ObjectiveSpec& objective() const { return objective_; }
  std::size_t resonance_count() const { return resonances_.size(); }

  SolverResponse compute(const DesignVector& x) const override;

  // Response value at one frequency, identical arithmetic to compute().
  std::complex<double> response_at(double f_ghz, const DesignVector& x) const;

  // True objective without derivative assembly; touches only the grid nodes
  // the targets need and matches objective_db(compute(x).spectrum, ...) bit
  // for bit. Used by the brute-force oracles.
  double objective_probe(const DesignVector& x) const;
  double objective_probe(const DesignVector& x, const std::vector<TargetNode>& nodes) const;

  // Multiplies only the reported derivative arrays; spectra are untouched.
  // A scale != 1 deliberately breaks derivative consistency for negative
  // tests of the derivative checker.
  void set_derivative_scale(double scale) { derivative_scale_ = scale; }

  // Sharpens or widens every notch consistently in values and derivatives.
  void set_q_scale(double scale);

 private:
  struct ResonanceState {
    std::complex<double> c;  // coupled amplitude c_k(x)
    double f = 1.0;          // shifted resonant frequency f_k(x)
    double q = 1.0;          // effective quality factor
  };

  std::vector<ResonanceState> resolve(const DesignVector& x) const;
  std::complex<double> value_at(double f_ghz, const std::vector<ResonanceState>& st) const;

  std::string name_;
  ParameterSpace space_;
  FrequencyGrid grid_;
  std::vector<Resonance> resonances_;
  std::vector<std::vector<double>> freq_sens_;
  std::vector<std::vector<double>> coupling_sens_;
  ObjectiveSpec objective_;
  std::vector<TargetNode> target_nodes_;
  double derivative_scale_ = 1.0;
  double q_scale_ = 1.0;
};

// Shipped problem instances with pinned constants:
//   single-band-1d  one resonance, patch length only, target 2.44 GHz
//   single-band-2d  one resonance, length tunes frequency, feed tunes depth
//   dual-band-2d    two interacting resonances, one target, two basins
//   dual-band-9d    two resonances, nine parameters, two targets
ResonatorModel make_builtin_instance(const std::string& name);
std::vector<std::string> builtin_instance_names();

struct FdCheckResult {
  double worst_error = 0.0;
  std::size_t node = 0;
  std::size_t param = 0;
  bool imag_part = false;
  double analytic = 0.0;
  double fd = 0.0;
};

// Central finite differences of every re/im node against the analytic
// arrays, stepping one parameter at a time by step_norm of its range.
// Reports the worst mixed error |analytic - fd| / max(1, |analytic|, |fd|);
// the unit floor keeps finite-difference noise on components far below the
// O(1) response scale from drowning the comparison. Components below
// kFdExemptBelow on both sides are skipped. Throws when the step does not
// fit inside the bounds at x.
FdCheckResult fd_check(const ResonatorModel& model, const DesignVector& x,
                       double step_norm = 1e-6);

struct LocalOptimum {
  DesignVector x;
  double objective_db = 0.0;
};

// Ground truth by brute force, for d <= 3 only: evaluates the true objective
// on a regular grid (resolution points per axis), keeps the strict local
// minima among all grid neighbours, polishes each by coordinate descent on
// the true model, deduplicates within normalized distance 0.02 and returns
// them sorted ascending by value (global optimum first).
std::vector<LocalOptimum> grid_oracle(const ResonatorModel& model, const ObjectiveSpec& spec,
                                      int resolution = 201);

}  // namespace tayopt
