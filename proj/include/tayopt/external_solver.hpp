#pragma once

#include <atomic>
#include <cstdint>
#include <string>

#include "tayopt/solver.hpp"

namespace tayopt {

// Bridges to an out-of-process solver through JSON files:
//
//   request:  {"parameters": [{"name": "...", "value": <number>}, ...],
//              "frequencies_ghz": [<number>, ...]}
//   response: {"re": [m], "im": [m], "d_re": [m*d], "d_im": [m*d]}
//
// d_re/d_im are row-major over frequency nodes: the entry for node k and
// parameter i sits at index k*d + i. Units are physical (per parameter
// unit), frequencies in GHz.
//
// Each compute() writes request-<n>.json into the working directory and
// runs: sh -c "cd <workdir> && <command> request-<n>.json response-<n>.json".
// A nonzero exit status, unreadable output, missing fields or wrong array
// lengths raise SolverError with the failing design attached. Both files are
// removed on success and kept on failure for diagnosis. Distinct calls use
// distinct file names, so concurrent evaluations do not collide.
class FileProtocolSolver : public Solver {
 public:
  FileProtocolSolver(std::string command, std::string workdir, ParameterSpace space,
                     FrequencyGrid grid);

  const ParameterSpace& space() const { return space_; }
  const FrequencyGrid& grid() const { return grid_; }

  SolverResponse compute(const DesignVector& x) const override;

 private:
  std::string command_;
  std::string workdir_;
  ParameterSpace space_;
  FrequencyGrid grid_;
  mutable std::atomic<std::uint64_t> call_counter_{0};
};

}  // namespace tayopt
