#pragma once

#include <algorithm>
#include <complex>
#include <iosfwd>
#include <limits>
#include <vector>

namespace tayopt {

// Magnitudes below this are clamped before the log so a perfect match yields
// a large negative finite dB value instead of -inf.
inline constexpr double kMagnitudeFloorLinear = 1e-15;

// Strictly increasing, positive frequency grid in GHz. Default-constructed
// grids are empty placeholders and fail validate_spectrum.
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  explicit FrequencyGrid(std::vector<double> freqs_ghz);

  std::size_t size() const { return freqs_.size(); }
  double operator[](std::size_t i) const { return freqs_[i]; }
  const std::vector<double>& values() const { return freqs_; }
  double front() const { return freqs_.front(); }
  double back() const { return freqs_.back(); }

  bool operator==(const FrequencyGrid& other) const = default;

 private:
  std::vector<double> freqs_;
};

// Complex reflection coefficient sampled on a frequency grid (unitless
// real/imaginary parts).
struct ComplexSpectrum {
  FrequencyGrid grid;
  std::vector<double> re;
  std::vector<double> im;
};

// Throws std::invalid_argument on length mismatch or non-finite values.
void validate_spectrum(const ComplexSpectrum& s);

// Target frequencies in GHz; the scalar objective is the maximum dB value
// over the targets and is minimized.
class ObjectiveSpec {
 public:
  explicit ObjectiveSpec(std::vector<double> targets_ghz);
  const std::vector<double>& targets() const { return targets_; }

 private:
  std::vector<double> targets_;
};

// 20*log10 of the complex magnitude, floored at kMagnitudeFloorLinear.
double magnitude_db(double re, double im);

std::vector<double> to_db(const ComplexSpectrum& s);

// Sampling location for one frequency: lo == hi marks an exact grid node,
// otherwise linear interpolation with weight t toward node hi.
struct TargetNode {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double t = 0.0;
};

// Throws std::invalid_argument if f lies outside the grid span.
TargetNode locate_frequency(const FrequencyGrid& grid, double f_ghz);
std::vector<TargetNode> locate_targets(const FrequencyGrid& grid, const ObjectiveSpec& spec);

// Max dB over targets with the complex node values supplied by the caller.
// The direct, Taylor-model and global-surrogate paths all assemble their
// objective through this one routine: re and im are interpolated linearly and
// only then converted to dB (dB values are never interpolated directly).
template <class NodeFn>  // std::complex<double> NodeFn(std::size_t node)
double objective_at_nodes(const std::vector<TargetNode>& nodes, NodeFn&& value_at) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const TargetNode& tn : nodes) {
    std::complex<double> z = value_at(tn.lo);
    if (tn.hi != tn.lo) {
      z = (1.0 - tn.t) * z + tn.t * value_at(tn.hi);
    }
    worst = std::max(worst, magnitude_db(z.real(), z.imag()));
  }
  return worst;
}

// dB value at f; off-node frequencies interpolate re and im first.
double sample_db(const ComplexSpectrum& s, double f_ghz);

// Max of sample_db over the spec's targets.
double objective_db(const ComplexSpectrum& s, const ObjectiveSpec& spec);

// CSV columns: freq_GHz,re,im,dB
void write_spectrum_csv(std::ostream& out, const ComplexSpectrum& s);

}  // namespace tayopt
