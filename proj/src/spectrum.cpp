#include "tayopt/spectrum.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "tayopt/io_util.hpp"

namespace tayopt {

FrequencyGrid::FrequencyGrid(std::vector<double> freqs_ghz) : freqs_(std::move(freqs_ghz)) {
  if (freqs_.size() < 2) {
    throw std::invalid_argument("FrequencyGrid: at least two nodes required");
  }
  for (std::size_t i = 0; i < freqs_.size(); ++i) {
    if (!std::isfinite(freqs_[i]) || freqs_[i] <= 0.0) {
      throw std::invalid_argument("FrequencyGrid: frequencies must be finite and positive");
    }
    if (i > 0 && !(freqs_[i] > freqs_[i - 1])) {
      throw std::invalid_argument("FrequencyGrid: frequencies must be strictly increasing");
    }
  }
}

void validate_spectrum(const ComplexSpectrum& s) {
  if (s.grid.size() == 0) {
    throw std::invalid_argument("ComplexSpectrum: grid is empty");
  }
  if (s.re.size() != s.grid.size() || s.im.size() != s.grid.size()) {
    throw std::invalid_argument("ComplexSpectrum: array lengths must match the grid");
  }
  for (std::size_t i = 0; i < s.re.size(); ++i) {
    if (!std::isfinite(s.re[i]) || !std::isfinite(s.im[i])) {
      throw std::invalid_argument("ComplexSpectrum: non-finite value");
    }
  }
}

ObjectiveSpec::ObjectiveSpec(std::vector<double> targets_ghz) : targets_(std::move(targets_ghz)) {
  if (targets_.empty()) {
    throw std::invalid_argument("ObjectiveSpec: at least one target frequency required");
  }
  for (double t : targets_) {
    if (!std::isfinite(t) || t <= 0.0) {
      throw std::invalid_argument("ObjectiveSpec: targets must be finite and positive");
    }
  }
}

double magnitude_db(double re, double im) {
  const double mag = std::max(std::sqrt(re * re + im * im), kMagnitudeFloorLinear);
  return 20.0 * std::log10(mag);
}

std::vector<double> to_db(const ComplexSpectrum& s) {
  std::vector<double> db(s.re.size());
  for (std::size_t i = 0; i < s.re.size(); ++i) {
    db[i] = magnitude_db(s.re[i], s.im[i]);
  }
  return db;
}

TargetNode locate_frequency(const FrequencyGrid& grid, double f_ghz) {
  const auto& f = grid.values();
  if (!(f_ghz >= f.front() && f_ghz <= f.back())) {
    throw std::invalid_argument("frequency outside the grid span");
  }
  const auto it = std::lower_bound(f.begin(), f.end(), f_ghz);
  const std::size_t idx = static_cast<std::size_t>(it - f.begin());
  if (it != f.end() && *it == f_ghz) {
    return TargetNode{idx, idx, 0.0};
  }
  // f_ghz > front() here, so idx >= 1.
  const std::size_t hi = idx;
  const std::size_t lo = hi - 1;
  return TargetNode{lo, hi, (f_ghz - f[lo]) / (f[hi] - f[lo])};
}

std::vector<TargetNode> locate_targets(const FrequencyGrid& grid, const ObjectiveSpec& spec) {
  std::vector<TargetNode> nodes;
  nodes.reserve(spec.targets().size());
  for (double t : spec.targets()) nodes.push_back(locate_frequency(grid, t));
  return nodes;
}

double sample_db(const ComplexSpectrum& s, double f_ghz) {
  const std::vector<TargetNode> nodes{locate_frequency(s.grid, f_ghz)};
  return objective_at_nodes(nodes, [&s](std::size_t k) {
    return std::complex<double>(s.re[k], s.im[k]);
  });
}

double objective_db(const ComplexSpectrum& s, const ObjectiveSpec& spec) {
  const auto nodes = locate_targets(s.grid, spec);
  return objective_at_nodes(nodes, [&s](std::size_t k) {
    return std::complex<double>(s.re[k], s.im[k]);
  });
}

void write_spectrum_csv(std::ostream& out, const ComplexSpectrum& s) {
  out << "freq_GHz,re,im,dB\n";
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    out << io::real17(s.grid[i]) << ',' << io::real17(s.re[i]) << ',' << io::real17(s.im[i]) << ','
        << io::real17(magnitude_db(s.re[i], s.im[i])) << '\n';
  }
}

}  // namespace tayopt
