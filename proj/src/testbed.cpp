#include "tayopt/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tayopt/detail/pattern_search.hpp"

namespace tayopt {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = double(i) / double(n - 1);
    v[static_cast<std::size_t>(i)] = lo * (1.0 - t) + hi * t;
  }
  return v;
}

std::vector<double> two_band_grid(double lo1, double hi1, double lo2, double hi2, int n_per_band) {
  std::vector<double> v = linspace(lo1, hi1, n_per_band);
  const std::vector<double> second = linspace(lo2, hi2, n_per_band);
  v.insert(v.end(), second.begin(), second.end());
  return v;
}

}  // namespace

ResonatorModel::ResonatorModel(std::string name, ParameterSpace space, FrequencyGrid grid,
                               std::vector<Resonance> resonances,
                               std::vector<std::vector<double>> freq_sensitivity,
                               std::vector<std::vector<double>> coupling_sensitivity,
                               ObjectiveSpec objective)
    : name_(std::move(name)),
      space_(std::move(space)),
      grid_(std::move(grid)),
      resonances_(std::move(resonances)),
      freq_sens_(std::move(freq_sensitivity)),
      coupling_sens_(std::move(coupling_sensitivity)),
      objective_(std::move(objective)) {
  if (resonances_.empty()) throw std::invalid_argument("model needs at least one resonance");
  const std::size_t k = resonances_.size();
  const std::size_t d = space_.dimension();
  if (freq_sens_.size() != k || coupling_sens_.size() != k)
    throw std::invalid_argument("sensitivity maps must have one row per resonance");
  for (std::size_t r = 0; r < k; ++r) {
    if (freq_sens_[r].size() != d || coupling_sens_[r].size() != d)
      throw std::invalid_argument("sensitivity rows must have one entry per parameter");
    const Resonance& res = resonances_[r];
    if (!(res.f0_ghz > 0.0)) throw std::invalid_argument("resonant frequency must be positive");
    if (!(res.q > 0.0)) throw std::invalid_argument("quality factor must be positive");
    if (!std::isfinite(res.coupling.real()) || !std::isfinite(res.coupling.imag()))
      throw std::invalid_argument("coupling must be finite");
    double g_total = 0.0;
    for (const double g : freq_sens_[r]) g_total += std::abs(g);
    // xhat ranges over [-1, 1], so this keeps every shifted resonant
    // frequency positive across the whole box.
    if (!(g_total < 1.0))
      throw std::invalid_argument("frequency sensitivities must sum below 1 in magnitude");
  }
  target_nodes_ = locate_targets(grid_, objective_);
}

void ResonatorModel::set_q_scale(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("q scale must be positive");
  q_scale_ = scale;
}

std::vector<ResonatorModel::ResonanceState> ResonatorModel::resolve(const DesignVector& x) const {
  const std::vector<double> u = space_.normalize(x);
  const std::size_t d = u.size();
  std::vector<ResonanceState> st(resonances_.size());
  for (std::size_t r = 0; r < resonances_.size(); ++r) {
    double f_shift = 0.0;
    double c_shift = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double xhat = 2.0 * u[i] - 1.0;
      f_shift += freq_sens_[r][i] * xhat;
      c_shift += coupling_sens_[r][i] * xhat;
    }
    st[r].f = resonances_[r].f0_ghz * (1.0 + f_shift);
    st[r].c = resonances_[r].coupling * (1.0 + c_shift);
    st[r].q = resonances_[r].q * q_scale_;
  }
  return st;
}

std::complex<double> ResonatorModel::value_at(double f_ghz,
                                              const std::vector<ResonanceState>& st) const {
  std::complex<double> s{1.0, 0.0};
  for (const ResonanceState& r : st) {
    const double delta = f_ghz / r.f - 1.0;
    s -= r.c / std::complex<double>(1.0, 2.0 * r.q * delta);
  }
  return s;
}

SolverResponse ResonatorModel::compute(const DesignVector& x) const {
  space_.require_in_bounds(x);
  const std::vector<ResonanceState> st = resolve(x);
  const std::size_t m = grid_.size();
  const std::size_t d = space_.dimension();

  SolverResponse out;
  out.spectrum.grid = grid_;
  out.spectrum.re.resize(m);
  out.spectrum.im.resize(m);
  out.deriv.nodes = m;
  out.deriv.params = d;
  out.deriv.re.assign(m * d, 0.0);
  out.deriv.im.assign(m * d, 0.0);

  // d(xhat_i)/dx_i for the physical parameters.
  std::vector<double> xhat_scale(d);
  for (std::size_t i = 0; i < d; ++i) {
    const Parameter& p = space_.parameter(i);
    xhat_scale[i] = 2.0 / (p.upper - p.lower);
  }

  for (std::size_t n = 0; n < m; ++n) {
    const double f = grid_[n];
    const std::complex<double> s = value_at(f, st);
    out.spectrum.re[n] = s.real();
    out.spectrum.im[n] = s.imag();

    for (std::size_t r = 0; r < st.size(); ++r) {
      const ResonanceState& rs = st[r];
      const double delta = f / rs.f - 1.0;
      const std::complex<double> den{1.0, 2.0 * rs.q * delta};
      const std::complex<double> den2 = den * den;
      const std::complex<double> c_over_den2 = rs.c / den2;
      for (std::size_t i = 0; i < d; ++i) {
        const double df = resonances_[r].f0_ghz * freq_sens_[r][i] * xhat_scale[i];
        const std::complex<double> dc =
            resonances_[r].coupling * (coupling_sens_[r][i] * xhat_scale[i]);
        const double ddelta = -f / (rs.f * rs.f) * df;
        const std::complex<double> dden{0.0, 2.0 * rs.q * ddelta};
        // term = c / den; d(term) = dc / den - c * dden / den^2
        const std::complex<double> dterm = dc / den - c_over_den2 * dden;
        out.deriv.re[n * d + i] -= dterm.real();
        out.deriv.im[n * d + i] -= dterm.imag();
      }
    }
  }

  if (derivative_scale_ != 1.0) {
    for (double& v : out.deriv.re) v *= derivative_scale_;
    for (double& v : out.deriv.im) v *= derivative_scale_;
  }
  return out;
}

std::complex<double> ResonatorModel::response_at(double f_ghz, const DesignVector& x) const {
  space_.require_in_bounds(x);
  return value_at(f_ghz, resolve(x));
}

double ResonatorModel::objective_probe(const DesignVector& x) const {
  return objective_probe(x, target_nodes_);
}

double ResonatorModel::objective_probe(const DesignVector& x,
                                       const std::vector<TargetNode>& nodes) const {
  space_.require_in_bounds(x);
  const std::vector<ResonanceState> st = resolve(x);
  return objective_at_nodes(nodes, [&](std::size_t n) { return value_at(grid_[n], st); });
}

ResonatorModel make_builtin_instance(const std::string& name) {
  if (name == "single-band-1d") {
    return ResonatorModel(
        name, ParameterSpace({{"patch_len", 8.0, 12.0}}),
        FrequencyGrid(linspace(2.2, 2.7, 101)),
        {{2.40, 25.0, {0.92, 0.05}}},
        {{0.05}},
        {{0.0}},
        ObjectiveSpec({2.44}));
  }
  if (name == "single-band-2d") {
    // Coupling magnitude stays below one over the whole box, so the response
    // never cancels exactly and the single optimum has a regular bottom. The
    // sizable imaginary coupling part flattens the depth gain along feed_pos,
    // keeping the notch bottom approachable in a few shrinking steps.
    return ResonatorModel(
        name, ParameterSpace({{"patch_len", 8.0, 12.0}, {"feed_pos", 1.0, 3.0}}),
        FrequencyGrid(linspace(2.2, 2.7, 101)),
        {{2.40, 25.0, {0.75, 0.35}}},
        {{0.05, 0.0}},
        {{0.0, 0.15}},
        ObjectiveSpec({2.44}));
  }
  if (name == "dual-band-2d") {
    // Both resonances are tuned mainly by slot_len, so their resonant lines
    // run parallel and never cross inside the box: exactly two basins, one
    // per resonance, with the gap parameter steering each notch depth. The
    // couplings stay far enough from unit magnitude that the response never
    // cancels exactly.
    return ResonatorModel(
        name, ParameterSpace({{"slot_len", 4.0, 7.0}, {"gap", 0.2, 1.0}}),
        FrequencyGrid(linspace(5.0, 6.2, 101)),
        {{5.45, 30.0, {0.78, 0.05}}, {5.78, 35.0, {0.84, 0.03}}},
        {{0.050, 0.008}, {0.048, -0.006}},
        {{0.02, 0.08}, {-0.01, -0.12}},
        ObjectiveSpec({5.6}));
  }
  if (name == "dual-band-9d") {
    return ResonatorModel(
        name,
        ParameterSpace({{"patch_len", 24.0, 34.0},
                        {"patch_w", 28.0, 40.0},
                        {"slot_len", 4.0, 7.0},
                        {"slot_w", 0.3, 1.2},
                        {"gap", 0.2, 1.0},
                        {"feed_x", 1.0, 5.0},
                        {"stub_len", 2.0, 6.0},
                        {"sub_h", 0.6, 1.6},
                        {"eps_r", 2.2, 4.8}}),
        FrequencyGrid(two_band_grid(2.2, 2.6, 5.6, 6.0, 101)),
        {{2.38, 30.0, {0.90, 0.06}}, {5.87, 40.0, {0.82, -0.05}}},
        {{0.030, 0.012, 0.004, 0.002, 0.001, 0.006, 0.003, -0.008, -0.014},
         {0.004, 0.002, 0.028, 0.010, 0.006, 0.002, 0.012, -0.006, -0.010}},
        {{0.010, 0.006, 0.002, 0.001, 0.001, 0.015, 0.002, 0.004, 0.003},
         {0.002, 0.001, 0.012, 0.008, 0.010, 0.003, 0.014, 0.002, 0.002}},
        ObjectiveSpec({2.4, 5.8}));
  }
  throw std::invalid_argument("unknown builtin instance '" + name +
                              "'; available: single-band-1d, single-band-2d, dual-band-2d, "
                              "dual-band-9d");
}

std::vector<std::string> builtin_instance_names() {
  return {"single-band-1d", "single-band-2d", "dual-band-2d", "dual-band-9d"};
}

FdCheckResult fd_check(const ResonatorModel& model, const DesignVector& x, double step_norm) {
  if (!(step_norm > 0.0)) throw std::invalid_argument("step must be positive");
  const ParameterSpace& space = model.space();
  space.require_in_bounds(x);
  const std::vector<double> u = space.normalize(x);
  for (const double ui : u)
    if (ui < step_norm || ui > 1.0 - step_norm)
      throw std::invalid_argument("point too close to the bounds for the requested step");

  const SolverResponse base = model.compute(x);
  const std::size_t m = base.deriv.nodes;
  const std::size_t d = base.deriv.params;

  FdCheckResult worst;
  for (std::size_t j = 0; j < d; ++j) {
    const Parameter& p = space.parameter(j);
    const double h = step_norm * (p.upper - p.lower);
    DesignVector xp = x;
    DesignVector xm = x;
    xp[j] += h;
    xm[j] -= h;
    const ComplexSpectrum sp = model.compute(xp).spectrum;
    const ComplexSpectrum sm = model.compute(xm).spectrum;
    for (std::size_t n = 0; n < m; ++n) {
      const double fd_pair[2] = {(sp.re[n] - sm.re[n]) / (2.0 * h),
                                 (sp.im[n] - sm.im[n]) / (2.0 * h)};
      const double an_pair[2] = {base.deriv.dre(n, j), base.deriv.dim(n, j)};
      for (int part = 0; part < 2; ++part) {
        const double magnitude = std::max(std::abs(an_pair[part]), std::abs(fd_pair[part]));
        if (magnitude < kFdExemptBelow) continue;
        // Mixed relative/absolute error with a unit floor: the response is
        // O(1) by construction, and a pure per-component relative error is
        // dominated by finite-difference noise for components much smaller
        // than the response scale, failing even exact derivative code.
        const double rel = std::abs(an_pair[part] - fd_pair[part]) / std::max(1.0, magnitude);
        if (rel > worst.worst_error) {
          worst.worst_error = rel;
          worst.node = n;
          worst.param = j;
          worst.imag_part = (part == 1);
          worst.analytic = an_pair[part];
          worst.fd = fd_pair[part];
        }
      }
    }
  }
  return worst;
}

std::vector<LocalOptimum> grid_oracle(const ResonatorModel& model, const ObjectiveSpec& spec,
                                      int resolution) {
  const ParameterSpace& space = model.space();
  const std::size_t d = space.dimension();
  if (d > 3) throw std::invalid_argument("grid oracle supports at most 3 dimensions");
  if (resolution < 2) throw std::invalid_argument("resolution must be at least 2");

  const std::vector<TargetNode> nodes = locate_targets(model.grid(), spec);
  const auto probe_unit = [&](const std::vector<double>& unit) {
    return model.objective_probe(space.denormalize(unit), nodes);
  };

  const std::size_t res = static_cast<std::size_t>(resolution);
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= res;

  std::vector<double> values(total);
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> unit(d);
  for (std::size_t flat = 0; flat < total; ++flat) {
    for (std::size_t i = 0; i < d; ++i) unit[i] = double(idx[i]) / double(res - 1);
    values[flat] = probe_unit(unit);
    std::size_t j = d;
    while (j > 0) {
      if (++idx[j - 1] < res) break;
      idx[j - 1] = 0;
      --j;
    }
  }

  // Strict minima against the full neighbour stencil (all index offsets in
  // {-1,0,1}^d except the point itself, clipped at the box faces).
  const auto flatten = [&](const std::vector<std::size_t>& ix) {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < d; ++i) flat = flat * res + ix[i];
    return flat;
  };

  std::vector<std::vector<std::size_t>> minima;
  std::fill(idx.begin(), idx.end(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    const double v = values[flat];
    bool strict_min = true;
    std::vector<int> off(d, -1);
    for (;;) {
      bool self = true;
      bool inside = true;
      std::vector<std::size_t> nb(d);
      for (std::size_t i = 0; i < d && inside; ++i) {
        if (off[i] != 0) self = false;
        const long long t = static_cast<long long>(idx[i]) + off[i];
        if (t < 0 || t >= static_cast<long long>(res)) inside = false;
        else nb[i] = static_cast<std::size_t>(t);
      }
      if (!self && inside && !(v < values[flatten(nb)])) {
        strict_min = false;
        break;
      }
      std::size_t j = d;
      while (j > 0) {
        if (++off[j - 1] <= 1) break;
        off[j - 1] = -1;
        --j;
      }
      if (j == 0) break;
    }
    if (strict_min) minima.push_back(idx);
    std::size_t j = d;
    while (j > 0) {
      if (++idx[j - 1] < res) break;
      idx[j - 1] = 0;
      --j;
    }
  }

  detail::SearchBox box;
  box.lo.assign(d, 0.0);
  box.hi.assign(d, 1.0);
  std::vector<LocalOptimum> polished;
  for (const std::vector<std::size_t>& ix : minima) {
    std::vector<double> start(d);
    for (std::size_t i = 0; i < d; ++i) start[i] = double(ix[i]) / double(res - 1);
    const auto refined =
        detail::pattern_search(probe_unit, start, box, 1.0 / double(res - 1), 1e-9);
    polished.push_back({space.denormalize(refined.best_point), refined.best_value});
  }

  std::sort(polished.begin(), polished.end(),
            [](const LocalOptimum& a, const LocalOptimum& b) { return a.objective_db < b.objective_db; });

  std::vector<LocalOptimum> kept;
  for (const LocalOptimum& cand : polished) {
    bool duplicate = false;
    for (const LocalOptimum& have : kept)
      if (space.distance(cand.x, have.x) <= 0.02) duplicate = true;
    if (!duplicate) kept.push_back(cand);
  }
  return kept;
}

}  // namespace tayopt
