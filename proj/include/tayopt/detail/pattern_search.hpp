#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace tayopt::detail {

// Axis-aligned box in normalized coordinates; lo[i] <= hi[i], equality allowed.
struct SearchBox {
  std::vector<double> lo;
  std::vector<double> hi;
};

// Coordinate pattern search (compass search): per sweep, each coordinate is
// probed one step in both directions and moved on strict improvement; the
// step halves after a sweep without any move. Robust on the near-singular
// kinks the assembled dB surface develops at deep resonances, where gradient
// methods stall. Fully deterministic.
//
struct SearchResult {
  std::vector<double> best_point;
  double best_value = 0.0;
};

// f is minimized and takes normalized coordinates. Returns the best point and
// its value. `start` must lie inside the box.
template <class F>
SearchResult pattern_search(F&& f, std::vector<double> start, const SearchBox& box,
                            double step_fraction, double step_tol,
                            std::size_t max_evals = 20000) {
  const std::size_t d = start.size();
  std::vector<double> step(d);
  double max_step = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    step[i] = (box.hi[i] - box.lo[i]) * step_fraction;
    max_step = std::max(max_step, step[i]);
  }

  std::vector<double> best = std::move(start);
  double fbest = f(best);
  std::size_t evals = 1;

  while (max_step > step_tol && evals < max_evals) {
    bool moved = false;
    for (std::size_t i = 0; i < d && evals < max_evals; ++i) {
      if (step[i] <= 0.0) continue;
      const double base = best[i];
      for (const double dir : {+1.0, -1.0}) {
        double cand = base + dir * step[i];
        if (cand < box.lo[i]) cand = box.lo[i];
        if (cand > box.hi[i]) cand = box.hi[i];
        if (cand == best[i]) continue;
        best[i] = cand;
        const double fc = f(best);
        ++evals;
        if (fc < fbest) {
          fbest = fc;
          moved = true;
          break;  // keep the move
        }
        best[i] = base;
      }
    }
    if (!moved) {
      max_step = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        step[i] *= 0.5;
        max_step = std::max(max_step, step[i]);
      }
    }
  }
  return SearchResult{std::move(best), fbest};
}

}  // namespace tayopt::detail
