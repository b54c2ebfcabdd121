#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "tayopt/local_model.hpp"
#include "tayopt/rng.hpp"
#include "test_util.hpp"

using namespace tayopt;
using test::AffineSolver;
using test::ConstantSolver;
using test::make_eval;

namespace {

const FrequencyGrid kGrid({1.0, 2.0});
const ObjectiveSpec kSpecFirst({1.0});

// 1-D evaluation at x with re(x') = re0 + slope (x' - x), constant im.
DesignEvaluation eval_1d(double x, double re0, double slope, double im) {
  return make_eval({x}, kGrid, {re0, re0}, {im, im}, {slope, slope}, {0.0, 0.0}, kSpecFirst);
}

}  // namespace

TEST_CASE("evaluation construction validates shapes and caches the objective") {
  const DesignEvaluation eval = eval_1d(1.0, 0.5, 2.0, 0.0);
  CHECK(eval.objective_db == doctest::Approx(magnitude_db(0.5, 0.0)));
  CHECK(eval.objective_db == doctest::Approx(objective_db(eval.spectrum, kSpecFirst)));

  CHECK_THROWS_AS(make_eval({}, kGrid, {0.5, 0.5}, {0.0, 0.0}, {}, {}, kSpecFirst),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      make_eval({1.0}, kGrid, {0.5, 0.5}, {0.0, 0.0}, {1.0}, {0.0, 0.0}, kSpecFirst),
      std::invalid_argument);
  CHECK_THROWS_AS(make_eval({1.0}, kGrid, {0.5, 0.5}, {0.0, 0.0},
                            {1.0, std::nan("")}, {0.0, 0.0}, kSpecFirst),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_eval({std::nan("")}, kGrid, {0.5, 0.5}, {0.0, 0.0}, {1.0, 1.0},
                            {0.0, 0.0}, kSpecFirst),
                  std::invalid_argument);
}

TEST_CASE("taylor model reproduces its anchor bitwise") {
  const DesignEvaluation eval =
      make_eval({1.0, 2.0}, kGrid, {0.5, -0.25}, {0.125, 0.75},
                {1.0, -2.0, 0.5, 0.25}, {3.0, 0.125, -1.0, 2.0}, kSpecFirst);
  const TaylorModel model(eval);
  const ComplexSpectrum at_anchor = model.predict(eval.x);
  for (std::size_t k = 0; k < kGrid.size(); ++k) {
    CHECK(at_anchor.re[k] == eval.spectrum.re[k]);
    CHECK(at_anchor.im[k] == eval.spectrum.im[k]);
  }
  CHECK(model.objective(eval.x, kSpecFirst) == eval.objective_db);
  CHECK_THROWS_AS(model.predict({1.0}), std::invalid_argument);
}

TEST_CASE("taylor model applies the slope per component") {
  const DesignEvaluation eval = eval_1d(1.0, 0.5, 2.0, -0.125);
  const TaylorModel model(eval);
  const std::complex<double> z = model.predict_node(0, {1.1});
  CHECK(z.real() == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(z.imag() == doctest::Approx(-0.125).epsilon(1e-15));
  CHECK(taylor_predict(model, {1.1}).re[0] == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("taylor model prediction is affine in the design vector") {
  const DesignEvaluation eval =
      make_eval({1.0, -2.0}, kGrid, {0.5, -0.25}, {0.125, 0.75},
                {1.0, -2.0, 0.5, 0.25}, {3.0, 0.125, -1.0, 2.0}, kSpecFirst);
  const TaylorModel model(eval);
  rng::Engine eng(rng::mix(31, 1));
  for (int trial = 0; trial < 100; ++trial) {
    const DesignVector a{4.0 * rng::uniform01(eng) - 2.0, 4.0 * rng::uniform01(eng) - 2.0};
    const DesignVector b{4.0 * rng::uniform01(eng) - 2.0, 4.0 * rng::uniform01(eng) - 2.0};
    const double t = rng::uniform01(eng);
    const DesignVector mix{(1.0 - t) * a[0] + t * b[0], (1.0 - t) * a[1] + t * b[1]};
    const ComplexSpectrum pa = model.predict(a);
    const ComplexSpectrum pb = model.predict(b);
    const ComplexSpectrum pm = model.predict(mix);
    for (std::size_t k = 0; k < kGrid.size(); ++k) {
      CHECK(pm.re[k] ==
            doctest::Approx((1.0 - t) * pa.re[k] + t * pb.re[k]).epsilon(1e-12));
      CHECK(pm.im[k] ==
            doctest::Approx((1.0 - t) * pa.im[k] + t * pb.im[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("taylor model directional derivative matches the stored derivatives") {
  const DesignEvaluation eval =
      make_eval({1.0, -2.0}, kGrid, {0.5, -0.25}, {0.125, 0.75},
                {1.0, -2.0, 0.5, 0.25}, {3.0, 0.125, -1.0, 2.0}, kSpecFirst);
  const TaylorModel model(eval);
  const double h = 1e-3;
  for (std::size_t i = 0; i < 2; ++i) {
    DesignVector plus = eval.x, minus = eval.x;
    plus[i] += h;
    minus[i] -= h;
    const ComplexSpectrum sp = model.predict(plus);
    const ComplexSpectrum sm = model.predict(minus);
    for (std::size_t k = 0; k < kGrid.size(); ++k) {
      const double fd_re = (sp.re[k] - sm.re[k]) / (2.0 * h);
      const double fd_im = (sp.im[k] - sm.im[k]) / (2.0 * h);
      CHECK(fd_re == doctest::Approx(eval.deriv.dre(k, i)).epsilon(1e-10));
      CHECK(fd_im == doctest::Approx(eval.deriv.dim(k, i)).epsilon(1e-10));
    }
  }
}

TEST_CASE("taylor model error on a quadratic response shrinks as the square of the step") {
  // True response re(x) = x^2 with exact derivative 2x at the anchor; the
  // first-order model error at distance h is exactly h^2.
  const double a = 1.5;
  const DesignEvaluation eval =
      make_eval({a}, kGrid, {a * a, a * a}, {0.0, 0.0}, {2.0 * a, 2.0 * a}, {0.0, 0.0},
                kSpecFirst);
  const TaylorModel model(eval);
  const auto error_at = [&](double h) {
    const double truth = (a + h) * (a + h);
    return std::abs(model.predict_node(0, {a + h}).real() - truth);
  };
  CHECK(error_at(0.2) / error_at(0.1) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(error_at(0.1) / error_at(0.05) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("model objective converts the linear prediction through the dB map") {
  // re crosses zero at x = 0 while im stays 0.2: the model objective there is
  // the dB value of the remaining imaginary part.
  const DesignEvaluation eval = eval_1d(1.0, 1.0, 1.0, 0.2);
  const TaylorModel model(eval);
  CHECK(local_objective(model, {0.0}, kSpecFirst) ==
        doctest::Approx(20.0 * std::log10(0.2)));
  CHECK(local_objective(model, {0.0}, kSpecFirst) == doctest::Approx(-13.979400087).epsilon(1e-9));

  // With im = 0 as well the floored magnitude bounds the objective below.
  const DesignEvaluation real_only = eval_1d(1.0, 1.0, 1.0, 0.0);
  const TaylorModel real_model(real_only);
  CHECK(local_objective(real_model, {0.0}, kSpecFirst) == doctest::Approx(-300.0));
  rng::Engine eng(rng::mix(31, 2));
  for (int trial = 0; trial < 50; ++trial) {
    const double x = 4.0 * rng::uniform01(eng) - 2.0;
    CHECK(local_objective(real_model, {x}, kSpecFirst) >= -300.0 - 1e-12);
  }
}

TEST_CASE("trust region construction validates its inputs") {
  const ParameterSpace space({{"a", 0.0, 2.0}});
  const TrustRegion region = make_trust_region(space, {1.0});
  CHECK(region.center == DesignVector{1.0});
  CHECK(region.half_width == std::vector<double>{0.25});
  CHECK(region.shrink_factor == 0.5);
  CHECK(region.min_half_width == 1e-4);

  CHECK_THROWS_AS(make_trust_region(space, {3.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_trust_region(space, {1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_trust_region(space, {1.0}, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(make_trust_region(space, {1.0}, 0.25, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_trust_region(space, {1.0}, 0.25, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_trust_region(space, {1.0}, 0.25, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_trust_region(space, {1.0}, 0.25, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("region search returns the center for a constant model") {
  const ParameterSpace space({{"a", 0.0, 2.0}, {"b", -1.0, 3.0}});
  const DesignEvaluation eval =
      make_eval({0.7, 1.3}, kGrid, {0.5, 0.5}, {0.0, 0.0}, {0.0, 0.0, 0.0, 0.0},
                {0.0, 0.0, 0.0, 0.0}, kSpecFirst);
  const TaylorModel model(eval);
  const TrustRegion region = make_trust_region(space, eval.x);
  const DesignVector candidate = minimize_on_region(model, region, kSpecFirst, space);
  CHECK(candidate[0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(candidate[1] == doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("region search finds an interior model zero") {
  // re(x) = x - 0.5 crosses zero at x = 0.5, the lower edge of the search box
  // [0.5, 1.5]; the dense seeding includes the edge exactly.
  const ParameterSpace space({{"a", 0.0, 2.0}});
  const DesignEvaluation eval = eval_1d(1.0, 0.5, 1.0, 0.0);
  const TaylorModel model(eval);
  const TrustRegion region = make_trust_region(space, {1.0}, 0.25);
  const DesignVector candidate = minimize_on_region(model, region, kSpecFirst, space);
  CHECK(candidate[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(local_objective(model, candidate, kSpecFirst) <= -250.0);
}

TEST_CASE("region search respects box and bound intersection") {
  // Steepest descent points left, but the box is clipped at the lower bound.
  const ParameterSpace space({{"a", 0.0, 2.0}});
  const DesignEvaluation eval = eval_1d(0.1, 1.0, 1.0, 0.5);
  const TaylorModel model(eval);
  const TrustRegion region = make_trust_region(space, {0.1}, 0.25);
  const DesignVector candidate = minimize_on_region(model, region, kSpecFirst, space);
  CHECK(candidate[0] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("region search descends a two-dimensional slope to the box corner") {
  const ParameterSpace space({{"a", 0.0, 1.0}, {"b", 0.0, 1.0}});
  // Objective magnitude grows with both coordinates, so the minimum over the
  // box sits at its lower-left corner.
  const DesignEvaluation eval =
      make_eval({0.5, 0.5}, kGrid, {1.0, 1.0}, {0.5, 0.5}, {0.8, 0.6, 0.8, 0.6},
                {0.5, 0.7, 0.5, 0.7}, kSpecFirst);
  const TaylorModel model(eval);
  const TrustRegion region = make_trust_region(space, eval.x, 0.25);
  const DesignVector candidate = minimize_on_region(model, region, kSpecFirst, space);
  CHECK(candidate[0] == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(candidate[1] == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("trust region advance recenters only on strict improvement") {
  const ParameterSpace space({{"a", 0.0, 2.0}});
  TrustRegion region = make_trust_region(space, {1.0}, 0.25, 0.5, 1e-4);

  SUBCASE("improvement recenters and shrinks") {
    const DesignEvaluation better = eval_1d(1.2, 0.1, 1.0, 0.0);
    const TrustRegionAdvance next = advance_trust_region(region, 0.0, &better);
    CHECK(next.improved);
    CHECK(next.region.center == DesignVector{1.2});
    CHECK(next.region.half_width[0] == doctest::Approx(0.125));
  }
  SUBCASE("a worse outcome shrinks in place") {
    const DesignEvaluation worse = eval_1d(1.2, 2.0, 1.0, 0.0);
    const TrustRegionAdvance next = advance_trust_region(region, 0.0, &worse);
    CHECK_FALSE(next.improved);
    CHECK(next.region.center == DesignVector{1.0});
    CHECK(next.region.half_width[0] == doctest::Approx(0.125));
  }
  SUBCASE("a tie within the improvement epsilon does not recenter") {
    const DesignEvaluation same = eval_1d(1.2, 1.0, 1.0, 0.0);
    const double incumbent = same.objective_db + 0.5 * kImprovementEpsDb;
    const TrustRegionAdvance next = advance_trust_region(region, incumbent, &same);
    CHECK_FALSE(next.improved);
    CHECK(next.region.center == DesignVector{1.0});
  }
  SUBCASE("a missing outcome counts as non-improving") {
    const TrustRegionAdvance next = advance_trust_region(region, 0.0, nullptr);
    CHECK_FALSE(next.improved);
    CHECK(next.region.center == DesignVector{1.0});
    CHECK(next.region.half_width[0] == doctest::Approx(0.125));
  }
  SUBCASE("widths saturate at the minimum and never grow") {
    TrustRegion r = region;
    for (int i = 0; i < 40; ++i) {
      const double before = r.half_width[0];
      r = advance_trust_region(r, 0.0, nullptr).region;
      CHECK(r.half_width[0] <= before);
      CHECK(r.half_width[0] >= r.min_half_width);
    }
    CHECK(r.half_width[0] == doctest::Approx(1e-4));
  }
}

TEST_CASE("local step requires the region to be centered on the incumbent") {
  const ParameterSpace space({{"a", 0.0, 2.0}});
  const AffineSolver solver(kGrid, {1.0}, {0.5, 0.5}, {0.0, 0.0}, {1.0, 1.0}, {0.0, 0.0});
  const DesignEvaluation best = evaluate_design(solver, {1.0}, kSpecFirst);
  TrustRegion region = make_trust_region(space, {0.5});
  CHECK_THROWS_AS(local_step(region, best, solver, kSpecFirst, space), std::invalid_argument);
}

TEST_CASE("local step evaluates the proposed candidate and recenters on success") {
  // True response is affine, so the model is exact and the first candidate
  // reaches the in-box optimum of the true objective.
  const ParameterSpace space({{"a", 0.0, 2.0}});
  const AffineSolver solver(kGrid, {1.0}, {0.5, 0.5}, {0.2, 0.2}, {1.0, 1.0}, {0.0, 0.0});
  const DesignEvaluation best = evaluate_design(solver, {1.0}, kSpecFirst);
  const TrustRegion region = make_trust_region(space, best.x, 0.25);

  const LocalStepResult result = local_step(region, best, solver, kSpecFirst, space);
  REQUIRE(result.evaluation.has_value());
  CHECK(result.improved);
  CHECK(result.candidate[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(result.evaluation->objective_db < best.objective_db);
  CHECK(result.region.center == result.evaluation->x);
  CHECK(result.region.half_width[0] == doctest::Approx(0.125));
}

TEST_CASE("local step honors a candidate veto") {
  const ParameterSpace space({{"a", 0.0, 2.0}});
  const AffineSolver solver(kGrid, {1.0}, {0.5, 0.5}, {0.2, 0.2}, {1.0, 1.0}, {0.0, 0.0});
  const DesignEvaluation best = evaluate_design(solver, {1.0}, kSpecFirst);
  const TrustRegion region = make_trust_region(space, best.x, 0.25);

  std::size_t filter_calls = 0;
  const LocalStepResult result =
      local_step(region, best, solver, kSpecFirst, space, {},
                 [&](const DesignVector&) {
                   ++filter_calls;
                   return false;
                 });
  CHECK(filter_calls == 1);
  CHECK_FALSE(result.evaluation.has_value());
  CHECK_FALSE(result.improved);
  CHECK(result.region.center == best.x);
  CHECK(result.region.half_width[0] == doctest::Approx(0.125));
}

TEST_CASE("local run starts with the given evaluation and improves monotonically") {
  const ParameterSpace space({{"a", 0.0, 2.0}, {"b", 0.0, 2.0}});
  const AffineSolver solver(kGrid, {1.0, 1.0}, {0.8, 0.8}, {0.3, 0.3},
                            {0.9, 0.7, 0.9, 0.7}, {0.4, 0.2, 0.4, 0.2});
  const test::FailingSolver counting(solver, [](std::size_t) { return false; });
  const DesignEvaluation start = evaluate_design(counting, space.center(), kSpecFirst);

  LocalRunConfig config;
  config.max_steps = 8;
  config.stagnation_limit = 3;
  const auto history = run_local(start, config, counting, kSpecFirst, space);

  REQUIRE(!history.empty());
  CHECK(history.front().x == start.x);
  CHECK(history.size() == counting.calls());  // start eval plus one per step
  CHECK(history.size() <= 1 + static_cast<std::size_t>(config.max_steps));

  double best = std::numeric_limits<double>::infinity();
  double first_best = history.front().objective_db;
  for (const DesignEvaluation& e : history) best = std::min(best, e.objective_db);
  CHECK(best < first_best);  // an affine landscape always admits progress
}

TEST_CASE("local run stops after the configured stagnation window") {
  const ParameterSpace space({{"a", 0.0, 2.0}});
  const ConstantSolver solver(kGrid, {0.5, 0.5}, {0.0, 0.0}, 1);
  const DesignEvaluation start = evaluate_design(solver, {1.0}, kSpecFirst);

  LocalRunConfig config;
  config.max_steps = 30;
  config.stagnation_limit = 2;
  const auto history = run_local(start, config, solver, kSpecFirst, space);
  // Flat responses never improve: exactly stagnation_limit steps execute.
  CHECK(history.size() == 3);

  config.max_steps = 0;
  const auto none = run_local(start, config, solver, kSpecFirst, space);
  CHECK(none.size() == 1);

  config.max_steps = -1;
  CHECK_THROWS_AS(run_local(start, config, solver, kSpecFirst, space), std::invalid_argument);
  config.max_steps = 5;
  config.stagnation_limit = 0;
  CHECK_THROWS_AS(run_local(start, config, solver, kSpecFirst, space), std::invalid_argument);
}
