#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "tayopt/design_space.hpp"
#include "tayopt/rng.hpp"

using namespace tayopt;

namespace {

ParameterSpace space_1d(double lo, double hi) { return ParameterSpace({{"p", lo, hi}}); }

ParameterSpace space_2d() {
  return ParameterSpace({{"a", 0.0, 1.0}, {"b", 0.0, 1.0}});
}

}  // namespace

TEST_CASE("parameter space construction rejects invalid domains") {
  CHECK_THROWS_AS(ParameterSpace({}), std::invalid_argument);
  CHECK_THROWS_AS(ParameterSpace({{"p", 1.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(ParameterSpace({{"p", 2.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(ParameterSpace({{"p", 0.0, 1.0}, {"p", 0.0, 2.0}}), std::invalid_argument);
  CHECK_NOTHROW(ParameterSpace({{"p", -1.0, 1.0}, {"q", 0.5, 0.6}}));
}

TEST_CASE("normalize maps bounds and midpoints exactly") {
  CHECK(space_1d(0.0, 10.0).normalize({0.0})[0] == 0.0);
  CHECK(space_1d(0.0, 10.0).normalize({10.0})[0] == 1.0);
  CHECK(space_1d(2.0, 4.0).normalize({3.0})[0] == 0.5);
}

TEST_CASE("denormalize is exact at bound endpoints") {
  const ParameterSpace space({{"a", -3.0, 7.0}, {"b", 0.125, 9.5}});
  const DesignVector lo = space.denormalize({0.0, 0.0});
  const DesignVector hi = space.denormalize({1.0, 1.0});
  CHECK(lo[0] == -3.0);
  CHECK(lo[1] == 0.125);
  CHECK(hi[0] == 7.0);
  CHECK(hi[1] == 9.5);
}

TEST_CASE("normalize and denormalize round-trip to 1e-12") {
  const ParameterSpace space({{"a", -5.0, 3.0}, {"b", 0.001, 0.002}, {"c", 100.0, 5000.0}});
  rng::Engine eng(rng::mix(11, 1));
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> unit(space.dimension());
    for (double& u : unit) u = rng::uniform01(eng);
    const DesignVector x = space.denormalize(unit);
    const std::vector<double> back = space.normalize(x);
    for (std::size_t i = 0; i < unit.size(); ++i)
      CHECK(back[i] == doctest::Approx(unit[i]).epsilon(1e-12));
    const DesignVector x2 = space.denormalize(back);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(x2[i] == doctest::Approx(x[i]).epsilon(1e-12));
  }
}

TEST_CASE("bounds checks reject mismatched or out-of-range vectors") {
  const ParameterSpace space = space_1d(0.0, 1.0);
  CHECK_THROWS_AS(space.normalize({0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(space.require_in_bounds({1.5}), std::invalid_argument);
  CHECK_THROWS_AS(space.require_in_bounds({-0.1}), std::invalid_argument);
  CHECK(space.contains({0.0}));
  CHECK(space.contains({1.0}));
  CHECK_FALSE(space.contains({1.0000001}));
}

TEST_CASE("clamp projects onto the box and center is the midpoint") {
  const ParameterSpace space({{"a", 0.0, 2.0}, {"b", -1.0, 1.0}});
  const DesignVector clamped = space.clamp({-5.0, 0.5});
  CHECK(clamped[0] == 0.0);
  CHECK(clamped[1] == 0.5);
  const DesignVector c = space.center();
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(0.0));
}

TEST_CASE("distance uses normalized coordinates") {
  CHECK(space_1d(0.0, 2.0).distance({0.0}, {2.0}) == doctest::Approx(1.0));
  CHECK(space_2d().distance({0.0, 0.0}, {1.0, 1.0}) == doctest::Approx(std::sqrt(2.0)));
  const ParameterSpace space({{"a", 0.0, 1000.0}, {"b", 0.0, 0.001}});
  CHECK(space.distance({500.0, 0.0005}, {500.0, 0.0005}) == 0.0);
  CHECK(space.distance({0.0, 0.0}, {1000.0, 0.001}) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("distance is symmetric and satisfies the triangle inequality") {
  const ParameterSpace space({{"a", -2.0, 5.0}, {"b", 10.0, 20.0}, {"c", 0.0, 1.0}});
  rng::Engine eng(rng::mix(11, 2));
  const auto random_point = [&] {
    std::vector<double> unit(space.dimension());
    for (double& u : unit) u = rng::uniform01(eng);
    return space.denormalize(unit);
  };
  for (int trial = 0; trial < 200; ++trial) {
    const DesignVector a = random_point();
    const DesignVector b = random_point();
    const DesignVector c = random_point();
    CHECK(space.distance(a, b) == doctest::Approx(space.distance(b, a)).epsilon(1e-14));
    CHECK(space.distance(a, c) <= space.distance(a, b) + space.distance(b, c) + 1e-12);
  }
}

TEST_CASE("full factorial covers levels with last dimension fastest") {
  SUBCASE("two levels in one dimension are the bounds") {
    const auto pts = full_factorial(space_1d(0.0, 1.0), {2});
    REQUIRE(pts.size() == 2);
    CHECK(pts[0][0] == 0.0);
    CHECK(pts[1][0] == 1.0);
  }
  SUBCASE("2x2 gives the four corners in order") {
    const auto pts = full_factorial(space_2d(), {2, 2});
    REQUIRE(pts.size() == 4);
    CHECK(pts[0] == DesignVector{0.0, 0.0});
    CHECK(pts[1] == DesignVector{0.0, 1.0});
    CHECK(pts[2] == DesignVector{1.0, 0.0});
    CHECK(pts[3] == DesignVector{1.0, 1.0});
  }
  SUBCASE("3x3 has nine points including all corners") {
    const auto pts = full_factorial(space_2d(), {3, 3});
    REQUIRE(pts.size() == 9);
    for (const DesignVector& corner :
         {DesignVector{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}}) {
      CHECK(std::count(pts.begin(), pts.end(), corner) == 1);
    }
    CHECK(pts[4] == DesignVector{0.5, 0.5});
  }
  SUBCASE("invalid level counts are rejected") {
    CHECK_THROWS_AS(full_factorial(space_2d(), {1, 3}), std::invalid_argument);
    CHECK_THROWS_AS(full_factorial(space_2d(), {3}), std::invalid_argument);
    CHECK_THROWS_AS(full_factorial(space_2d(), {1001, 1001}), std::invalid_argument);
  }
}

namespace {

// Bin index of one coordinate for an n-bin Latin hypercube dimension.
int bin_of(double value, double lo, double hi, int n) {
  const double t = (value - lo) / (hi - lo);
  int bin = static_cast<int>(t * n);
  if (bin == n) bin = n - 1;
  return bin;
}

void check_bin_occupancy(const ParameterSpace& space, const std::vector<DesignVector>& pts) {
  const int n = static_cast<int>(pts.size());
  for (std::size_t dim = 0; dim < space.dimension(); ++dim) {
    std::vector<int> bins;
    for (const auto& p : pts)
      bins.push_back(bin_of(p[dim], space.parameter(dim).lower, space.parameter(dim).upper, n));
    std::sort(bins.begin(), bins.end());
    for (int i = 0; i < n; ++i) CHECK(bins[static_cast<std::size_t>(i)] == i);
  }
}

}  // namespace

TEST_CASE("latin hypercube fills every bin exactly once") {
  std::vector<Parameter> params;
  for (int i = 0; i < 9; ++i)
    params.push_back({"p" + std::to_string(i), static_cast<double>(i), static_cast<double>(i) + 1.5});
  const ParameterSpace space(params);

  const auto pts = latin_hypercube(space, 20, 42);
  REQUIRE(pts.size() == 20);
  for (const auto& p : pts) CHECK(space.contains(p));
  check_bin_occupancy(space, pts);
}

TEST_CASE("latin hypercube is seed-reproducible and seed-sensitive") {
  const ParameterSpace space = space_2d();
  const auto a = latin_hypercube(space, 5, 7);
  const auto b = latin_hypercube(space, 5, 7);
  const auto c = latin_hypercube(space, 5, 8);
  CHECK(a == b);
  CHECK(a != c);
  check_bin_occupancy(space, a);
  check_bin_occupancy(space, c);
}

TEST_CASE("latin hypercube degenerate sizes") {
  const ParameterSpace space = space_1d(3.0, 4.0);
  const auto single = latin_hypercube(space, 1, 1);
  REQUIRE(single.size() == 1);
  CHECK(space.contains(single[0]));
  CHECK_THROWS_AS(latin_hypercube(space, 0, 1), std::invalid_argument);
}
