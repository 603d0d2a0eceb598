#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"

#include "adarem/errors.hpp"
#include "adarem/project.hpp"

using namespace adarem;
using V = std::vector<double>;

TEST_CASE("project examples") {
  CHECK(project(V{5, -3}, FeasibleSet::unconstrained()) == V{5, -3});

  const auto box = FeasibleSet::symmetric_box(2, 1.0);
  CHECK(project(V{2, 0.5}, box, V{1, 1}) == V{1, 0.5});
  CHECK(project(V{2, 0.5}, box, V{100, 0.01}) == V{1, 0.5});

  const auto unit = FeasibleSet::box({0.0}, {1.0});
  CHECK(project(V{0.3}, unit, V{7}) == V{0.3});
}

TEST_CASE("project errors") {
  const auto box = FeasibleSet::symmetric_box(2, 1.0);
  CHECK_THROWS_AS(project(V{0, 0}, box, V{1, 0}), DomainError);
  CHECK_THROWS_AS(project(V{0, 0}, box, V{1, -2}), DomainError);
  CHECK_THROWS_AS(project(V{0, 0}, box, V{1}), DimensionError);
  CHECK_THROWS_AS(project(V{0, 0, 0}, box), DimensionError);
  CHECK_THROWS_AS(FeasibleSet::box({1.0}, {0.0}), DomainError);
  // A vanishing step size gives an infinite metric weight; still a valid metric.
  CHECK(project(V{3, 0}, box, V{std::numeric_limits<double>::infinity(), 1}) == V{1, 0});
}

TEST_CASE("feasible set diameter") {
  CHECK(FeasibleSet::symmetric_box(3, 1.5).diameter_inf() == 3.0);
  CHECK(FeasibleSet::box({0, -1}, {1, 4}).diameter_inf() == 5.0);
  CHECK(std::isinf(FeasibleSet::unconstrained().diameter_inf()));
}

TEST_CASE("nonexpansive_check examples") {
  const auto box = FeasibleSet::symmetric_box(1, 1.0);
  const auto outside = nonexpansive_check(box, V{1}, V{2}, V{-2});
  CHECK(outside.lhs == 2.0);
  CHECK(outside.rhs == 4.0);

  const auto inside = nonexpansive_check(box, V{3}, V{0.5}, V{-0.25});
  CHECK(inside.lhs == inside.rhs);

  const auto same = nonexpansive_check(box, V{1}, V{7}, V{7});
  CHECK(same.lhs == 0.0);
  CHECK(same.rhs == 0.0);
}

TEST_CASE("projection properties on random boxes") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  std::uniform_real_distribution<double> w(0.01, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    V lo(n), hi(n), y(n), z(n), weights(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = u(rng), b = u(rng);
      lo[i] = std::min(a, b);
      hi[i] = std::max(a, b);
      y[i] = 3 * u(rng);
      z[i] = 3 * u(rng);
      weights[i] = w(rng);
    }
    const auto box = FeasibleSet::box(lo, hi);
    const auto p = project(y, box, weights);
    CHECK(box.contains(p));
    CHECK(project(p, box, weights) == p);
    const auto c = nonexpansive_check(box, weights, y, z);
    CHECK(c.lhs <= c.rhs + 1e-12);
  }
}
