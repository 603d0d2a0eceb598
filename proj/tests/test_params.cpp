#include <cmath>
#include <random>

#include "doctest.h"

#include "adarem/errors.hpp"
#include "adarem/params.hpp"

using namespace adarem;

TEST_CASE("elementwise examples") {
  using V = std::vector<double>;
  CHECK(elementwise(ElementwiseOp::mul, V{2, 3}, V{4, 0.5}) == V{8, 1.5});
  CHECK(elementwise(ElementwiseOp::add, V{0, 0}, V{1, -1}) == V{1, -1});
  CHECK(elementwise(ElementwiseOp::div, V{1, 1}, V{2, 4}) == V{0.5, 0.25});
  CHECK(elementwise(ElementwiseOp::sub, V{3}, V{1}) == V{2});
}

TEST_CASE("elementwise errors") {
  using V = std::vector<double>;
  CHECK_THROWS_AS(elementwise(ElementwiseOp::add, V{1, 2}, V{1}), DimensionError);
  CHECK_THROWS_AS(elementwise(ElementwiseOp::div, V{1, 2}, V{1, 0}), DomainError);
}

TEST_CASE("elementwise agrees with scalar arithmetic") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 16;
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    for (auto op : {ElementwiseOp::add, ElementwiseOp::sub, ElementwiseOp::mul, ElementwiseOp::div}) {
      const auto r = elementwise(op, a, b);
      REQUIRE(r.size() == n);
      for (std::size_t i = 0; i < n; ++i) {
        const double expect = op == ElementwiseOp::add   ? a[i] + b[i]
                              : op == ElementwiseOp::sub ? a[i] - b[i]
                              : op == ElementwiseOp::mul ? a[i] * b[i]
                                                         : a[i] / b[i];
        CHECK(r[i] == expect);
      }
    }
  }
}

TEST_CASE("group_max_abs examples") {
  const std::vector<double> v1{1, -3, 2};
  const std::vector<int> one_group(3, 0);
  CHECK(group_max_abs(v1, one_group).group(0) == 3.0);

  const std::vector<double> zeros{0, 0};
  const std::vector<int> g2(2, 0);
  CHECK(group_max_abs(zeros, g2).group(0) == 0.0);

  const std::vector<double> v3{1, -3, 2, -5};
  const std::vector<int> two_groups{0, 0, 1, 1};
  const auto m = group_max_abs(v3, two_groups);
  CHECK(m.num_groups() == 2);
  CHECK(m.group(0) == 3.0);
  CHECK(m.group(1) == 5.0);
  CHECK(m.at(1) == 3.0);
  CHECK(m.at(3) == 5.0);
}

TEST_CASE("group_max_abs rejects empty groups") {
  const std::vector<double> v{1, 2};
  const std::vector<int> gap{0, 2};  // group 1 has no members
  CHECK_THROWS_AS(group_max_abs(v, gap), ConfigError);
  CHECK_THROWS_AS(group_max_abs(std::vector<double>{}, std::vector<int>{}), ConfigError);
  const std::vector<int> negative{0, -1};
  CHECK_THROWS_AS(group_max_abs(v, negative), ConfigError);
}

TEST_CASE("group_max_abs bounds every member") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t len = 1 + rng() % 20;
    const int groups = 1 + static_cast<int>(rng() % 4);
    std::vector<double> v(len);
    std::vector<int> ids(len);
    for (std::size_t i = 0; i < len; ++i) {
      v[i] = n(rng);
      ids[i] = static_cast<int>(i % static_cast<std::size_t>(groups));
    }
    if (len < static_cast<std::size_t>(groups)) continue;
    const auto m = group_max_abs(v, ids);
    for (std::size_t i = 0; i < len; ++i) CHECK(m.at(i) >= std::abs(v[i]));
  }
}

TEST_CASE("ParamVector keeps values and groups aligned") {
  CHECK_THROWS_AS(ParamVector({1.0, 2.0}, {0}), DimensionError);
  const ParamVector p({1.0, 2.0}, {0, 1});
  const auto q = p.with_values({3.0, 4.0});
  CHECK(q.group_ids()[1] == 1);
  CHECK(q[0] == 3.0);
  CHECK_THROWS_AS(p.with_values({1.0}), DimensionError);
}
