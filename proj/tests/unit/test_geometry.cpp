#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "junction/geometry.hpp"

using namespace junction;

TEST_CASE("distance on one branch is planar") {
  const auto a = JunctionPoint::make(1, 3.0, 0.0);
  const auto b = JunctionPoint::make(1, 0.0, 4.0);
  CHECK(geodesic_distance(a, b) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(b.on_gamma());
}

TEST_CASE("distance across branches unfolds through the interface") {
  const auto a = JunctionPoint::make(1, 1.0, 0.0);
  const auto b = JunctionPoint::make(2, 2.0, 0.0);
  CHECK(geodesic_distance(a, b) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(geodesic_distance(a, b) == geodesic_distance(b, a));
}

TEST_CASE("identical interface points are at distance zero") {
  const auto p = JunctionPoint::on_interface(7.0);
  CHECK(geodesic_distance(p, p) == 0.0);
}

TEST_CASE("interface points belong to every branch") {
  const auto g = JunctionPoint::on_interface(1.0);
  const auto a = JunctionPoint::make(2, 1.0, 1.0);
  CHECK(geodesic_distance(g, a) == doctest::Approx(1.0));
  CHECK(JunctionPoint::make(3, 0.0, 1.0) == g);
  CHECK(canonicalize({2, 5e-13, 1.0}) == g);
  CHECK(canonicalize(canonicalize({2, 5e-13, 1.0})) == g);
}

TEST_CASE("invalid coordinates are rejected") {
  CHECK_THROWS_AS(JunctionPoint::make(1, -0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(JunctionPoint::make(1, std::nan(""), 0.0), std::invalid_argument);
}

TEST_CASE("embedding is linear in the intrinsic coordinates") {
  const JunctionGeometry g({1, 0, 0}, {{0, 1, 0}, {0, 0, 1}});
  CHECK(g.embed(JunctionPoint::on_interface(2.0)) == Vec3{2, 0, 0});
  CHECK(g.embed(JunctionPoint::make(1, 1.0, 0.0)) == Vec3{0, 1, 0});
  CHECK(g.embed(JunctionPoint::make(2, 2.0, 3.0)) == Vec3{3, 0, 2});
  CHECK_THROWS_AS(g.embed(JunctionPoint::make(3, 1.0, 0.0)), std::out_of_range);
}

TEST_CASE("explicit embeddings must be orthonormal to e0") {
  const double r = std::sqrt(0.5);
  CHECK_THROWS_AS(JunctionGeometry({1, 0, 0}, {{0, 1, 0}, {r, r, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(JunctionGeometry({1, 0, 0}, {{0, 1, 0}, {0, 2, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(JunctionGeometry({1, 0, 0}, {{0, 1, 0}}), std::invalid_argument);
  const JunctionGeometry fan(5);
  for (std::size_t b = 1; b <= 5; ++b) {
    const auto& d = fan.direction(b);
    CHECK(d[0] == 0.0);
    CHECK(d[1] * d[1] + d[2] * d[2] == doctest::Approx(1.0));
  }
}

TEST_CASE("metric is symmetric and satisfies the triangle inequality") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> br(0, 3);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  auto draw = [&] {
    const auto b = br(rng);
    return b == 0 ? JunctionPoint::on_interface(u(rng) - 2.5) : JunctionPoint::make(b, u(rng), u(rng) - 2.5);
  };
  for (int i = 0; i < 2000; ++i) {
    const auto a = draw(), b = draw(), c = draw();
    REQUIRE(geodesic_distance(a, b) == geodesic_distance(b, a));
    REQUIRE(geodesic_distance(a, c) <= geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-12);
  }
}
