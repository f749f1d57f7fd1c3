#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "junction/oracle.hpp"

using namespace junction;

TEST_CASE("regime follows the cheapest entry against 1 / lambda") {
  CHECK(ExampleRegime::from_lambda(1.0).regime == Regime::saturated);
  CHECK(ExampleRegime::from_lambda(0.5).regime == Regime::saturated);
  CHECK(ExampleRegime::from_lambda(0.25).regime == Regime::entering);
  CHECK_THROWS_AS(ExampleRegime::from_lambda(0.0), std::invalid_argument);
}

TEST_CASE("saturated closed form") {
  const auto r = ExampleRegime::from_lambda(1.0);
  CHECK(oracle_value(r, JunctionPoint::make(1, 5.0, 0.0)) == 1.0);
  CHECK(oracle_value(r, JunctionPoint::make(2, 3.0, -1.0)) == 0.0);
  const auto lim = oracle_interface_limits(r, 0.3);
  CHECK(lim.from_branch1 == 1.0);
  CHECK(lim.from_branch2 == 0.0);
}

TEST_CASE("entering closed form") {
  const auto r = ExampleRegime::from_lambda(0.25);
  CHECK(oracle_value(r, JunctionPoint::make(1, 4.0, 2.0)) == doctest::Approx(4.0 - 2.0 * std::exp(-1.0)));
  CHECK(oracle_value(r, JunctionPoint::make(1, 4.0, 2.0)) == doctest::Approx(3.2642).epsilon(1e-4));
  CHECK(oracle_value(r, JunctionPoint::make(1, 1e-9, 0.0)) == doctest::Approx(2.4424).epsilon(1e-4));
  CHECK(oracle_value(r, JunctionPoint::make(1, 2.0, 1.5)) == doctest::Approx(2.787).epsilon(1e-3));
  // inside the expensive stretch the path runs to the nearest seam
  CHECK(oracle_value(r, JunctionPoint::make(1, 2.0, 0.0)) ==
        doctest::Approx(4.0 - 2.0 * std::exp(-0.25 * std::sqrt(5.0))));
  CHECK(oracle_interface_limits(r, 0.0).from_branch1 == doctest::Approx(4.0 - 2.0 * std::exp(-0.25)));
  CHECK(oracle_interface_value(r, 0.0) == doctest::Approx(4.0 - 2.0 * std::exp(-0.25)));
  CHECK(oracle_interface_value(r, 2.0) == doctest::Approx(2.0));
}

TEST_CASE("oracle rejects points outside its domain") {
  const auto r = ExampleRegime::from_lambda(1.0);
  CHECK_THROWS_AS(oracle_value(r, JunctionPoint::on_interface(0.0)), std::domain_error);
  CHECK_THROWS_AS(oracle_value(r, JunctionPoint::make(3, 1.0, 0.0)), std::out_of_range);
}

TEST_CASE("benchmark problem data") {
  const auto spec = oracle_example_spec(0.25);
  REQUIRE(spec.n_branches() == 2);
  CHECK(spec.plane(1).controls.size() == 65);
  CHECK(spec.plane(2).entry(0.0) == 3.0);
  CHECK(spec.plane(2).entry(1.5) == 2.0);
  const auto& a = spec.plane(2).controls[0];
  CHECK(a.id == "a2_000");
  CHECK(spec.plane(2).cost(1.0, 0.0, a) == 0.0);
  CHECK(spec.plane(1).cost(1.0, 0.0, a) == 1.0);
}
