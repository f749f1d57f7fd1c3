#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "junction/oracle.hpp"
#include "junction/verify.hpp"
#include "support.hpp"

using namespace junction;
using junction::testing::coarse_grid;

namespace {

ValueField oracle_field(const ExampleRegime& r, const ProblemSpec& spec, const GridSpec& grid) {
  ValueField f(spec, grid);
  for (std::size_t b = 1; b <= 2; ++b)
    for (std::size_t k = 0; k <= f.nx(); ++k)
      for (std::size_t j = 0; j <= f.ny(); ++j) {
        const double x0 = grid.x0(j);
        f.v(b, k, j) = k == 0 ? (b == 1 ? oracle_interface_limits(r, x0).from_branch1 : 0.0)
                              : oracle_value(r, JunctionPoint::make(b, grid.xi(k), x0));
      }
  for (std::size_t j = 0; j <= f.ny(); ++j) f.gamma()[j] = oracle_interface_value(r, grid.x0(j));
  return f;
}

}  // namespace

TEST_CASE("sandwich holds for the solved benchmark and catches a raised interface") {
  const auto spec = oracle_example_spec(0.25);
  const auto grid = coarse_grid();
  const double tol = 1e-7;
  auto r = solve(spec, grid, tol, 40000);
  const auto ok = check_sandwich(spec, grid, r.field, tol);
  CHECK(ok.ok());
  CHECK(ok.allowed_slack == doctest::Approx(2.0 * tol / (1.0 - std::exp(-0.25 * grid.dt))));
  r.field.gamma()[7] = r.field.v(1, 0, 7) + 10.0 + 1.0 + 1.0;
  const auto bad = check_sandwich(spec, grid, r.field, tol);
  REQUIRE(bad.violations.size() == 1);
  CHECK(bad.violations[0].upper);
  CHECK(bad.violations[0].node == 7);
}

TEST_CASE("upper sandwich bound is tight against the cheap branch") {
  auto planes = oracle_example_spec(1.0).planes();
  planes[0].entry_cost = ConstantEntryCost{0.05};
  planes[1].entry_cost = ConstantEntryCost{100.0};
  planes[0].running_cost = planes[1].running_cost;  // leaving the interface is free, staying is not
  const ProblemSpec spec(JunctionGeometry(2), planes, 1.0);
  const auto grid = coarse_grid();
  const auto r = solve(spec, grid, 1e-9, 20000);
  const auto rep = check_sandwich(spec, grid, r.field, 1e-9);
  CHECK(rep.ok());
  CHECK(rep.tightest_upper_gap <= 1e-6);
}

TEST_CASE("comparison of dominated problems") {
  const auto grid = coarse_grid();
  const auto a = oracle_example_spec(0.25);

  const auto same = check_monotone_comparison(a, a, grid, 1e-6, 40000);
  CHECK(same.bitwise_equal);
  CHECK(same.ordered);

  auto planes = a.planes();
  planes[1].entry_cost = VeeEntryCost{6.0, 2.0, 4.0, 0.0};
  const ProblemSpec doubled(JunctionGeometry(2), planes, 0.25);
  const auto rep = check_monotone_comparison(a, doubled, grid, 1e-6, 40000);
  CHECK(rep.ordered);
  CHECK(rep.min_gap >= -2e-6);
  CHECK(rep.max_gap > 0.1);

  CHECK_THROWS_AS(check_monotone_comparison(doubled, a, grid, 1e-6, 100), std::invalid_argument);
  auto moved = a.planes();
  moved[0].dynamics.offset = {0.1, 0.0};
  CHECK_THROWS_AS(check_monotone_comparison(a, ProblemSpec(JunctionGeometry(2), moved, 0.25), grid, 1e-6, 100),
                  std::invalid_argument);
}

TEST_CASE("additive shift of the running cost shifts the value by 1 / lambda") {
  const auto grid = coarse_grid();
  const auto a = oracle_example_spec(0.5);
  auto planes = a.planes();
  for (auto& p : planes) {
    p.running_cost.base += 1.0;
    p.bound_M += 1.0;
  }
  const ProblemSpec b(JunctionGeometry(2), planes, 0.5);
  const double tol = 1e-7;
  CHECK(check_monotone_comparison(a, b, grid, tol, 40000).ordered);
  // started a shift apart, the iterates stay a shift apart
  const auto init = initial_field(a, grid);
  auto shifted = init;
  for (double& x : shifted.values()) x += 2.0;
  const auto ra = solve(a, grid, init, tol, 40000);
  const auto rb = solve(b, grid, shifted, tol, 40000);
  CHECK(ra.report.iterations == rb.report.iterations);
  for (std::size_t n = 0; n < ra.field.values().size(); ++n) {
    REQUIRE(rb.field.values()[n] - ra.field.values()[n] == doctest::Approx(2.0).epsilon(tol));
  }
}

TEST_CASE("interior residual of the saturated field vanishes") {
  const auto spec = oracle_example_spec(1.0);
  const auto grid = coarse_grid();
  const auto r = solve(spec, grid, 1e-9, 20000);
  const auto rep = check_viscosity_residual_interior(spec, grid, r.field);
  CHECK(rep.nodes_checked > 0);
  CHECK(rep.max_abs <= 1e-6);
}

TEST_CASE("steep linear fields have a positive residual") {
  const auto spec = oracle_example_spec(1.0);
  const auto grid = coarse_grid();
  ValueField f(spec, grid);
  for (std::size_t b = 1; b <= 2; ++b)
    for (std::size_t k = 0; k <= f.nx(); ++k)
      for (std::size_t j = 0; j <= f.ny(); ++j) f.v(b, k, j) = 5.0 * grid.x0(j) + 20.0;
  const auto rep = check_viscosity_residual_interior(spec, grid, f);
  CHECK(rep.max_positive > 0.0);
  CHECK(rep.min_negative >= 0.0);
}

TEST_CASE("oracle field of the entering regime is a near solution away from the seams") {
  const auto spec = oracle_example_spec(0.25);
  GridSpec grid;
  grid.h = 0.025;
  grid.dt = 0.01;
  grid.xi_max = 3.0;
  grid.x0_min = -3.0;
  grid.x0_max = 3.0;
  const auto f = oracle_field(ExampleRegime::from_lambda(0.25), spec, grid);
  const auto rep = check_viscosity_residual_interior(spec, grid, f);
  CHECK(rep.nodes_excluded > 0);
  CHECK(rep.max_abs <= 0.1);
}

TEST_CASE("controllability classification") {
  const auto spec = oracle_example_spec(1.0);
  const auto grid = coarse_grid();
  CHECK(check_controllability_regime(spec, grid, 0.9).classification == ControllabilityClass::strong);
  const auto wide = check_controllability_regime(spec, grid, 1.1);
  CHECK(wide.classification != ControllabilityClass::strong);
  CHECK(wide.strong_failures.size() == grid.ny() + 1);
  CHECK_THROWS_AS(check_controllability_regime(spec, grid, 0.0), std::invalid_argument);

  auto planes = spec.planes();
  planes[0].dynamics.gain = {0.5, 0.0, 0.0, 1.0};
  planes[0].dynamics.offset = {0.5, 0.0};
  const ProblemSpec one_sided(JunctionGeometry(2), planes, 1.0);
  const auto rep = check_controllability_regime(one_sided, grid, 0.1);
  CHECK(rep.classification == ControllabilityClass::neither);
  CHECK_FALSE(rep.guarantees_hold());
}

TEST_CASE("interface Lipschitz quotient of a known field") {
  const auto spec = oracle_example_spec(1.0);
  const auto grid = coarse_grid();
  ValueField f(spec, grid);
  for (std::size_t b = 1; b <= 2; ++b)
    for (std::size_t k = 0; k <= f.nx(); ++k)
      for (std::size_t j = 0; j <= f.ny(); ++j) f.v(b, k, j) = 0.5 * grid.x0(j) - 2.0 * grid.xi(k);
  CHECK(interface_lipschitz_quotient(grid, f, 0.5) == doctest::Approx(2.0));
}
