#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "junction/oracle.hpp"
#include "junction/solver.hpp"
#include "support.hpp"

using namespace junction;
using junction::testing::coarse_grid;
using junction::testing::disc_controls;

namespace {

ProblemSpec constant_cost_spec(double ell, double entry, double lambda) {
  std::vector<HalfPlaneSpec> planes(3);
  for (std::size_t b = 1; b <= 3; ++b) {
    planes[b - 1].controls = disc_controls(b, 16);
    planes[b - 1].running_cost.base = ell;
    planes[b - 1].entry_cost = ConstantEntryCost{entry};
    planes[b - 1].bound_M = std::max(1.0, ell);
  }
  // skewed dynamics on one branch; the answer does not depend on them
  planes[2].dynamics.gain = {0.8, 0.3, -0.2, 1.1};
  return ProblemSpec(JunctionGeometry(3), std::move(planes), lambda);
}

}  // namespace

TEST_CASE("grid validation and accessors") {
  GridSpec g = coarse_grid();
  CHECK_NOTHROW(g.validate());
  CHECK(g.nx() == 30);
  CHECK(g.ny() == 40);
  CHECK(g.x0(40) == doctest::Approx(2.0));
  g.h = 0.07;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = coarse_grid();
  g.dt = 0.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = coarse_grid();
  g.dt = 0.5;
  CHECK_FALSE(g.warnings(oracle_example_spec(1.0)).empty());
  CHECK(coarse_grid().warnings(oracle_example_spec(1.0)).empty());
}

TEST_CASE("interpolation is exact on affine data") {
  const auto spec = oracle_example_spec(1.0);
  const auto grid = coarse_grid();
  ValueField f(spec, grid);
  for (std::size_t b = 1; b <= 2; ++b)
    for (std::size_t k = 0; k <= f.nx(); ++k)
      for (std::size_t j = 0; j <= f.ny(); ++j) f.v(b, k, j) = b + 2.0 * grid.xi(k) - 0.5 * grid.x0(j);
  for (std::size_t j = 0; j <= f.ny(); ++j) f.gamma()[j] = 3.0 * grid.x0(j);
  CHECK(interpolate(grid, f, JunctionPoint::make(2, 1.234, -0.77)) == doctest::Approx(2 + 2.468 + 0.385));
  CHECK(interpolate(grid, f, JunctionPoint::on_interface(0.55)) == doctest::Approx(1.65));
  // clamped outside the box
  CHECK(interpolate_branch(grid, f, 1, 9.0, 0.0) == doctest::Approx(1.0 + 6.0));
  CHECK(interpolate_branch(grid, f, 1, -0.3, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("constants are fixed by a matching running cost") {
  const double K = 2.5, lambda = 0.4;
  const auto spec = constant_cost_spec(lambda * K, 1.0, lambda);
  const auto grid = coarse_grid();
  const ValueField f(spec, grid, K);
  const auto g = sl_update(spec, grid, f);
  for (std::size_t b = 1; b <= 3; ++b)
    for (std::size_t k = 1; k <= g.nx(); ++k)
      for (std::size_t j = 0; j <= g.ny(); ++j) REQUIRE(g.v(b, k, j) == doctest::Approx(K).epsilon(1e-14));
}

TEST_CASE("the free exit keeps a zero field on P_2") {
  const auto spec = oracle_example_spec(0.25);
  const auto grid = coarse_grid();
  const auto g = sl_update(spec, grid, ValueField(spec, grid, 0.0));
  for (std::size_t k = 1; k <= g.nx(); ++k)
    for (std::size_t j = 0; j <= g.ny(); ++j) REQUIRE(g.v(2, k, j) == 0.0);
}

TEST_CASE("update is monotone and a contraction") {
  std::mt19937_64 rng(7);
  const auto spec = junction::testing::random_spec(rng);
  const auto grid = coarse_grid();
  const SemiLagrangianScheme scheme(spec, grid);
  std::uniform_real_distribution<double> bump(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const auto w = junction::testing::random_field(rng, spec, grid, 0.0, 5.0);
    auto z = w;
    for (double& x : z.values()) x += bump(rng);
    const auto uw = scheme.update(w), uz = scheme.update(z);
    for (std::size_t n = 0; n < uw.values().size(); ++n) REQUIRE(uw.values()[n] <= uz.values()[n]);
    const auto a = junction::testing::random_field(rng, spec, grid, 0.0, 5.0);
    CHECK(sup_distance(scheme.update(a), uw) <= scheme.discount() * sup_distance(a, w) + 1e-12);
  }
}

TEST_CASE("threaded update is bitwise identical") {
  std::mt19937_64 rng(8);
  const auto spec = junction::testing::random_spec(rng);
  const auto grid = coarse_grid();
  const auto f = junction::testing::random_field(rng, spec, grid, 0.0, 5.0);
  const auto one = sl_update(spec, grid, f, {1});
  const auto three = sl_update(spec, grid, f, {3});
  CHECK(sup_distance(one, three) == 0.0);
  const auto s1 = solve(oracle_example_spec(1.0), grid, 1e-6, 5000, {1});
  const auto s4 = solve(oracle_example_spec(1.0), grid, 1e-6, 5000, {4});
  CHECK(sup_distance(s1.field, s4.field) == 0.0);
}

TEST_CASE("constant running cost with prohibitive entry gives c / lambda everywhere") {
  const double ell = 0.7, lambda = 0.5;
  const auto spec = constant_cost_spec(ell, 100.0, lambda);
  const auto grid = coarse_grid();
  const auto r = solve(spec, grid, 1e-10, 20000);
  REQUIRE(r.report.converged);
  for (double x : r.field.values()) REQUIRE(x == doctest::Approx(ell / lambda).epsilon(1e-8));
}

TEST_CASE("residual of a fixed point and of a shifted fixed point") {
  const double ell = 0.7, lambda = 0.5, eps = 1e-3;
  const auto spec = constant_cost_spec(ell, 100.0, lambda);
  const auto grid = coarse_grid();
  ValueField f(spec, grid, ell / lambda);
  const auto r0 = residual(spec, grid, f);
  for (double x : r0.values()) REQUIRE(std::abs(x) <= 1e-12);
  for (double& x : f.values()) x += eps;
  const double expected = eps * (1.0 - std::exp(-lambda * grid.dt)) / grid.dt;
  const auto r1 = residual(spec, grid, f);
  for (double x : r1.values()) REQUIRE(x == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("saturated benchmark converges to 1 / lambda on P_1") {
  const auto spec = oracle_example_spec(1.0);
  const auto grid = coarse_grid();
  const auto r = solve(spec, grid, 1e-7, 10000);
  CHECK(r.report.converged);
  CHECK(r.report.iterates_decreasing);
  CHECK(r.report.history_monotone);
  CHECK(r.report.bound_respected);
  CHECK(r.report.contraction_ratio <= r.report.theoretical_ratio + 1e-9);
  CHECK(r.report.final_residual == doctest::Approx(r.report.final_change / grid.dt));
  for (std::size_t k = 1; k <= 15; ++k)
    for (std::size_t j = 10; j <= 30; ++j) {
      REQUIRE(r.field.v(1, k, j) == doctest::Approx(1.0).epsilon(1e-5));
      REQUIRE(std::abs(r.field.v(2, k, j)) <= 1e-5);
    }
}

TEST_CASE("solver argument checks") {
  const auto spec = oracle_example_spec(1.0);
  CHECK_THROWS_AS(solve(spec, coarse_grid(), 0.0, 10), std::invalid_argument);
  const auto r = solve(spec, coarse_grid(), 1e-12, 3);
  CHECK_FALSE(r.report.converged);
  CHECK(r.report.iterations == 3);
  CHECK(r.report.history.size() == 3);
  CHECK_THROWS(sup_distance(ValueField(2, 3, 3), ValueField(2, 4, 3)));
}
