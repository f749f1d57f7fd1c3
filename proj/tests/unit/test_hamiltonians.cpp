#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "junction/hamiltonians.hpp"
#include "junction/oracle.hpp"
#include "support.hpp"

using namespace junction;

TEST_CASE("P_2 admissible controls at the interface are the inward half of the disc") {
  const auto spec = oracle_example_spec(1.0);
  const auto plus = control_set_plus(spec, 2, 0.3);
  // 64 boundary samples: k = 0..16 and 48..63 have a_2 >= 0, plus the centre
  CHECK(plus.size() == 34);
  for (auto k : plus) CHECK(spec.plane(2).controls[k].value[0] >= -1e-12);
}

TEST_CASE("tangential controls of the benchmark") {
  const auto spec = oracle_example_spec(1.0);
  const auto g = control_set_gamma(spec, 1, 0.0);
  REQUIRE(g.size() == 3);
  for (auto k : g) CHECK(std::abs(spec.plane(1).controls[k].value[0]) <= 1e-9);
  const auto plus = control_set_plus(spec, 1, 0.0);
  for (auto k : g) CHECK(std::find(plus.begin(), plus.end(), k) != plus.end());
}

TEST_CASE("all-inward and all-outward dynamics") {
  auto planes = oracle_example_spec(1.0).planes();
  planes[0].dynamics.gain = {0.2, 0.0, 0.0, 1.0};
  planes[0].dynamics.offset = {0.5, 0.0};
  planes[1].dynamics.gain = {0.2, 0.0, 0.0, 1.0};
  planes[1].dynamics.offset = {-0.5, 0.0};
  const ProblemSpec spec(JunctionGeometry(2), planes, 1.0);
  CHECK(control_set_plus(spec, 1, 0.0).size() == planes[0].controls.size());
  CHECK(control_set_plus(spec, 2, 0.0).empty());
  CHECK(control_set_gamma(spec, 1, 0.0).empty());
  CHECK_THROWS_AS(hamiltonian_plus(spec, 2, 0.0, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("H_1 of the benchmark is |p| - 1 up to disc sampling") {
  const auto spec = oracle_example_spec(1.0);
  const double err = 5.0 * (1.0 - std::cos(std::numbers::pi / 64.0));
  CHECK(hamiltonian(spec, 1, 1.0, 0.0, {3.0, 4.0}) == doctest::Approx(4.0).epsilon(err / 4.0));
  CHECK(hamiltonian(spec, 1, 1.0, 0.0, {3.0, 4.0}) <= 4.0 + 1e-12);
  CHECK(hamiltonian(spec, 1, 2.0, 1.0, {0.0, 0.0}) == doctest::Approx(-1.0));
}

TEST_CASE("H_2 at zero gradient is attained by the free exit control") {
  const auto spec = oracle_example_spec(1.0);
  const auto h = hamiltonian_argmax(spec, 2, 1.0, 0.0, {0.0, 0.0});
  CHECK(h.value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(spec.plane(2).controls[h.control].id == "a2_000");
}

TEST_CASE("H_1^+ against H_1") {
  const auto spec = oracle_example_spec(1.0);
  CHECK(hamiltonian_plus(spec, 1, 0.0, {-1.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(hamiltonian(spec, 1, 0.0, 0.0, {-1.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(hamiltonian(spec, 1, 0.0, 0.0, {1.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(hamiltonian_plus(spec, 1, 0.0, {1.0, 0.0}) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("a single inward control gives H^+ = H") {
  auto planes = oracle_example_spec(1.0).planes();
  planes[0].controls = {{"only", 1, {1.0, 0.0}}};
  const ProblemSpec spec(JunctionGeometry(2), planes, 1.0);
  for (double p : {-2.0, 0.0, 3.0}) {
    CHECK(hamiltonian_plus(spec, 1, 0.0, {p, 1.0}) == hamiltonian(spec, 1, 0.0, 0.0, {p, 1.0}));
  }
}

TEST_CASE("interface Hamiltonian of the benchmark") {
  const auto spec = oracle_example_spec(1.0);
  CHECK(hamiltonian_gamma(spec, 0.0, 0.0) == doctest::Approx(-1.0));
  CHECK(hamiltonian_gamma(spec, 0.0, 2.0) == doctest::Approx(1.0));
  CHECK(hamiltonian_gamma(spec, 0.0, -2.0) == doctest::Approx(1.0));
}

TEST_CASE("interface Hamiltonian reduces to the only branch with tangential controls") {
  auto planes = oracle_example_spec(1.0).planes();
  planes[1].dynamics.offset = {0.5, 0.0};
  planes[1].dynamics.gain = {0.2, 0.0, 0.0, 1.0};
  const ProblemSpec spec(JunctionGeometry(2), planes, 1.0);
  REQUIRE(control_set_gamma(spec, 2, 0.0).empty());
  const auto h = hamiltonian_gamma_argmax(spec, 0.0, 2.0);
  CHECK(h.branch == 1);
  planes[0].dynamics = planes[1].dynamics;
  const ProblemSpec none(JunctionGeometry(2), planes, 1.0);
  CHECK_THROWS_AS(hamiltonian_gamma(none, 0.0, 1.0), std::domain_error);
}

TEST_CASE("Hamiltonians are convex, nested and coercive") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const auto spec = junction::testing::random_spec(rng);
  for (int i = 0; i < 200; ++i) {
    const Covector p{u(rng), u(rng)}, q{u(rng), u(rng)};
    const Covector m{0.5 * (p.normal + q.normal), 0.5 * (p.tangential + q.tangential)};
    const double x0 = u(rng) / 3.0;
    for (std::size_t b = 1; b <= 2; ++b) {
      const double hm = hamiltonian(spec, b, 0.0, x0, m);
      CHECK(hm <= 0.5 * (hamiltonian(spec, b, 0.0, x0, p) + hamiltonian(spec, b, 0.0, x0, q)) + 1e-12);
      CHECK(hamiltonian_plus(spec, b, x0, p) <= hamiltonian(spec, b, 0.0, x0, p) + 1e-15);
    }
    const auto bench = oracle_example_spec(1.0);
    CHECK(hamiltonian_gamma(bench, x0, p.tangential) <=
          std::max(hamiltonian_plus(bench, 1, x0, p), hamiltonian_plus(bench, 2, x0, p)) + 1e-12);
  }
  // |p| -> infinity drives H to infinity at rate at least delta
  const double h10 = hamiltonian(spec, 1, 1.0, 0.0, {10.0, 0.0});
  const double h100 = hamiltonian(spec, 1, 1.0, 0.0, {100.0, 0.0});
  CHECK(h100 - h10 >= 0.5 * 90.0);
}
