#include "junction/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace junction {

namespace {

// Cost of running at unit cost for time tau, then entering P_2 at cost 2.
double run_then_enter(double lambda, double tau) {
  const double decay = std::exp(-lambda * tau);
  return (1.0 - decay) / lambda + 2.0 * decay;
}

double branch1_value(const ExampleRegime& reg, double xi, double x0) {
  if (reg.regime == Regime::saturated) return 1.0 / reg.lambda;
  const double a0 = std::abs(x0);
  const double tau = a0 >= 1.0 ? xi : std::hypot(xi, 1.0 - a0);
  return run_then_enter(reg.lambda, tau);
}

ControlSample control(std::size_t branch, std::string id, double ai, double a0) {
  return {std::move(id), branch, {ai, a0}};
}

}  // namespace

ExampleRegime ExampleRegime::from_lambda(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("discount rate must be positive");
  return {lambda, 2.0 >= 1.0 / lambda ? Regime::saturated : Regime::entering};
}

ProblemSpec oracle_example_spec(double lambda, const ExampleOptions& options) {
  if (options.boundary_samples < 4) {
    throw std::invalid_argument("need at least four disc boundary samples");
  }
  std::vector<HalfPlaneSpec> planes(2);
  for (std::size_t b = 1; b <= 2; ++b) {
    auto& plane = planes[b - 1];
    const std::size_t n = options.boundary_samples;
    for (std::size_t k = 0; k < n; ++k) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      char id[32];
      std::snprintf(id, sizeof id, "a%zu_%03zu", b, k);
      plane.controls.push_back(control(b, id, std::cos(th), std::sin(th)));
    }
    if (options.include_center) {
      plane.controls.push_back(control(b, "a" + std::to_string(b) + "_center", 0.0, 0.0));
    }
  }
  planes[0].running_cost.base = 1.0;
  planes[0].entry_cost = ConstantEntryCost{options.entry_cost_branch1};
  planes[0].bound_M = 1.0;
  planes[0].lipschitz_L = 1.0;

  planes[1].running_cost.base = 1.0;
  planes[1].running_cost.control_weight = {-1.0, 0.0};
  planes[1].entry_cost = VeeEntryCost{3.0, 1.0, 2.0, 0.0};
  planes[1].bound_M = 2.0;
  planes[1].lipschitz_L = 1.0;

  return ProblemSpec(JunctionGeometry(2), std::move(planes), lambda);
}

static void check_regime(const ExampleRegime& reg) {
  if (ExampleRegime::from_lambda(reg.lambda).regime != reg.regime) {
    throw std::invalid_argument("regime label does not match the discount rate");
  }
}

double oracle_value(const ExampleRegime& reg, const JunctionPoint& x) {
  check_regime(reg);
  const auto p = canonicalize(x);
  if (p.branch > 2) throw std::out_of_range("the benchmark junction has two branches");
  if (p.on_gamma()) {
    throw std::domain_error("the value is discontinuous at the interface; use the one-sided limits");
  }
  if (p.branch == 2) return 0.0;
  return branch1_value(reg, p.xi, p.x0);
}

InterfaceLimits oracle_interface_limits(const ExampleRegime& reg, double x0) {
  check_regime(reg);
  return {branch1_value(reg, 0.0, x0), 0.0};
}

double oracle_interface_value(const ExampleRegime& reg, double x0, double entry_cost_branch1) {
  check_regime(reg);
  const double enter2 = std::max(2.0, 3.0 - std::abs(x0));
  const double along = branch1_value(reg, 0.0, x0);
  const double enter1 = entry_cost_branch1 + along;
  return std::min({enter2, enter1, along});
}

}  // namespace junction
