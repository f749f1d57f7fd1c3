#pragma once

#include <cstddef>

#include "junction/geometry.hpp"
#include "junction/problem.hpp"

namespace junction {

/// Two-half-plane benchmark with a closed-form value function.
///
/// P_1 has unit-disc controls (a_1, a_0), velocity (a_1, a_0) and running
/// cost 1. P_2 has the same controls with running cost 1 - a_2, so moving
/// away from the interface at unit speed is free. Entering P_2 costs
/// max(2, 3 - |x0|); entering P_1 costs a constant C_1.
///
/// When min c_2 = 2 >= 1/lambda it never pays to leave P_1 and V = 1/lambda
/// there ("saturated"); otherwise the optimal path heads for the nearest
/// point of the cheap part |x0| >= 1 of the interface and enters P_2
/// ("entering").
enum class Regime { saturated, entering };

struct ExampleRegime {
  double lambda;
  Regime regime;

  /// Picks the regime implied by lambda. Throws for lambda <= 0.
  static ExampleRegime from_lambda(double lambda);
};

struct ExampleOptions {
  std::size_t boundary_samples = 64;
  bool include_center = true;
  double entry_cost_branch1 = 10.0;
};

/// Builds the benchmark problem. Controls are the disc boundary sampled at
/// angles 2*pi*k/n (k = 0 is a_i = 1) followed by the centre.
ProblemSpec oracle_example_spec(double lambda, const ExampleOptions& options = {});

/// Closed-form value at a point strictly inside P_1 or P_2.
/// Throws std::out_of_range for a branch other than 1 or 2 and
/// std::domain_error for interface points (use the functions below).
double oracle_value(const ExampleRegime& reg, const JunctionPoint& x);

/// One-sided limits of the value function at an interface point.
struct InterfaceLimits {
  double from_branch1;
  double from_branch2;
};
InterfaceLimits oracle_interface_limits(const ExampleRegime& reg, double x0);

/// Value of a trajectory started on the interface itself: the best of
/// entering P_2 now, entering P_1 now, and travelling along the interface
/// (which has the same cost as the P_1-side limit).
double oracle_interface_value(const ExampleRegime& reg, double x0,
                              double entry_cost_branch1 = ExampleOptions{}.entry_cost_branch1);

}  // namespace junction
