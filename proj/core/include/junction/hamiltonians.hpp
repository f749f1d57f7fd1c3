#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "junction/problem.hpp"

namespace junction {

/// Gradient components: `normal` along e_i, `tangential` along e_0.
struct Covector {
  double normal = 0.0;
  double tangential = 0.0;
};

/// Indices (into plane(i).controls) of controls not pointing out of P_i at
/// the interface point x0: f_i . e_i >= -tangency_eps.
std::vector<std::size_t> control_set_plus(const ProblemSpec& spec, std::size_t branch, double x0);

/// Indices of tangential controls at the interface: |f_i . e_i| <= tangency_eps.
std::vector<std::size_t> control_set_gamma(const ProblemSpec& spec, std::size_t branch, double x0);

/// Maximizer of a Hamiltonian; ties resolve to the lowest (branch, index).
struct HamiltonianArgmax {
  double value;
  std::size_t branch;
  std::size_t control;
};

/// H_i(x, p) = max_a { -f_i(x,a) . p - l_i(x,a) } over the whole sample.
/// x is given by its coordinates on P_i (xi = 0 on the interface).
/// Throws std::invalid_argument for an empty control set.
double hamiltonian(const ProblemSpec& spec, std::size_t branch, double xi, double x0, Covector p);
HamiltonianArgmax hamiltonian_argmax(const ProblemSpec& spec, std::size_t branch, double xi,
                                     double x0, Covector p);

/// H_i^+ at an interface point: the same maximum restricted to control_set_plus.
double hamiltonian_plus(const ProblemSpec& spec, std::size_t branch, double x0, Covector p);

/// H_Gamma(x, p0): maximum of -f0 * p0 - l over the tangential controls of
/// every branch. Throws std::domain_error when no branch has one.
double hamiltonian_gamma(const ProblemSpec& spec, double x0, double p0);
HamiltonianArgmax hamiltonian_gamma_argmax(const ProblemSpec& spec, double x0, double p0);

}  // namespace junction
