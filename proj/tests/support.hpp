#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "junction/problem.hpp"
#include "junction/solver.hpp"

namespace junction::testing {

inline std::vector<ControlSample> disc_controls(std::size_t branch, std::size_t n, bool center = true) {
  std::vector<ControlSample> out;
  for (std::size_t k = 0; k < n; ++k) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    out.push_back({"b" + std::to_string(branch) + "_" + std::to_string(k), branch, {std::cos(th), std::sin(th)}});
  }
  if (center) out.push_back({"b" + std::to_string(branch) + "_c", branch, {0.0, 0.0}});
  return out;
}

inline GridSpec coarse_grid() {
  GridSpec g;
  g.xi_max = 3.0;
  g.x0_min = -2.0;
  g.x0_max = 2.0;
  g.h = 0.1;
  g.dt = 0.05;
  return g;
}

struct RandomSpecOptions {
  std::size_t branches = 2;
  std::size_t samples = 24;
  bool state_dependent = true;
  double lambda = 0.5;
};

// Affine perturbation of the unit-disc problem. The perturbation stays small
// enough that the velocity hull keeps a disc of radius ~0.6 around 0.
inline ProblemSpec random_spec(std::mt19937_64& rng, const RandomSpecOptions& opt = {}) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<HalfPlaneSpec> planes;
  for (std::size_t b = 1; b <= opt.branches; ++b) {
    HalfPlaneSpec p;
    p.controls = disc_controls(b, opt.samples);
    p.dynamics.gain = {1.0 + 0.15 * u(rng), 0.1 * u(rng), 0.1 * u(rng), 1.0 + 0.15 * u(rng)};
    p.dynamics.offset = {0.05 * u(rng), 0.1 * u(rng)};
    if (opt.state_dependent) {
      p.dynamics.state_gain = {0.0, 0.03 * u(rng), 0.02 * u(rng), 0.0};
    }
    p.running_cost.base = 1.0 + 0.3 * u(rng);
    p.running_cost.control_weight = {0.3 * u(rng), 0.3 * u(rng)};
    if (opt.state_dependent) p.running_cost.state_weight = {0.02 * u(rng), 0.05 * u(rng)};
    if (b % 2 == 0) {
      p.entry_cost = VeeEntryCost{1.5 + 0.5 * u(rng), 0.5, 0.5 + 0.3 * std::abs(u(rng)), 0.5 * u(rng)};
    } else {
      p.entry_cost = ConstantEntryCost{1.0 + 0.5 * std::abs(u(rng))};
    }
    p.bound_M = 3.0;
    p.lipschitz_L = 1.0;
    planes.push_back(std::move(p));
  }
  return ProblemSpec(JunctionGeometry(opt.branches), std::move(planes), opt.lambda);
}

inline ValueField random_field(std::mt19937_64& rng, const ProblemSpec& spec, const GridSpec& grid,
                               double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  ValueField f(spec, grid);
  for (double& x : f.values()) x = u(rng);
  return f;
}

}  // namespace junction::testing
