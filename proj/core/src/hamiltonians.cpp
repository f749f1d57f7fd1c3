#include "junction/hamiltonians.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace junction {

namespace {

double integrand(const HalfPlaneSpec& plane, double xi, double x0, const ControlSample& a, Covector p) {
  const Velocity f = plane.velocity(xi, x0, a);
  return -(f.normal * p.normal + f.tangential * p.tangential) - plane.cost(xi, x0, a);
}

template <class Filter>
std::vector<std::size_t> filter_controls(const ProblemSpec& spec, std::size_t branch, double x0, Filter keep) {
  const auto& plane = spec.plane(branch);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < plane.controls.size(); ++k) {
    if (keep(plane.velocity(0.0, x0, plane.controls[k]).normal)) out.push_back(k);
  }
  return out;
}

}  // namespace

std::vector<std::size_t> control_set_plus(const ProblemSpec& spec, std::size_t branch, double x0) {
  const double eps = spec.tangency_eps();
  return filter_controls(spec, branch, x0, [eps](double fn) { return fn >= -eps; });
}

std::vector<std::size_t> control_set_gamma(const ProblemSpec& spec, std::size_t branch, double x0) {
  const double eps = spec.tangency_eps();
  return filter_controls(spec, branch, x0, [eps](double fn) { return std::abs(fn) <= eps; });
}

HamiltonianArgmax hamiltonian_argmax(const ProblemSpec& spec, std::size_t branch, double xi,
                                     double x0, Covector p) {
  const auto& plane = spec.plane(branch);
  HamiltonianArgmax best{-std::numeric_limits<double>::infinity(), branch, 0};
  for (std::size_t k = 0; k < plane.controls.size(); ++k) {
    const double v = integrand(plane, xi, x0, plane.controls[k], p);
    if (v > best.value) best = {v, branch, k};
  }
  if (plane.controls.empty()) throw std::invalid_argument("empty control set");
  return best;
}

double hamiltonian(const ProblemSpec& spec, std::size_t branch, double xi, double x0, Covector p) {
  return hamiltonian_argmax(spec, branch, xi, x0, p).value;
}

double hamiltonian_plus(const ProblemSpec& spec, std::size_t branch, double x0, Covector p) {
  const auto& plane = spec.plane(branch);
  const auto idx = control_set_plus(spec, branch, x0);
  if (idx.empty()) throw std::invalid_argument("A_i^+ is empty at this interface point");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k : idx) best = std::max(best, integrand(plane, 0.0, x0, plane.controls[k], p));
  return best;
}

HamiltonianArgmax hamiltonian_gamma_argmax(const ProblemSpec& spec, double x0, double p0) {
  HamiltonianArgmax best{-std::numeric_limits<double>::infinity(), 0, 0};
  bool any = false;
  for (std::size_t b = 1; b <= spec.n_branches(); ++b) {
    const auto& plane = spec.plane(b);
    for (std::size_t k : control_set_gamma(spec, b, x0)) {
      any = true;
      const double v = integrand(plane, 0.0, x0, plane.controls[k], {0.0, p0});
      if (v > best.value) best = {v, b, k};
    }
  }
  if (!any) throw std::domain_error("no branch has a tangential control at this interface point");
  return best;
}

double hamiltonian_gamma(const ProblemSpec& spec, double x0, double p0) {
  return hamiltonian_gamma_argmax(spec, x0, p0).value;
}

}  // namespace junction
