#include "junction/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "junction/hamiltonians.hpp"

namespace junction {

SandwichReport check_sandwich(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field,
                              double tol) {
  SandwichReport r;
  r.allowed_slack = 2.0 * tol / -std::expm1(-spec.lambda() * grid.dt);
  const auto u = field.gamma();
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double x0 = grid.x0(j);
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    for (std::size_t b = 1; b <= spec.n_branches(); ++b) {
      lower = std::max(lower, field.v(b, 0, j));
      upper = std::min(upper, field.v(b, 0, j) + spec.plane(b).entry(x0));
    }
    const double below = lower - u[j];
    const double above = u[j] - upper;
    r.worst_lower_excess = std::max(r.worst_lower_excess, below);
    r.worst_upper_excess = std::max(r.worst_upper_excess, above);
    if (upper - u[j] < r.tightest_upper_gap) {
      r.tightest_upper_gap = upper - u[j];
      r.tightest_upper_node = j;
    }
    if (below > r.allowed_slack) r.violations.push_back({j, x0, false, below});
    if (above > r.allowed_slack) r.violations.push_back({j, x0, true, above});
  }
  return r;
}

namespace {

void require_dominance(const ProblemSpec& a, const ProblemSpec& b, const GridSpec& grid) {
  if (a.n_branches() != b.n_branches() || a.lambda() != b.lambda() ||
      a.tangency_eps() != b.tangency_eps()) {
    throw std::invalid_argument("compared problems differ in structure");
  }
  const std::size_t nx = grid.nx(), ny = grid.ny();
  for (std::size_t br = 1; br <= a.n_branches(); ++br) {
    const auto& pa = a.plane(br);
    const auto& pb = b.plane(br);
    if (pa.controls.size() != pb.controls.size()) {
      throw std::invalid_argument("compared problems have different control samples");
    }
    for (std::size_t j = 0; j <= ny; ++j) {
      const double x0 = grid.x0(j);
      if (pb.entry(x0) < pa.entry(x0)) {
        throw std::invalid_argument("entry cost of B below A at x0 = " + std::to_string(x0));
      }
      for (std::size_t k = 0; k <= nx; ++k) {
        const double xi = grid.xi(k);
        for (std::size_t c = 0; c < pa.controls.size(); ++c) {
          const Velocity fa = pa.velocity(xi, x0, pa.controls[c]);
          const Velocity fb = pb.velocity(xi, x0, pb.controls[c]);
          if (std::abs(fa.normal - fb.normal) > 1e-12 || std::abs(fa.tangential - fb.tangential) > 1e-12) {
            throw std::invalid_argument("compared problems have different dynamics");
          }
          if (pb.cost(xi, x0, pb.controls[c]) < pa.cost(xi, x0, pa.controls[c])) {
            throw std::invalid_argument("running cost of B below A");
          }
        }
      }
    }
  }
}

}  // namespace

ComparisonReport check_monotone_comparison(const ProblemSpec& spec_a, const ProblemSpec& spec_b,
                                           const GridSpec& grid, double tol, std::size_t max_iter,
                                           SolverOptions options) {
  require_dominance(spec_a, spec_b, grid);
  // A common start keeps every iterate ordered, not only the limits.
  const double start = std::max(a_priori_bound(spec_a, grid), a_priori_bound(spec_b, grid));
  auto ra = solve(spec_a, grid, ValueField(spec_a, grid, start), tol, max_iter, options);
  auto rb = solve(spec_b, grid, ValueField(spec_b, grid, start), tol, max_iter, options);
  // Bring both to the same sweep count.
  const SemiLagrangianScheme sa(spec_a, grid, options), sb(spec_b, grid, options);
  ValueField scratch;
  for (std::size_t k = ra.report.iterations; k < rb.report.iterations; ++k) {
    sa.update(ra.field, scratch);
    std::swap(ra.field, scratch);
  }
  for (std::size_t k = rb.report.iterations; k < ra.report.iterations; ++k) {
    sb.update(rb.field, scratch);
    std::swap(rb.field, scratch);
  }
  ComparisonReport r;
  r.iterations = std::max(ra.report.iterations, rb.report.iterations);
  r.allowed_slack = 2.0 * tol;
  const auto va = ra.field.values();
  const auto vb = rb.field.values();
  r.min_gap = std::numeric_limits<double>::infinity();
  r.max_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < va.size(); ++i) {
    r.min_gap = std::min(r.min_gap, vb[i] - va[i]);
    r.max_gap = std::max(r.max_gap, vb[i] - va[i]);
  }
  r.ordered = r.min_gap >= -r.allowed_slack;
  r.bitwise_equal = std::memcmp(va.data(), vb.data(), va.size() * sizeof(double)) == 0;
  r.field_a = std::move(ra.field);
  r.field_b = std::move(rb.field);
  return r;
}

ViscosityResidualReport check_viscosity_residual_interior(const ProblemSpec& spec, const GridSpec& grid,
                                                          const ValueField& field, double kink_curvature) {
  ViscosityResidualReport r;
  const std::size_t nx = field.nx(), ny = field.ny();
  const double h = grid.h;
  double sum = 0.0;
  for (std::size_t b = 1; b <= spec.n_branches(); ++b) {
    for (std::size_t k = 2; k + 2 <= nx; ++k) {
      for (std::size_t j = 2; j + 2 <= ny; ++j) {
        const double v = field.v(b, k, j);
        const double vn_p = field.v(b, k + 1, j), vn_m = field.v(b, k - 1, j);
        const double vt_p = field.v(b, k, j + 1), vt_m = field.v(b, k, j - 1);
        const double curv = std::max(std::abs(vn_p - 2.0 * v + vn_m), std::abs(vt_p - 2.0 * v + vt_m)) / (h * h);
        if (curv >= kink_curvature) {
          ++r.nodes_excluded;
          continue;
        }
        const Covector p{(vn_p - vn_m) / (2.0 * h), (vt_p - vt_m) / (2.0 * h)};
        const double res = spec.lambda() * v + hamiltonian(spec, b, grid.xi(k), grid.x0(j), p);
        ++r.nodes_checked;
        sum += std::abs(res);
        r.max_positive = std::max(r.max_positive, res);
        r.min_negative = std::min(r.min_negative, res);
        if (std::abs(res) > r.max_abs) {
          r.max_abs = std::abs(res);
          r.worst_branch = b;
          r.worst_xi = grid.xi(k);
          r.worst_x0 = grid.x0(j);
        }
      }
    }
  }
  if (r.nodes_checked > 0) r.mean_abs = sum / static_cast<double>(r.nodes_checked);
  return r;
}

const char* to_string(ControllabilityClass c) {
  switch (c) {
    case ControllabilityClass::strong: return "strong";
    case ControllabilityClass::moderate: return "moderate";
    case ControllabilityClass::neither: return "neither";
  }
  return "unknown";
}

ControllabilityReport check_controllability_regime(const ProblemSpec& spec, const GridSpec& grid,
                                                   double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("controllability delta must be positive");
  ControllabilityReport r;
  r.delta = delta;
  for (std::size_t j = 0; j <= grid.ny(); ++j) {
    const double x0 = grid.x0(j);
    if (!audit_strong_controllability(spec, x0, delta)) r.strong_failures.push_back(x0);
    if (!audit_moderate_controllability(spec, x0, delta)) r.moderate_failures.push_back(x0);
  }
  if (r.strong_failures.empty()) {
    r.classification = ControllabilityClass::strong;
  } else if (r.moderate_failures.empty()) {
    r.classification = ControllabilityClass::moderate;
  }
  return r;
}

ControllabilityReport check_controllability_regime(const ProblemSpec& spec, const GridSpec& grid) {
  return check_controllability_regime(spec, grid, spec.controllability_delta());
}

double interface_lipschitz_quotient(const GridSpec& grid, const ValueField& field, double band) {
  double q = 0.0;
  const std::size_t kmax = std::min(field.nx(), static_cast<std::size_t>(std::floor(band / grid.h + 1e-9)));
  for (std::size_t b = 1; b <= field.n_branches(); ++b) {
    for (std::size_t k = 1; k <= kmax; ++k) {
      for (std::size_t j = 0; j <= field.ny(); ++j) {
        q = std::max(q, std::abs(field.v(b, k, j) - field.v(b, k - 1, j)) / grid.h);
        if (j > 0) q = std::max(q, std::abs(field.v(b, k, j) - field.v(b, k, j - 1)) / grid.h);
      }
    }
  }
  return q;
}

}  // namespace junction
