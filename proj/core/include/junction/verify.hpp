#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "junction/problem.hpp"
#include "junction/solver.hpp"

namespace junction {

struct SandwichViolation {
  std::size_t node;
  double x0;
  bool upper;      ///< true: u_gamma above min_i (v_i + c_i); false: below max_i v_i
  double excess;   ///< amount by which the inequality fails
};

/// max_i v_i(0, x0) <= u_gamma(x0) <= min_i (v_i(0, x0) + c_i(x0)) at every
/// interface node, each allowed to fail by at most `allowed_slack`.
struct SandwichReport {
  double allowed_slack = 0.0;
  double worst_lower_excess = -std::numeric_limits<double>::infinity();
  double worst_upper_excess = -std::numeric_limits<double>::infinity();
  /// Smallest gap min_i(v_i + c_i) - u_gamma over the nodes.
  double tightest_upper_gap = std::numeric_limits<double>::infinity();
  std::size_t tightest_upper_node = 0;
  std::vector<SandwichViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// Slack is 2 tol / (1 - exp(-lambda dt)), the distance a field converged
/// to sweep change `tol` may sit from the exact fixed point, doubled.
SandwichReport check_sandwich(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field,
                              double tol);

struct ComparisonReport {
  /// min over unknowns of field_b - field_a.
  double min_gap = 0.0;
  double max_gap = 0.0;
  double allowed_slack = 0.0;
  std::size_t iterations = 0;
  bool ordered = false;
  bool bitwise_equal = false;
  ValueField field_a;
  ValueField field_b;
};

/// Solves both problems from the a priori starting value for the same
/// number of sweeps and checks field_b >= field_a - 2 tol.
///
/// B must dominate A: identical geometry, control samples and dynamics on
/// the grid, and l^B >= l^A, c^B >= c^A at every node. Throws
/// std::invalid_argument otherwise.
ComparisonReport check_monotone_comparison(const ProblemSpec& spec_a, const ProblemSpec& spec_b,
                                           const GridSpec& grid, double tol, std::size_t max_iter,
                                           SolverOptions options = {});

struct ViscosityResidualReport {
  double max_abs = 0.0;
  double max_positive = 0.0;
  double min_negative = 0.0;
  double mean_abs = 0.0;
  std::size_t nodes_checked = 0;
  std::size_t nodes_excluded = 0;
  std::size_t worst_branch = 0;
  double worst_xi = 0.0;
  double worst_x0 = 0.0;
};

/// Curvature |second difference| / h^2 at or above which a node counts as a
/// kink and is left out of the residual.
inline constexpr double kDefaultKinkCurvature = 10.0;

/// lambda v_i + H_i(x, grad v_i) with centred differences at nodes at least
/// 2h away from the interface and the truncation boundary.
ViscosityResidualReport check_viscosity_residual_interior(const ProblemSpec& spec, const GridSpec& grid,
                                                          const ValueField& field,
                                                          double kink_curvature = kDefaultKinkCurvature);

enum class ControllabilityClass { strong, moderate, neither };

const char* to_string(ControllabilityClass c);

struct ControllabilityReport {
  double delta = 0.0;
  ControllabilityClass classification = ControllabilityClass::neither;
  /// Interface nodes failing each audit.
  std::vector<double> strong_failures;
  std::vector<double> moderate_failures;
  /// Without either assumption the solver's guarantees do not apply.
  bool guarantees_hold() const { return classification != ControllabilityClass::neither; }
};

/// Runs both audits at every interface node with the problem's declared delta.
ControllabilityReport check_controllability_regime(const ProblemSpec& spec, const GridSpec& grid);
/// Same with an explicit delta; throws std::invalid_argument for delta <= 0.
ControllabilityReport check_controllability_regime(const ProblemSpec& spec, const GridSpec& grid,
                                                   double delta);

/// Largest difference quotient of any v_i between neighbouring nodes with
/// xi <= band. Measured only; no bound is asserted.
double interface_lipschitz_quotient(const GridSpec& grid, const ValueField& field, double band);

}  // namespace junction
