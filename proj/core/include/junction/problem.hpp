#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "junction/geometry.hpp"

namespace junction {

/// A velocity split into its e_i component (`normal`, positive pointing
/// into the half-plane) and its e_0 component (`tangential`).
struct Velocity {
  double normal = 0.0;
  double tangential = 0.0;
};

/// One element of the finite sample of a half-plane's control set.
/// `value` holds the control parameters (a_i, a_0).
struct ControlSample {
  std::string id;
  std::size_t branch = 1;
  std::array<double, 2> value{0.0, 0.0};
};

/// f(x, a) = gain * a + offset + state_gain * (xi, x0), row-major 2x2 gains.
/// Rows are (normal, tangential).
struct AffineDynamics {
  std::array<double, 4> gain{1.0, 0.0, 0.0, 1.0};
  Velocity offset{};
  std::array<double, 4> state_gain{0.0, 0.0, 0.0, 0.0};

  bool state_independent() const;
  Velocity operator()(double xi, double x0, const ControlSample& a) const;
};

/// l(x, a) = base + control_weight . a + state_weight . (xi, x0)
///           + step_jump * [x0 >= step_at].
struct RunningCost {
  double base = 0.0;
  std::array<double, 2> control_weight{0.0, 0.0};
  std::array<double, 2> state_weight{0.0, 0.0};
  double step_at = std::numeric_limits<double>::infinity();
  double step_jump = 0.0;

  bool state_independent() const;
  double operator()(double xi, double x0, const ControlSample& a) const;
};

struct ConstantEntryCost {
  double value = 1.0;
};

/// max(floor, peak - slope * |x0 - center|).
struct VeeEntryCost {
  double peak = 3.0;
  double slope = 1.0;
  double floor = 2.0;
  double center = 0.0;
};

/// Piecewise linear through (x0, value) knots, flat outside the knot range.
struct TabulatedEntryCost {
  std::vector<double> x0;
  std::vector<double> value;
};

using EntryCostModel = std::variant<ConstantEntryCost, VeeEntryCost, TabulatedEntryCost>;

double evaluate_entry_cost(const EntryCostModel& model, double x0);

struct HalfPlaneSpec {
  std::vector<ControlSample> controls;
  AffineDynamics dynamics;
  RunningCost running_cost;
  EntryCostModel entry_cost = ConstantEntryCost{};
  /// Declared sup bound on |f| and |l|.
  double bound_M = 1.0;
  /// Declared Lipschitz constant of f, l and the entry cost.
  double lipschitz_L = 1.0;

  Velocity velocity(double xi, double x0, const ControlSample& a) const {
    return dynamics(xi, x0, a);
  }
  double cost(double xi, double x0, const ControlSample& a) const {
    return running_cost(xi, x0, a);
  }
  double entry(double x0) const { return evaluate_entry_cost(entry_cost, x0); }
};

enum class ControllabilityMode { strong, moderate };

/// Immutable control problem on a junction. Construction validates the
/// structural invariants and throws std::invalid_argument on violation.
class ProblemSpec {
 public:
  ProblemSpec(JunctionGeometry geometry, std::vector<HalfPlaneSpec> planes, double lambda,
              double tangency_eps = 1e-9,
              ControllabilityMode mode = ControllabilityMode::strong,
              double controllability_delta = 0.5);

  const JunctionGeometry& geometry() const { return geometry_; }
  std::size_t n_branches() const { return planes_.size(); }
  /// Half-plane data for branch i in 1..N.
  const HalfPlaneSpec& plane(std::size_t branch) const;
  const std::vector<HalfPlaneSpec>& planes() const { return planes_; }
  double lambda() const { return lambda_; }
  double tangency_eps() const { return tangency_eps_; }
  ControllabilityMode mode() const { return mode_; }
  double controllability_delta() const { return delta_; }

  /// max over branches of the declared bound M.
  double bound_M() const;

 private:
  JunctionGeometry geometry_;
  std::vector<HalfPlaneSpec> planes_;
  double lambda_;
  double tangency_eps_;
  ControllabilityMode mode_;
  double delta_;
};

enum class ViolationKind {
  dynamics_bound,
  running_cost_bound,
  dynamics_lipschitz,
  running_cost_lipschitz,
  entry_cost_nonpositive,
  entry_cost_lipschitz,
};

const char* to_string(ViolationKind kind);

struct AuditViolation {
  ViolationKind kind;
  std::size_t branch = 0;
  std::string control_id;
  JunctionPoint at;
  /// Observed quantity (norm, quotient, or cost value).
  double observed = 0.0;
  /// The declared bound it was compared against.
  double bound = 0.0;
};

struct AuditReport {
  std::vector<AuditViolation> violations;
  /// Smallest entry cost seen over the interface samples (the empirical C).
  double min_entry_cost = std::numeric_limits<double>::infinity();
  double max_dynamics_norm = 0.0;
  double max_running_cost = 0.0;
  double max_lipschitz_dynamics = 0.0;
  double max_lipschitz_running_cost = 0.0;

  bool ok() const { return violations.empty(); }
};

/// Empirical check of boundedness, Lipschitz continuity and entry-cost
/// positivity over the given samples. Interface samples count as members of
/// every half-plane.
AuditReport audit_regularity(const ProblemSpec& spec, const std::vector<JunctionPoint>& samples);

/// Does every half-plane's convexified velocity set contain the disc of
/// radius delta (sampled at `directions` angles plus the four axis
/// directions) at the interface point x0? Throws for delta <= 0.
bool audit_strong_controllability(const ProblemSpec& spec, double x0, double delta,
                                  std::size_t directions = 64);

/// Normal velocities span [-delta, delta] on every branch and some branch's
/// tangential velocities span [-delta, delta] along the interface.
/// Throws for delta <= 0.
bool audit_moderate_controllability(const ProblemSpec& spec, double x0, double delta);

}  // namespace junction
