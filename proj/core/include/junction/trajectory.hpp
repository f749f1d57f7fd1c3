#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "junction/geometry.hpp"
#include "junction/problem.hpp"
#include "junction/solver.hpp"

namespace junction {

/// Hold control `control` (index into plane(branch).controls) for `duration`.
struct ScheduleSegment {
  double duration = 0.0;
  std::size_t branch = 1;
  std::size_t control = 0;
};

/// Piecewise-constant open-loop control.
///
/// A segment whose control points out of its half-plane ends early when the
/// state reaches the interface; its unused time is handed to the next
/// segment, so the total horizon is always the sum of the durations.
struct ControlSchedule {
  std::vector<ScheduleSegment> segments;

  double horizon() const;
};

/// Thrown when a schedule cannot be realised by an admissible trajectory.
class InadmissibleSchedule : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Leaving the interface into P_branch at time t and point x0.
struct EntryEvent {
  std::size_t branch;
  double t;
  JunctionPoint at;
};

/// Reaching the interface from inside P_branch at time t.
struct ExitEvent {
  std::size_t branch;
  double t;
};

enum class EventFlag { none, entry, exit };

struct TrajectorySample {
  double t;
  JunctionPoint point;
  EventFlag event = EventFlag::none;
};

/// One integration step: the state moved from `from` to `to` over
/// [t0, t1] under control `control` of `branch`.
struct TrajectoryPiece {
  double t0;
  double t1;
  JunctionPoint from;
  JunctionPoint to;
  std::size_t branch;
  std::size_t control;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<TrajectoryPiece> pieces;
  std::vector<EntryEvent> entry_events;
  std::vector<ExitEvent> exit_events;
  /// Segments cut short on reaching the interface.
  std::size_t truncated_segments = 0;

  const JunctionPoint& end() const { return samples.back().point; }
  double end_time() const { return samples.back().t; }
};

/// Stateful forward-Euler integrator on the junction. Crossings of the
/// interface inside a step are located by linear interpolation and the
/// step is cut there, so the state lands exactly on the interface.
class JunctionIntegrator {
 public:
  JunctionIntegrator(const ProblemSpec& spec, JunctionPoint start, double dt_int);

  /// Holds the control for `duration` or until the interface stops it.
  /// Returns the unused time (non-zero only when the control points out of
  /// the half-plane at the interface). Throws InadmissibleSchedule when the
  /// control belongs to a branch other than the one containing the state.
  double advance(std::size_t branch, std::size_t control, double duration);

  const JunctionPoint& state() const { return traj_.samples.back().point; }
  double time() const { return traj_.samples.back().t; }
  const Trajectory& trajectory() const { return traj_; }
  Trajectory release() { return std::move(traj_); }

 private:
  const ProblemSpec& spec_;
  double dt_;
  Trajectory traj_;
};

/// Integrates the schedule from x0. Throws InadmissibleSchedule (see
/// JunctionIntegrator) and std::invalid_argument for dt_int <= 0 or an
/// empty schedule.
Trajectory simulate(const ProblemSpec& spec, const JunctionPoint& x0, const ControlSchedule& schedule,
                    double dt_int);

/// Events alternate per branch (entry before exit, non-decreasing times)
/// and every entry point lies on the interface.
bool events_consistent(const Trajectory& traj);

struct CostBreakdown {
  /// Trapezoidal discounted running cost over the simulated horizon.
  double running = 0.0;
  /// Sum of c_i(x_ik) exp(-lambda t_ik) over entry events.
  double entry = 0.0;
  /// Bound M exp(-lambda T) / lambda on the cost after the horizon.
  double tail_bound = 0.0;

  double total() const { return running + entry; }
};

CostBreakdown cost(const ProblemSpec& spec, const Trajectory& traj);

/// Copy of the trajectory with the entry events removed.
Trajectory strip_entry_events(Trajectory traj);

/// CSV with columns t,branch,xi,x0,event (event is none, entry or exit).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Feedback decision: hold `control` of `branch` for one step. `enter` marks
/// a decision taken on the interface to pay c_branch and move into P_branch.
struct PolicyDecision {
  std::size_t branch;
  std::size_t control;
  bool enter = false;
};

/// Greedy policy of a value field: the argmin of the update clauses at an
/// arbitrary point. Ties resolve to the lowest (branch, control index).
class FeedbackPolicy {
 public:
  FeedbackPolicy(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field);

  PolicyDecision decide(const JunctionPoint& x) const;
  const SemiLagrangianScheme& scheme() const { return scheme_; }
  const ValueField& field() const { return field_; }

 private:
  SemiLagrangianScheme scheme_;
  ValueField field_;
};

FeedbackPolicy extract_policy(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field);

struct DppResult {
  double running_and_entry = 0.0;  ///< realised cost on [0, horizon]
  double terminal = 0.0;           ///< exp(-lambda T) * field(x_T)
  double start_value = 0.0;        ///< field(x0)
  double residual = 0.0;           ///< running_and_entry + terminal - start_value
  Trajectory trajectory;
};

/// Rolls out the field's greedy policy (re-deciding every grid.dt) and
/// compares the realised cost plus discounted terminal value to the field
/// value at the start.
DppResult dpp_residual(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field,
                       const JunctionPoint& x0, double horizon);

/// Same comparison for an arbitrary open-loop schedule; admissible schedules
/// give residual >= -(scheme error).
DppResult dpp_residual(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field,
                       const JunctionPoint& x0, const ControlSchedule& schedule, double dt_int);

struct ControlRef {
  std::size_t branch;
  std::size_t control;
};

struct BruteForceOptions {
  double horizon = 40.0;
  std::size_t segments = 2;
  /// Durations tried for every segment but the last, which fills the horizon.
  std::vector<double> duration_mesh;
  double dt_int = 0.05;
  std::size_t budget = 2'000'000;
  std::size_t threads = 1;
};

struct BruteForceResult {
  double value = std::numeric_limits<double>::infinity();
  double tail_bound = 0.0;
  ControlSchedule best;
  std::size_t evaluated = 0;
  std::size_t inadmissible = 0;
};

/// Minimum finite-horizon cost over every piecewise-constant schedule with
/// the given number of segments drawn from `candidates` and durations from
/// the mesh. value + tail_bound bounds V(x0) from above. Throws
/// std::length_error when the enumeration exceeds the budget.
BruteForceResult brute_force_value(const ProblemSpec& spec, const JunctionPoint& x0,
                                   const std::vector<ControlRef>& candidates,
                                   const BruteForceOptions& options);

/// Looks up a control by id; throws std::out_of_range when absent.
ControlRef find_control(const ProblemSpec& spec, std::size_t branch, const std::string& id);

}  // namespace junction
