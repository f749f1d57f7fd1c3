#include "junction/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>

#include "junction/parallel.hpp"

namespace junction {

namespace {

constexpr double kTimeTolerance = 1e-12;

const char* to_string(EventFlag e) {
  switch (e) {
    case EventFlag::entry: return "entry";
    case EventFlag::exit: return "exit";
    case EventFlag::none: break;
  }
  return "none";
}

}  // namespace

double ControlSchedule::horizon() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

JunctionIntegrator::JunctionIntegrator(const ProblemSpec& spec, JunctionPoint start, double dt_int)
    : spec_(spec), dt_(dt_int) {
  if (!(dt_int > 0.0)) throw std::invalid_argument("integration step must be positive");
  start = canonicalize(start);
  if (start.branch > spec.n_branches()) throw std::out_of_range("start branch out of range");
  traj_.samples.push_back({0.0, start, EventFlag::none});
}

double JunctionIntegrator::advance(std::size_t branch, std::size_t control, double duration) {
  const auto& plane = spec_.plane(branch);
  if (control >= plane.controls.size()) throw std::out_of_range("control index out of range");
  const auto& a = plane.controls[control];
  const double eps = spec_.tangency_eps();
  double remaining = duration;
  while (remaining > kTimeTolerance) {
    const JunctionPoint x = state();
    const double t = time();
    if (!x.on_gamma() && x.branch != branch) {
      throw InadmissibleSchedule("control of branch " + std::to_string(branch) +
                                 " requested inside branch " + std::to_string(x.branch));
    }
    const double step = std::min(dt_, remaining);
    const Velocity f = plane.velocity(x.xi, x.x0, a);
    bool entering = false;
    if (x.on_gamma()) {
      if (f.normal < -eps) return remaining;  // blocked: points out of P_branch
      entering = f.normal > eps;
    }
    const double xi_new = x.xi + step * f.normal;
    if (!x.on_gamma() && xi_new < kSnapTolerance) {
      const double tau = xi_new <= 0.0 ? std::min(step, x.xi / -f.normal) : step;
      const auto land = JunctionPoint::on_interface(x.x0 + tau * f.tangential);
      traj_.pieces.push_back({t, t + tau, x, land, branch, control});
      traj_.samples.push_back({t + tau, land, EventFlag::exit});
      traj_.exit_events.push_back({branch, t + tau});
      remaining -= tau;
      continue;
    }
    JunctionPoint next;
    if (x.on_gamma() && !entering) {
      next = JunctionPoint::on_interface(x.x0 + step * f.tangential);
    } else {
      next = canonicalize({branch, std::max(xi_new, 0.0), x.x0 + step * f.tangential});
    }
    if (entering && !next.on_gamma()) {
      traj_.entry_events.push_back({branch, t, x});
      traj_.samples.push_back({t, x, EventFlag::entry});
    }
    traj_.pieces.push_back({t, t + step, x, next, branch, control});
    traj_.samples.push_back({t + step, next, EventFlag::none});
    remaining -= step;
  }
  return 0.0;
}

Trajectory simulate(const ProblemSpec& spec, const JunctionPoint& x0, const ControlSchedule& schedule,
                    double dt_int) {
  if (schedule.segments.empty()) throw std::invalid_argument("empty control schedule");
  JunctionIntegrator integrator(spec, x0, dt_int);
  double carry = 0.0;
  std::size_t truncated = 0;
  for (std::size_t s = 0; s < schedule.segments.size(); ++s) {
    const auto& seg = schedule.segments[s];
    if (!(seg.duration > 0.0)) throw std::invalid_argument("segment durations must be positive");
    const double left = integrator.advance(seg.branch, seg.control, seg.duration + carry);
    carry = 0.0;
    if (left > kTimeTolerance) {
      if (s + 1 == schedule.segments.size()) {
        throw InadmissibleSchedule("final segment points out of its half-plane at the interface");
      }
      carry = left;
      ++truncated;
    }
  }
  Trajectory traj = integrator.release();
  traj.truncated_segments = truncated;
  return traj;
}

bool events_consistent(const Trajectory& traj) {
  struct Ev {
    double t;
    bool entry;
  };
  std::map<std::size_t, std::vector<Ev>> per_branch;
  for (const auto& e : traj.entry_events) {
    if (!e.at.on_gamma()) return false;
    per_branch[e.branch].push_back({e.t, true});
  }
  for (const auto& e : traj.exit_events) per_branch[e.branch].push_back({e.t, false});
  const auto& start = traj.samples.front().point;
  for (auto& [branch, evs] : per_branch) {
    // Leaving and re-entering at the same instant is allowed; the exit comes first.
    std::stable_sort(evs.begin(), evs.end(),
                     [](const Ev& a, const Ev& b) { return a.t < b.t || (a.t == b.t && !a.entry && b.entry); });
    // A trajectory starting inside P_branch leaves it before it can enter.
    bool expect_entry = !(start.branch == branch);
    for (std::size_t k = 0; k < evs.size(); ++k) {
      if (evs[k].entry != expect_entry) return false;
      if (k > 0 && evs[k].t < evs[k - 1].t) return false;
      expect_entry = !expect_entry;
    }
  }
  return true;
}

CostBreakdown cost(const ProblemSpec& spec, const Trajectory& traj) {
  const double lambda = spec.lambda();
  CostBreakdown out;
  for (const auto& p : traj.pieces) {
    const auto& plane = spec.plane(p.branch);
    const auto& a = plane.controls[p.control];
    const double l0 = plane.cost(p.from.xi, p.from.x0, a) * std::exp(-lambda * p.t0);
    const double l1 = plane.cost(p.to.xi, p.to.x0, a) * std::exp(-lambda * p.t1);
    out.running += 0.5 * (l0 + l1) * (p.t1 - p.t0);
  }
  for (const auto& e : traj.entry_events) {
    out.entry += spec.plane(e.branch).entry(e.at.x0) * std::exp(-lambda * e.t);
  }
  out.tail_bound = spec.bound_M() * std::exp(-lambda * traj.end_time()) / lambda;
  return out;
}

Trajectory strip_entry_events(Trajectory traj) {
  traj.entry_events.clear();
  std::erase_if(traj.samples, [](const TrajectorySample& s) { return s.event == EventFlag::entry; });
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto old = os.precision(17);
  os << "t,branch,xi,x0,event\n";
  for (const auto& s : traj.samples) {
    os << s.t << ',' << s.point.branch << ',' << s.point.xi << ',' << s.point.x0 << ','
       << to_string(s.event) << '\n';
  }
  os.precision(old);
}

FeedbackPolicy::FeedbackPolicy(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field)
    : scheme_(spec, grid), field_(field) {}

PolicyDecision FeedbackPolicy::decide(const JunctionPoint& xin) const {
  const auto x = canonicalize(xin);
  const auto& spec = scheme_.spec();
  if (!x.on_gamma()) {
    const auto& plane = spec.plane(x.branch);
    PolicyDecision best{x.branch, 0, false};
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < plane.controls.size(); ++k) {
      const double v = scheme_.branch_candidate(field_, x.branch, k, x.xi, x.x0);
      if (v < best_value) {
        best_value = v;
        best.control = k;
      }
    }
    return best;
  }
  const double eps = spec.tangency_eps();
  std::optional<PolicyDecision> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t b = 1; b <= spec.n_branches(); ++b) {
    const auto& plane = spec.plane(b);
    const double c = plane.entry(x.x0);
    for (std::size_t k = 0; k < plane.controls.size(); ++k) {
      if (!(plane.velocity(0.0, x.x0, plane.controls[k]).normal > eps)) continue;
      const double v = scheme_.branch_candidate(field_, b, k, 0.0, x.x0) + c;
      if (v < best_value) {
        best_value = v;
        best = PolicyDecision{b, k, true};
      }
    }
  }
  for (std::size_t b = 1; b <= spec.n_branches(); ++b) {
    const auto& plane = spec.plane(b);
    for (std::size_t k = 0; k < plane.controls.size(); ++k) {
      if (!(std::abs(plane.velocity(0.0, x.x0, plane.controls[k]).normal) <= eps)) continue;
      const double v = scheme_.gamma_candidate(field_, b, k, x.x0);
      if (v < best_value) {
        best_value = v;
        best = PolicyDecision{b, k, false};
      }
    }
  }
  if (!best) throw std::runtime_error("no admissible control at the interface");
  return *best;
}

FeedbackPolicy extract_policy(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field) {
  return FeedbackPolicy(spec, grid, field);
}

namespace {

DppResult finish_dpp(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field,
                     const JunctionPoint& x0, Trajectory traj) {
  DppResult out;
  out.running_and_entry = cost(spec, traj).total();
  out.terminal = std::exp(-spec.lambda() * traj.end_time()) * interpolate(grid, field, traj.end());
  out.start_value = interpolate(grid, field, x0);
  out.residual = out.running_and_entry + out.terminal - out.start_value;
  out.trajectory = std::move(traj);
  return out;
}

}  // namespace

DppResult dpp_residual(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field,
                       const JunctionPoint& x0, double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("rollout horizon must be positive");
  const FeedbackPolicy policy(spec, grid, field);
  JunctionIntegrator integrator(spec, x0, grid.dt);
  while (integrator.time() < horizon - kTimeTolerance) {
    const auto d = policy.decide(integrator.state());
    const double step = std::min(grid.dt, horizon - integrator.time());
    const double before = integrator.time();
    integrator.advance(d.branch, d.control, step);
    if (integrator.time() <= before) {
      throw std::runtime_error("greedy policy made no progress at the interface");
    }
  }
  return finish_dpp(spec, grid, field, x0, integrator.release());
}

DppResult dpp_residual(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field,
                       const JunctionPoint& x0, const ControlSchedule& schedule, double dt_int) {
  return finish_dpp(spec, grid, field, x0, simulate(spec, x0, schedule, dt_int));
}

BruteForceResult brute_force_value(const ProblemSpec& spec, const JunctionPoint& x0,
                                   const std::vector<ControlRef>& candidates,
                                   const BruteForceOptions& options) {
  if (candidates.empty()) throw std::invalid_argument("no candidate controls");
  if (options.segments == 0) throw std::invalid_argument("need at least one segment");
  if (options.segments > 1 && options.duration_mesh.empty()) {
    throw std::invalid_argument("empty duration mesh");
  }
  const std::size_t nc = candidates.size();
  const std::size_t nd = std::max<std::size_t>(options.duration_mesh.size(), 1);
  // Count in floating point first so the budget check cannot overflow.
  const double total_f = std::pow(static_cast<double>(nc * nd), static_cast<double>(options.segments - 1)) *
                         static_cast<double>(nc);
  if (total_f > static_cast<double>(options.budget)) {
    throw std::length_error("brute-force enumeration exceeds the budget");
  }
  const auto total = static_cast<std::size_t>(total_f);

  struct Best {
    double value = std::numeric_limits<double>::infinity();
    std::size_t index = std::numeric_limits<std::size_t>::max();
    std::size_t evaluated = 0;
    std::size_t inadmissible = 0;
  };
  auto decode = [&](std::size_t idx) -> std::optional<ControlSchedule> {
    ControlSchedule s;
    const auto last = candidates[idx % nc];
    idx /= nc;
    double used = 0.0;
    for (std::size_t seg = 0; seg + 1 < options.segments; ++seg) {
      const auto c = candidates[idx % nc];
      idx /= nc;
      const double d = options.duration_mesh[idx % nd];
      idx /= nd;
      s.segments.push_back({d, c.branch, c.control});
      used += d;
    }
    if (!(options.horizon - used > kTimeTolerance)) return std::nullopt;
    s.segments.push_back({options.horizon - used, last.branch, last.control});
    return s;
  };

  const std::size_t threads = std::max<std::size_t>(options.threads, 1);
  std::vector<Best> partial(threads);
  const std::size_t chunk = (total + threads - 1) / threads;
  parallel_for(threads, threads, [&](std::size_t tb, std::size_t te) {
    for (std::size_t w = tb; w < te; ++w) {
      Best& mine = partial[w];
      const std::size_t end = std::min(total, (w + 1) * chunk);
      for (std::size_t idx = w * chunk; idx < end; ++idx) {
        const auto schedule = decode(idx);
        if (!schedule) continue;
        try {
          const auto traj = simulate(spec, x0, *schedule, options.dt_int);
          const double v = cost(spec, traj).total();
          ++mine.evaluated;
          if (v < mine.value) {
            mine.value = v;
            mine.index = idx;
          }
        } catch (const InadmissibleSchedule&) {
          ++mine.inadmissible;
        }
      }
    }
  });

  Best best;
  for (const auto& p : partial) {
    best.evaluated += p.evaluated;
    best.inadmissible += p.inadmissible;
    if (p.value < best.value || (p.value == best.value && p.index < best.index)) {
      best.value = p.value;
      best.index = p.index;
    }
  }
  BruteForceResult out;
  out.evaluated = best.evaluated;
  out.inadmissible = best.inadmissible;
  out.value = best.value;
  out.tail_bound = spec.bound_M() * std::exp(-spec.lambda() * options.horizon) / spec.lambda();
  if (best.index != std::numeric_limits<std::size_t>::max()) out.best = *decode(best.index);
  return out;
}

ControlRef find_control(const ProblemSpec& spec, std::size_t branch, const std::string& id) {
  const auto& controls = spec.plane(branch).controls;
  for (std::size_t k = 0; k < controls.size(); ++k) {
    if (controls[k].id == id) return {branch, k};
  }
  throw std::out_of_range("no control '" + id + "' on branch " + std::to_string(branch));
}

}  // namespace junction
