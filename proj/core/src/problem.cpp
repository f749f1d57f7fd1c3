#include "junction/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "hull.hpp"

namespace junction {

bool AffineDynamics::state_independent() const {
  return std::all_of(state_gain.begin(), state_gain.end(), [](double g) { return g == 0.0; });
}

Velocity AffineDynamics::operator()(double xi, double x0, const ControlSample& a) const {
  const auto& u = a.value;
  return {gain[0] * u[0] + gain[1] * u[1] + offset.normal + state_gain[0] * xi + state_gain[1] * x0,
          gain[2] * u[0] + gain[3] * u[1] + offset.tangential + state_gain[2] * xi +
              state_gain[3] * x0};
}

bool RunningCost::state_independent() const {
  return state_weight[0] == 0.0 && state_weight[1] == 0.0 &&
         (step_jump == 0.0 || !std::isfinite(step_at));
}

double RunningCost::operator()(double xi, double x0, const ControlSample& a) const {
  double v = base + control_weight[0] * a.value[0] + control_weight[1] * a.value[1] +
             state_weight[0] * xi + state_weight[1] * x0;
  if (x0 >= step_at) v += step_jump;
  return v;
}

double evaluate_entry_cost(const EntryCostModel& model, double x0) {
  struct Visitor {
    double x0;
    double operator()(const ConstantEntryCost& c) const { return c.value; }
    double operator()(const VeeEntryCost& c) const {
      return std::max(c.floor, c.peak - c.slope * std::abs(x0 - c.center));
    }
    double operator()(const TabulatedEntryCost& c) const {
      if (x0 <= c.x0.front()) return c.value.front();
      if (x0 >= c.x0.back()) return c.value.back();
      const auto it = std::upper_bound(c.x0.begin(), c.x0.end(), x0);
      const auto k = static_cast<std::size_t>(it - c.x0.begin());
      const double t = (x0 - c.x0[k - 1]) / (c.x0[k] - c.x0[k - 1]);
      return c.value[k - 1] + t * (c.value[k] - c.value[k - 1]);
    }
  };
  return std::visit(Visitor{x0}, model);
}

ProblemSpec::ProblemSpec(JunctionGeometry geometry, std::vector<HalfPlaneSpec> planes,
                         double lambda, double tangency_eps, ControllabilityMode mode,
                         double controllability_delta)
    : geometry_(std::move(geometry)),
      planes_(std::move(planes)),
      lambda_(lambda),
      tangency_eps_(tangency_eps),
      mode_(mode),
      delta_(controllability_delta) {
  if (!(lambda_ > 0.0)) throw std::invalid_argument("discount rate must be positive");
  if (!(tangency_eps_ > 0.0)) throw std::invalid_argument("tangency_eps must be positive");
  if (!(delta_ > 0.0)) throw std::invalid_argument("controllability delta must be positive");
  if (planes_.size() != geometry_.n_branches()) {
    throw std::invalid_argument("number of half-planes does not match the geometry");
  }
  // Ids are unique over the whole junction, so control sets of different
  // branches never share an element.
  std::set<std::string> ids;
  for (std::size_t i = 0; i < planes_.size(); ++i) {
    const auto& plane = planes_[i];
    if (plane.controls.empty()) {
      throw std::invalid_argument("half-plane " + std::to_string(i + 1) + " has no controls");
    }
    for (const auto& c : plane.controls) {
      if (c.branch != i + 1) {
        throw std::invalid_argument("control '" + c.id + "' is tagged with branch " +
                                    std::to_string(c.branch) + " but listed under branch " +
                                    std::to_string(i + 1));
      }
      if (!ids.insert(c.id).second) {
        throw std::invalid_argument("duplicate control id '" + c.id + "'");
      }
    }
    if (const auto* tab = std::get_if<TabulatedEntryCost>(&plane.entry_cost)) {
      if (tab->x0.empty() || tab->x0.size() != tab->value.size() ||
          !std::is_sorted(tab->x0.begin(), tab->x0.end()) ||
          std::adjacent_find(tab->x0.begin(), tab->x0.end()) != tab->x0.end()) {
        throw std::invalid_argument("tabulated entry cost needs strictly increasing knots");
      }
    }
    if (!(plane.bound_M > 0.0) || !(plane.lipschitz_L >= 0.0)) {
      throw std::invalid_argument("declared bounds M and L must be positive");
    }
  }
}

const HalfPlaneSpec& ProblemSpec::plane(std::size_t branch) const {
  if (branch == 0 || branch > planes_.size()) {
    throw std::out_of_range("branch index out of range");
  }
  return planes_[branch - 1];
}

double ProblemSpec::bound_M() const {
  double m = 0.0;
  for (const auto& p : planes_) m = std::max(m, p.bound_M);
  return m;
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::dynamics_bound: return "dynamics_bound";
    case ViolationKind::running_cost_bound: return "running_cost_bound";
    case ViolationKind::dynamics_lipschitz: return "dynamics_lipschitz";
    case ViolationKind::running_cost_lipschitz: return "running_cost_lipschitz";
    case ViolationKind::entry_cost_nonpositive: return "entry_cost_nonpositive";
    case ViolationKind::entry_cost_lipschitz: return "entry_cost_lipschitz";
  }
  return "unknown";
}

AuditReport audit_regularity(const ProblemSpec& spec, const std::vector<JunctionPoint>& samples) {
  constexpr double slack = 1e-9;
  AuditReport report;
  std::vector<JunctionPoint> canon;
  canon.reserve(samples.size());
  for (const auto& s : samples) canon.push_back(canonicalize(s));

  for (std::size_t b = 1; b <= spec.n_branches(); ++b) {
    const auto& plane = spec.plane(b);
    std::vector<JunctionPoint> pts;
    for (const auto& p : canon) {
      if (p.on_gamma() || p.branch == b) pts.push_back(p);
    }
    for (const auto& a : plane.controls) {
      for (std::size_t m = 0; m < pts.size(); ++m) {
        const auto& x = pts[m];
        const Velocity fx = plane.velocity(x.xi, x.x0, a);
        const double lx = plane.cost(x.xi, x.x0, a);
        const double fnorm = std::hypot(fx.normal, fx.tangential);
        report.max_dynamics_norm = std::max(report.max_dynamics_norm, fnorm);
        report.max_running_cost = std::max(report.max_running_cost, std::abs(lx));
        if (fnorm > plane.bound_M + slack) {
          report.violations.push_back({ViolationKind::dynamics_bound, b, a.id, x, fnorm, plane.bound_M});
        }
        if (std::abs(lx) > plane.bound_M + slack) {
          report.violations.push_back(
              {ViolationKind::running_cost_bound, b, a.id, x, std::abs(lx), plane.bound_M});
        }
        for (std::size_t n = m + 1; n < pts.size(); ++n) {
          const auto& y = pts[n];
          const double d = geodesic_distance(x, y);
          if (d <= 0.0) continue;
          const Velocity fy = plane.velocity(y.xi, y.x0, a);
          const double qf = std::hypot(fx.normal - fy.normal, fx.tangential - fy.tangential) / d;
          const double ql = std::abs(lx - plane.cost(y.xi, y.x0, a)) / d;
          report.max_lipschitz_dynamics = std::max(report.max_lipschitz_dynamics, qf);
          report.max_lipschitz_running_cost = std::max(report.max_lipschitz_running_cost, ql);
          if (qf > plane.lipschitz_L + slack) {
            report.violations.push_back({ViolationKind::dynamics_lipschitz, b, a.id, x, qf, plane.lipschitz_L});
          }
          if (ql > plane.lipschitz_L + slack) {
            report.violations.push_back(
                {ViolationKind::running_cost_lipschitz, b, a.id, x, ql, plane.lipschitz_L});
          }
        }
      }
    }

    std::vector<double> gamma;
    for (const auto& p : canon) {
      if (p.on_gamma()) gamma.push_back(p.x0);
    }
    for (std::size_t m = 0; m < gamma.size(); ++m) {
      const double c = plane.entry(gamma[m]);
      report.min_entry_cost = std::min(report.min_entry_cost, c);
      const auto at = JunctionPoint::on_interface(gamma[m]);
      if (!(c > 0.0)) {
        report.violations.push_back({ViolationKind::entry_cost_nonpositive, b, {}, at, c, 0.0});
      }
      for (std::size_t n = m + 1; n < gamma.size(); ++n) {
        const double d = std::abs(gamma[m] - gamma[n]);
        if (d <= 0.0) continue;
        const double q = std::abs(c - plane.entry(gamma[n])) / d;
        if (q > plane.lipschitz_L + slack) {
          report.violations.push_back({ViolationKind::entry_cost_lipschitz, b, {}, at, q, plane.lipschitz_L});
        }
      }
    }
  }
  return report;
}

namespace {

std::vector<detail::P2> velocity_hull(const HalfPlaneSpec& plane, double x0) {
  std::vector<detail::P2> pts;
  pts.reserve(plane.controls.size());
  for (const auto& a : plane.controls) {
    const Velocity f = plane.velocity(0.0, x0, a);
    pts.push_back({f.normal, f.tangential});
  }
  return detail::convex_hull(std::move(pts));
}

constexpr double kHullTolerance = 1e-9;

}  // namespace

bool audit_strong_controllability(const ProblemSpec& spec, double x0, double delta,
                                  std::size_t directions) {
  if (!(delta > 0.0)) throw std::invalid_argument("controllability delta must be positive");
  if (directions == 0) throw std::invalid_argument("direction count must be positive");
  std::vector<detail::P2> probes{{delta, 0.0}, {0.0, delta}, {-delta, 0.0}, {0.0, -delta}};
  for (std::size_t k = 0; k < directions; ++k) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(directions);
    probes.push_back({delta * std::cos(th), delta * std::sin(th)});
  }
  for (const auto& plane : spec.planes()) {
    const auto hull = velocity_hull(plane, x0);
    for (const auto& q : probes) {
      if (detail::hull_margin(hull, q) < -kHullTolerance) return false;
    }
  }
  return true;
}

bool audit_moderate_controllability(const ProblemSpec& spec, double x0, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("controllability delta must be positive");
  bool tangential_cover = false;
  for (const auto& plane : spec.planes()) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& a : plane.controls) {
      const double fn = plane.velocity(0.0, x0, a).normal;
      lo = std::min(lo, fn);
      hi = std::max(hi, fn);
    }
    if (lo > -delta + kHullTolerance || hi < delta - kHullTolerance) return false;
    const auto [tlo, thi] = detail::slab_range(velocity_hull(plane, x0), spec.tangency_eps());
    if (tlo <= -delta + kHullTolerance && thi >= delta - kHullTolerance) tangential_cover = true;
  }
  return tangential_cover;
}

}  // namespace junction
