#include "junction/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "junction/hamiltonians.hpp"
#include "junction/parallel.hpp"

namespace junction {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t cells(double length, double h, const char* what) {
  const double n = length / h;
  const double r = std::round(n);
  if (!(r >= 1.0) || std::abs(n - r) > 1e-9) {
    throw std::invalid_argument(std::string(what) + " is not a positive integral number of cells");
  }
  return static_cast<std::size_t>(r);
}

// Bilinear read of a (nx+1) x (ny+1) row-major array at fractional grid
// coordinates (s, r), clamped to the array.
double bilinear(const double* base, std::size_t nx, std::size_t ny, double s, double r) {
  s = std::clamp(s, 0.0, static_cast<double>(nx));
  r = std::clamp(r, 0.0, static_cast<double>(ny));
  const std::size_t k = std::min(static_cast<std::size_t>(s), nx - 1);
  const std::size_t j = std::min(static_cast<std::size_t>(r), ny - 1);
  const double tx = s - static_cast<double>(k);
  const double ty = r - static_cast<double>(j);
  const double* r0 = base + k * (ny + 1);
  const double* r1 = r0 + (ny + 1);
  return (1.0 - tx) * ((1.0 - ty) * r0[j] + ty * r0[j + 1]) +
         tx * ((1.0 - ty) * r1[j] + ty * r1[j + 1]);
}

double linear(const double* u, std::size_t ny, double r) {
  r = std::clamp(r, 0.0, static_cast<double>(ny));
  const std::size_t j = std::min(static_cast<std::size_t>(r), ny - 1);
  const double t = r - static_cast<double>(j);
  return (1.0 - t) * u[j] + t * u[j + 1];
}

}  // namespace

void GridSpec::validate() const {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing h must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("time step dt must be positive");
  if (!(x0_max > x0_min)) throw std::invalid_argument("empty interface window");
  cells(xi_max, h, "xi_max / h");
  cells(x0_max - x0_min, h, "(x0_max - x0_min) / h");
}

std::vector<std::string> GridSpec::warnings(const ProblemSpec& spec) const {
  std::vector<std::string> out;
  if (dt * spec.bound_M() > 2.0 * h) {
    std::ostringstream msg;
    msg << "dt * M = " << dt * spec.bound_M() << " exceeds 2h = " << 2.0 * h
        << "; interpolation feet may leave the neighbouring cells";
    out.push_back(msg.str());
  }
  return out;
}

std::size_t GridSpec::nx() const { return cells(xi_max, h, "xi_max / h"); }
std::size_t GridSpec::ny() const { return cells(x0_max - x0_min, h, "(x0_max - x0_min) / h"); }

ValueField::ValueField(std::size_t n_branches, std::size_t nx, std::size_t ny, double fill)
    : n_branches_(n_branches),
      nx_(nx),
      ny_(ny),
      data_((n_branches * (nx + 1) + 1) * (ny + 1), fill) {}

ValueField::ValueField(const ProblemSpec& spec, const GridSpec& grid, double fill)
    : ValueField(spec.n_branches(), grid.nx(), grid.ny(), fill) {}

double sup_distance(const ValueField& a, const ValueField& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("value fields have different shapes");
  const auto x = a.values();
  const auto y = b.values();
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

double sup_norm(const ValueField& a) {
  double d = 0.0;
  for (double v : a.values()) d = std::max(d, std::abs(v));
  return d;
}

double a_priori_bound(const ProblemSpec& spec, const GridSpec& grid) {
  double cmax = 0.0;
  for (std::size_t j = 0; j <= grid.ny(); ++j) {
    for (const auto& plane : spec.planes()) cmax = std::max(cmax, plane.entry(grid.x0(j)));
  }
  return spec.bound_M() / spec.lambda() + cmax;
}

ValueField initial_field(const ProblemSpec& spec, const GridSpec& grid) {
  return ValueField(spec, grid, a_priori_bound(spec, grid));
}

double interpolate_branch(const GridSpec& grid, const ValueField& field, std::size_t branch,
                          double xi, double x0) {
  return bilinear(field.row(branch, 0).data(), field.nx(), field.ny(), xi / grid.h,
                  (x0 - grid.x0_min) / grid.h);
}

double interpolate_gamma(const GridSpec& grid, const ValueField& field, double x0) {
  return linear(field.gamma().data(), field.ny(), (x0 - grid.x0_min) / grid.h);
}

double interpolate(const GridSpec& grid, const ValueField& field, const JunctionPoint& x) {
  const auto p = canonicalize(x);
  if (p.on_gamma()) return interpolate_gamma(grid, field, p.x0);
  if (p.branch > field.n_branches()) throw std::out_of_range("branch index out of range");
  return interpolate_branch(grid, field, p.branch, p.xi, p.x0);
}

SemiLagrangianScheme::SemiLagrangianScheme(const ProblemSpec& spec, const GridSpec& grid,
                                           SolverOptions options)
    : spec_(spec), grid_(grid), options_(options) {
  grid_.validate();
  q_ = std::exp(-spec_.lambda() * grid_.dt);
  w_ = -std::expm1(-spec_.lambda() * grid_.dt) / spec_.lambda();
  const std::size_t ny = grid_.ny();
  const std::size_t n = spec_.n_branches();
  planes_.resize(n);
  entry_.assign(n, std::vector<double>(ny + 1));
  plus_.assign(n, std::vector<std::vector<std::size_t>>(ny + 1));
  tangential_.assign(n, std::vector<std::vector<std::size_t>>(ny + 1));
  for (std::size_t b = 1; b <= n; ++b) {
    const auto& plane = spec_.plane(b);
    auto& cache = planes_[b - 1];
    cache.uniform = plane.dynamics.state_independent() && plane.running_cost.state_independent();
    if (cache.uniform) {
      for (const auto& a : plane.controls) {
        const Velocity f = plane.velocity(0.0, 0.0, a);
        cache.steps.push_back({w_ * plane.cost(0.0, 0.0, a), grid_.dt * f.normal / grid_.h,
                               grid_.dt * f.tangential / grid_.h});
      }
    }
    for (std::size_t j = 0; j <= ny; ++j) {
      const double x0 = grid_.x0(j);
      entry_[b - 1][j] = plane.entry(x0);
      plus_[b - 1][j] = control_set_plus(spec_, b, x0);
      tangential_[b - 1][j] = control_set_gamma(spec_, b, x0);
    }
  }
}

double SemiLagrangianScheme::branch_candidate(const ValueField& field, std::size_t branch,
                                              std::size_t k, double xi, double x0) const {
  const auto& plane = spec_.plane(branch);
  const auto& a = plane.controls.at(k);
  const Velocity f = plane.velocity(xi, x0, a);
  return w_ * plane.cost(xi, x0, a) +
         q_ * interpolate_branch(grid_, field, branch, xi + grid_.dt * f.normal,
                                 x0 + grid_.dt * f.tangential);
}

double SemiLagrangianScheme::gamma_candidate(const ValueField& field, std::size_t branch,
                                             std::size_t k, double x0) const {
  const auto& plane = spec_.plane(branch);
  const auto& a = plane.controls.at(k);
  const Velocity f = plane.velocity(0.0, x0, a);
  return w_ * plane.cost(0.0, x0, a) +
         q_ * interpolate_gamma(grid_, field, x0 + grid_.dt * f.tangential);
}

void SemiLagrangianScheme::update_rows(const ValueField& in, ValueField& out, std::size_t b,
                                       std::size_t k_begin, std::size_t k_end) const {
  const std::size_t nx = in.nx();
  const std::size_t ny = in.ny();
  const double* base = in.row(b, 0).data();
  const auto& cache = planes_[b - 1];
  const auto& plane = spec_.plane(b);
  for (std::size_t k = k_begin; k < k_end; ++k) {
    auto dst = out.row(b, k);
    std::fill(dst.begin(), dst.end(), kInf);
    if (!cache.uniform) {
      const double xi = grid_.xi(k);
      for (std::size_t j = 0; j <= ny; ++j) {
        const double x0 = grid_.x0(j);
        for (std::size_t c = 0; c < plane.controls.size(); ++c) {
          dst[j] = std::min(dst[j], branch_candidate(in, b, c, xi, x0));
        }
      }
      continue;
    }
    for (const auto& st : cache.steps) {
      // Feet of this control share one fractional offset along the row, so
      // away from the x0 ends the interpolation weights are constant.
      const double s = std::clamp(static_cast<double>(k) + st.shift_xi, 0.0, static_cast<double>(nx));
      const std::size_t kk = std::min(static_cast<std::size_t>(s), nx - 1);
      const double tx = s - static_cast<double>(kk);
      const double fl = std::floor(st.shift_x0);
      const double ty = st.shift_x0 - fl;
      const long off = static_cast<long>(fl);
      const long jlo = std::max<long>(0, -off);
      const long jhi = std::min<long>(static_cast<long>(ny), static_cast<long>(ny) - off - 1);
      const double* r0 = base + kk * (ny + 1);
      const double* r1 = r0 + (ny + 1);
      const double w00 = (1.0 - tx) * (1.0 - ty), w01 = (1.0 - tx) * ty;
      const double w10 = tx * (1.0 - ty), w11 = tx * ty;
      auto edge = [&](long j) {
        const double v = st.cost + q_ * bilinear(base, nx, ny, s, static_cast<double>(j) + st.shift_x0);
        dst[j] = std::min(dst[j], v);
      };
      for (long j = 0; j < std::min<long>(jlo, static_cast<long>(ny) + 1); ++j) edge(j);
      for (long j = jlo; j <= jhi; ++j) {
        const long m = j + off;
        const double v = st.cost + q_ * (w00 * r0[m] + w01 * r0[m + 1] + w10 * r1[m] + w11 * r1[m + 1]);
        dst[j] = std::min(dst[j], v);
      }
      for (long j = std::max(jlo, jhi + 1); j <= static_cast<long>(ny); ++j) edge(j);
    }
  }
}

void SemiLagrangianScheme::update_interface(const ValueField& in, ValueField& out,
                                            std::size_t j_begin, std::size_t j_end) const {
  const std::size_t n = spec_.n_branches();
  const std::size_t nx = in.nx();
  const std::size_t ny = in.ny();
  std::vector<double> stay(n);
  for (std::size_t j = j_begin; j < j_end; ++j) {
    const double x0 = grid_.x0(j);
    double u = kInf;
    for (std::size_t b = 1; b <= n; ++b) {
      const auto& cache = planes_[b - 1];
      double best = kInf;
      for (std::size_t c : plus_[b - 1][j]) {
        double v;
        if (cache.uniform) {
          const auto& st = cache.steps[c];
          v = st.cost + q_ * bilinear(in.row(b, 0).data(), nx, ny, st.shift_xi,
                                      static_cast<double>(j) + st.shift_x0);
        } else {
          v = branch_candidate(in, b, c, 0.0, x0);
        }
        best = std::min(best, v);
      }
      stay[b - 1] = best;
      u = std::min(u, best + entry_[b - 1][j]);
      for (std::size_t c : tangential_[b - 1][j]) {
        double v;
        if (cache.uniform) {
          const auto& st = cache.steps[c];
          v = st.cost + q_ * linear(in.gamma().data(), ny, static_cast<double>(j) + st.shift_x0);
        } else {
          v = gamma_candidate(in, b, c, x0);
        }
        u = std::min(u, v);
      }
    }
    if (!std::isfinite(u)) {
      throw std::runtime_error("interface node at x0 = " + std::to_string(x0) +
                               " has no admissible control");
    }
    out.gamma()[j] = u;
    for (std::size_t b = 1; b <= n; ++b) out.v(b, 0, j) = std::min(u, stay[b - 1]);
  }
}

void SemiLagrangianScheme::update(const ValueField& in, ValueField& out) const {
  const std::size_t nx = grid_.nx();
  const std::size_t ny = grid_.ny();
  if (in.n_branches() != spec_.n_branches() || in.nx() != nx || in.ny() != ny) {
    throw std::invalid_argument("value field does not match the grid");
  }
  if (!out.same_shape(in)) out = ValueField(in.n_branches(), nx, ny);
  const std::size_t n = spec_.n_branches();
  parallel_for(n * nx, options_.threads, [&](std::size_t begin, std::size_t end) {
    // Flattened (branch, row) index over rows 1..nx of every branch.
    for (std::size_t r = begin; r < end;) {
      const std::size_t b = r / nx + 1;
      const std::size_t stop = std::min(end, b * nx);
      update_rows(in, out, b, r - (b - 1) * nx + 1, stop - (b - 1) * nx + 1);
      r = stop;
    }
  });
  parallel_for(ny + 1, options_.threads,
               [&](std::size_t begin, std::size_t end) { update_interface(in, out, begin, end); });
}

ValueField SemiLagrangianScheme::update(const ValueField& in) const {
  ValueField out;
  update(in, out);
  return out;
}

ValueField sl_update(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field,
                     SolverOptions options) {
  return SemiLagrangianScheme(spec, grid, options).update(field);
}

SolveResult solve(const ProblemSpec& spec, const GridSpec& grid, ValueField init, double tol,
                  std::size_t max_iter, SolverOptions options) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const auto start = std::chrono::steady_clock::now();
  SemiLagrangianScheme scheme(spec, grid, options);
  SolveReport report;
  report.warnings = grid.warnings(spec);
  report.theoretical_ratio = scheme.discount();
  const double bound = a_priori_bound(spec, grid);

  ValueField cur = std::move(init);
  for (double v : cur.values()) {
    if (!std::isfinite(v)) throw std::invalid_argument("initial field has non-finite entries");
  }
  ValueField next;
  while (report.iterations < max_iter) {
    scheme.update(cur, next);
    ++report.iterations;
    const auto a = cur.values();
    const auto b = next.values();
    double change = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      change = std::max(change, std::abs(b[i] - a[i]));
      if (b[i] > a[i] + 1e-12 * (1.0 + std::abs(a[i]))) report.iterates_decreasing = false;
      if (std::abs(b[i]) > bound + 1e-9) report.bound_respected = false;
    }
    if (!report.history.empty() &&
        change > report.history.back() * (1.0 + 1e-9) + 1e-14) {
      report.history_monotone = false;
    }
    report.history.push_back(change);
    std::swap(cur, next);
    if (change < tol) {
      report.converged = true;
      break;
    }
  }
  if (!report.history.empty()) {
    report.final_change = report.history.back();
    report.final_residual = report.final_change / grid.dt;
  }
  const std::size_t m = report.history.size();
  const std::size_t window = std::min<std::size_t>(10, m > 0 ? m - 1 : 0);
  if (window > 0 && report.history[m - 1 - window] > 0.0) {
    report.contraction_ratio =
        std::pow(report.history[m - 1] / report.history[m - 1 - window], 1.0 / static_cast<double>(window));
  }
  if (!report.converged) {
    report.warnings.push_back("no convergence within " + std::to_string(max_iter) + " sweeps");
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(cur), std::move(report)};
}

SolveResult solve(const ProblemSpec& spec, const GridSpec& grid, double tol, std::size_t max_iter,
                  SolverOptions options) {
  return solve(spec, grid, initial_field(spec, grid), tol, max_iter, options);
}

ValueField residual(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field,
                    SolverOptions options) {
  ValueField out = sl_update(spec, grid, field, options);
  const auto a = field.values();
  auto r = out.values();
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = (a[i] - r[i]) / grid.dt;
  return out;
}

}  // namespace junction
