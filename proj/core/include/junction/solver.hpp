#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "junction/problem.hpp"

namespace junction {

/// Truncated computational box: every branch is sampled on
/// [0, xi_max] x [x0_min, x0_max] with spacing h; dt is the time step of the
/// semi-Lagrangian update.
struct GridSpec {
  double xi_max = 6.0;
  double x0_min = -4.0;
  double x0_max = 4.0;
  double h = 0.05;
  double dt = 0.02;

  /// Throws std::invalid_argument unless h, dt > 0 and the box is an
  /// integral number of cells (within 1e-9) in both directions.
  void validate() const;
  /// Advisory messages, e.g. when dt * M > 2h.
  std::vector<std::string> warnings(const ProblemSpec& spec) const;

  std::size_t nx() const;  ///< cells along xi
  std::size_t ny() const;  ///< cells along x0
  double xi(std::size_t k) const { return static_cast<double>(k) * h; }
  double x0(std::size_t j) const { return x0_min + static_cast<double>(j) * h; }
};

/// Unknowns of the discrete system: one (nx+1) x (ny+1) array per branch
/// (row k is xi = k*h, column j is x0 = x0_min + j*h) and the interface
/// values u_gamma on the ny+1 interface nodes. Row 0 of v_i and u_gamma are
/// separate unknowns.
class ValueField {
 public:
  ValueField() = default;
  ValueField(std::size_t n_branches, std::size_t nx, std::size_t ny, double fill = 0.0);
  ValueField(const ProblemSpec& spec, const GridSpec& grid, double fill = 0.0);

  std::size_t n_branches() const { return n_branches_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }

  /// Branch b in 1..N, row k in 0..nx, column j in 0..ny.
  double& v(std::size_t b, std::size_t k, std::size_t j) { return data_[index(b, k, j)]; }
  double v(std::size_t b, std::size_t k, std::size_t j) const { return data_[index(b, k, j)]; }
  std::span<double> row(std::size_t b, std::size_t k) { return {&data_[index(b, k, 0)], ny_ + 1}; }
  std::span<const double> row(std::size_t b, std::size_t k) const {
    return {&data_[index(b, k, 0)], ny_ + 1};
  }
  std::span<double> gamma() { return {data_.data() + gamma_offset(), ny_ + 1}; }
  std::span<const double> gamma() const { return {data_.data() + gamma_offset(), ny_ + 1}; }

  /// Every unknown, branches first then u_gamma.
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const ValueField& other) const {
    return n_branches_ == other.n_branches_ && nx_ == other.nx_ && ny_ == other.ny_;
  }

 private:
  std::size_t index(std::size_t b, std::size_t k, std::size_t j) const {
    return ((b - 1) * (nx_ + 1) + k) * (ny_ + 1) + j;
  }
  std::size_t gamma_offset() const { return n_branches_ * (nx_ + 1) * (ny_ + 1); }

  std::size_t n_branches_ = 0;
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::vector<double> data_;
};

/// max |a - b| over all unknowns; throws on shape mismatch.
double sup_distance(const ValueField& a, const ValueField& b);
double sup_norm(const ValueField& a);

/// M / lambda + max entry cost over the interface nodes: the a priori bound
/// on |V| and the starting value of solve().
double a_priori_bound(const ProblemSpec& spec, const GridSpec& grid);
ValueField initial_field(const ProblemSpec& spec, const GridSpec& grid);

struct SolverOptions {
  std::size_t threads = 1;
};

/// Evaluates a field anywhere on the junction by bilinear interpolation with
/// clamping to the box. Interface points read u_gamma.
double interpolate(const GridSpec& grid, const ValueField& field, const JunctionPoint& x);
/// Interpolates v_b at (xi, x0) with xi < 0 clamped onto row 0 of v_b.
double interpolate_branch(const GridSpec& grid, const ValueField& field, std::size_t branch,
                          double xi, double x0);
double interpolate_gamma(const GridSpec& grid, const ValueField& field, double x0);

/// One-step dynamic programming operator of the junction system.
///
///   interior of P_i:  v_i(x) <- min_a { w l_i(x,a) + q I[v_i](x + dt f_i(x,a)) }
///   row 0 of P_i:     S_i(x) =  the same minimum over A_i^+(x)
///   interface:        u(x0)  <- min( min_i S_i + c_i , min over A^Gamma of
///                                    w l + q I[u](x0 + dt f0) )
///                     v_i(0, x0) <- min(u(x0), S_i(x0))
///
/// with q = exp(-lambda dt) and w = (1 - q) / lambda, the exact discounted
/// weight of a running cost held constant over one step. Every candidate is
/// a discounted read of the input field plus a field-independent constant,
/// so the map is monotone and a q-contraction in the sup norm.
class SemiLagrangianScheme {
 public:
  SemiLagrangianScheme(const ProblemSpec& spec, const GridSpec& grid, SolverOptions options = {});

  const ProblemSpec& spec() const { return spec_; }
  const GridSpec& grid() const { return grid_; }
  double discount() const { return q_; }
  double cost_weight() const { return w_; }

  /// out <- update(in); `out` is reshaped as needed. Throws
  /// std::runtime_error when an interface node has no finite candidate.
  void update(const ValueField& in, ValueField& out) const;
  ValueField update(const ValueField& in) const;

  /// Candidate value of using control `k` of `branch` for one step from
  /// (xi, x0), reading v_branch (xi > 0 or the interface row) .
  double branch_candidate(const ValueField& field, std::size_t branch, std::size_t k, double xi,
                          double x0) const;
  /// Candidate value of a tangential control moving along the interface.
  double gamma_candidate(const ValueField& field, std::size_t branch, std::size_t k, double x0) const;

 private:
  struct ControlStep {
    double cost;       // w * l
    double shift_xi;   // dt * f_normal / h
    double shift_x0;   // dt * f_tangential / h
  };
  struct PlaneCache {
    bool uniform = false;            // f and l independent of the state
    std::vector<ControlStep> steps;  // filled when uniform
  };

  void update_rows(const ValueField& in, ValueField& out, std::size_t branch, std::size_t k_begin,
                   std::size_t k_end) const;
  void update_interface(const ValueField& in, ValueField& out, std::size_t j_begin,
                        std::size_t j_end) const;

  ProblemSpec spec_;
  GridSpec grid_;
  SolverOptions options_;
  double q_;
  double w_;
  std::vector<PlaneCache> planes_;
  // entry_[b-1][j] = c_b(x0_j)
  std::vector<std::vector<double>> entry_;
  // plus_[b-1][j] and tangential_[b-1][j]: admissible control indices at
  // interface node j.
  std::vector<std::vector<std::vector<std::size_t>>> plus_;
  std::vector<std::vector<std::vector<std::size_t>>> tangential_;
};

ValueField sl_update(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field,
                     SolverOptions options = {});

struct SolveReport {
  std::size_t iterations = 0;
  bool converged = false;
  /// Sup-norm change of the last sweep.
  double final_change = std::numeric_limits<double>::infinity();
  /// final_change / dt, the sup norm of the discrete residual.
  double final_residual = std::numeric_limits<double>::infinity();
  /// Sup-norm change of every sweep.
  std::vector<double> history;
  /// Geometric mean of successive change ratios over the last sweeps.
  double contraction_ratio = 0.0;
  double theoretical_ratio = 0.0;
  /// Change history never increased (beyond rounding).
  bool history_monotone = true;
  /// Every sweep lowered (or kept) every unknown.
  bool iterates_decreasing = true;
  /// Every iterate stayed within the a priori bound.
  bool bound_respected = true;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
};

struct SolveResult {
  ValueField field;
  SolveReport report;
};

/// Fixed-point iteration of the update until the sup-norm change drops below
/// tol or max_iter sweeps. Non-convergence is reported, not thrown.
SolveResult solve(const ProblemSpec& spec, const GridSpec& grid, ValueField init, double tol,
                  std::size_t max_iter, SolverOptions options = {});
SolveResult solve(const ProblemSpec& spec, const GridSpec& grid, double tol, std::size_t max_iter,
                  SolverOptions options = {});

/// (field - update(field)) / dt at every unknown.
ValueField residual(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field,
                    SolverOptions options = {});

}  // namespace junction
