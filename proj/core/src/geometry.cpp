#include "junction/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace junction {

namespace {

double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

void require_unit(const Vec3& v, const char* what) {
  if (std::abs(std::sqrt(dot(v, v)) - 1.0) > 1e-12) {
    throw std::invalid_argument(std::string(what) + " is not a unit vector");
  }
}

}  // namespace

JunctionPoint JunctionPoint::make(std::size_t branch, double xi, double x0) {
  if (!std::isfinite(xi) || !std::isfinite(x0)) {
    throw std::invalid_argument("junction point coordinates must be finite");
  }
  if (xi < 0.0) {
    throw std::invalid_argument("junction point has negative normal coordinate");
  }
  if (branch == kInterface && xi != 0.0) {
    throw std::invalid_argument("interface point with nonzero normal coordinate");
  }
  return canonicalize({branch, xi, x0});
}

JunctionPoint canonicalize(JunctionPoint p) {
  if (p.branch == kInterface || p.xi < kSnapTolerance) {
    return {kInterface, 0.0, p.x0};
  }
  return p;
}

double geodesic_distance(const JunctionPoint& a, const JunctionPoint& b) {
  const double d0 = a.x0 - b.x0;
  // Interface points belong to every half-plane; xi = 0 makes both cases agree.
  const bool same_plane = a.branch == b.branch || a.on_gamma() || b.on_gamma();
  const double dn = same_plane ? a.xi - b.xi : a.xi + b.xi;
  return std::hypot(d0, dn);
}

JunctionGeometry::JunctionGeometry(std::size_t n_branches) : e0_{1.0, 0.0, 0.0} {
  if (n_branches < 2) {
    throw std::invalid_argument("a junction needs at least two half-planes");
  }
  dirs_.reserve(n_branches);
  for (std::size_t i = 0; i < n_branches; ++i) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) /
                         static_cast<double>(n_branches);
    dirs_.push_back({0.0, std::cos(theta), std::sin(theta)});
  }
}

JunctionGeometry::JunctionGeometry(Vec3 e0, std::vector<Vec3> branch_dirs)
    : e0_(e0), dirs_(std::move(branch_dirs)) {
  if (dirs_.size() < 2) {
    throw std::invalid_argument("a junction needs at least two half-planes");
  }
  require_unit(e0_, "e_0");
  for (const auto& d : dirs_) {
    require_unit(d, "branch direction");
    if (std::abs(dot(d, e0_)) > 1e-12) {
      throw std::invalid_argument("branch direction not orthogonal to e_0");
    }
  }
}

const Vec3& JunctionGeometry::direction(std::size_t branch) const {
  if (branch == 0 || branch > dirs_.size()) {
    throw std::out_of_range("branch index out of range");
  }
  return dirs_[branch - 1];
}

Vec3 JunctionGeometry::embed(const JunctionPoint& p) const {
  if (p.branch > dirs_.size()) {
    throw std::out_of_range("branch index out of range");
  }
  Vec3 out{p.x0 * e0_[0], p.x0 * e0_[1], p.x0 * e0_[2]};
  if (!p.on_gamma()) {
    const auto& d = dirs_[p.branch - 1];
    for (int k = 0; k < 3; ++k) out[k] += p.xi * d[k];
  }
  return out;
}

}  // namespace junction
