#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace junction {

using Vec3 = std::array<double, 3>;

/// Marker branch index for points on the shared interface line.
inline constexpr std::size_t kInterface = 0;

/// Points with a normal coordinate below this snap onto the interface.
inline constexpr double kSnapTolerance = 1e-12;

/// A location on the junction in intrinsic coordinates.
///
/// `branch` is 1..N for a point strictly inside half-plane P_branch and
/// kInterface for a point on the interface. `xi` is the distance from the
/// interface measured along e_branch and `x0` the coordinate along e_0.
/// Construct through `make` or `on_interface` to get the canonical form.
struct JunctionPoint {
  std::size_t branch = kInterface;
  double xi = 0.0;
  double x0 = 0.0;

  /// Canonical point on branch `branch`; throws std::invalid_argument when
  /// xi is negative or not finite.
  static JunctionPoint make(std::size_t branch, double xi, double x0);
  static JunctionPoint on_interface(double x0) { return {kInterface, 0.0, x0}; }

  bool on_gamma() const { return branch == kInterface; }

  friend bool operator==(const JunctionPoint&, const JunctionPoint&) = default;
};

/// Snaps points with xi < kSnapTolerance onto the interface. Idempotent.
JunctionPoint canonicalize(JunctionPoint p);

/// Geodesic distance on the junction. Points on different branches are
/// connected through the interface, which for half-planes reduces to
/// unfolding one of them into the plane of the other.
double geodesic_distance(const JunctionPoint& a, const JunctionPoint& b);

/// N half-planes R e_0 x R+ e_i glued along R e_0, embedded in R^3.
class JunctionGeometry {
 public:
  /// Evenly fanned embedding around e_0 = (1,0,0).
  explicit JunctionGeometry(std::size_t n_branches);
  /// Explicit embedding; `branch_dirs[i-1]` is e_i.
  JunctionGeometry(Vec3 e0, std::vector<Vec3> branch_dirs);

  std::size_t n_branches() const { return dirs_.size(); }
  const Vec3& e0() const { return e0_; }
  /// e_i for i in 1..N.
  const Vec3& direction(std::size_t branch) const;

  /// x0 * e_0 + xi * e_branch. Throws std::out_of_range for a branch > N.
  Vec3 embed(const JunctionPoint& p) const;

 private:
  Vec3 e0_;
  std::vector<Vec3> dirs_;
};

}  // namespace junction
