#pragma once

#include <optional>
#include <span>
#include <vector>

#include "geopol/engine.hpp"
#include "geopol/subspace.hpp"

namespace geopol {

class RegionError : public Error {
 public:
  using Error::Error;
};

/// Closed ball {z : |z - center|^2 <= radius_sq}.
///
/// The slack radius_sq - |z - center|^2 is evaluated through an anchor point
/// whose slack is known exactly. Lower-bound balls with small alpha have huge
/// radii, and expanding around the anchor avoids cancelling two large squares.
struct Ball {
  Vector center;
  double radius_sq = 0.0;
  Vector anchor;
  double anchor_slack = 0.0;

  static Ball plain(Vector center, double radius_sq);

  double slack(const Vector& z) const;
  bool contains(const Vector& z, double tol = 0.0) const { return slack(z) >= -tol; }
  std::size_t dimension() const { return static_cast<std::size_t>(center.size()); }
};

/// Intersection of balls generated by first-order records at a given alpha
/// and best value. With alpha = infinity and one record the region is the
/// single point {y_1}.
struct BallRegion {
  std::vector<Ball> balls;
  double alpha = kInfinity;
  double fval = 0.0;
  std::optional<Vector> point;  // set for the alpha = infinity point limit

  std::size_t dimension() const;
  bool is_point() const { return point.has_value(); }
  /// min_i slack_i(z).
  double min_slack(const Vector& z) const;
};

/// h(z) = f(y) + <g, z - y> + (alpha/2)|z - y|^2 - fval; h(z) <= 0 iff z is in the ball.
double lower_bound_constraint(const FirstOrderRecord& rec, double alpha, double fval,
                              const Vector& z);

/// Ball implied by alpha-strong convexity: center y - g/alpha,
/// radius^2 = |g|^2/alpha^2 - (2/alpha)(f(y) - fval). Empty when radius^2 < 0.
std::optional<Ball> ball_from_record(const FirstOrderRecord& rec, double alpha, double fval);

struct Margin {
  /// max_i h_i(witness); within tolerance of min_z max_i h_i(z).
  double value = 0.0;
  /// Lower bound on the minimum from the dual.
  double lower_bound = 0.0;
  /// Rounding level of the constraint values near the witness. |value| below
  /// it means emptiness and interior cannot be told apart numerically.
  double rounding = 0.0;
  Vector witness;
  /// Simplex weights of the dual solution.
  Vector weights;
  std::size_t iterations = 0;

  bool has_interior() const { return value < -rounding; }
  bool certainly_empty() const { return lower_bound > rounding; }
};

/// min_z max_i h_i(z) over the records' lower-bound constraints. The value is
/// <= 0 iff R(alpha) is nonempty, < 0 iff it has interior.
Margin feasibility_margin(std::span<const FirstOrderRecord> records, double alpha, double fval);

/// min_z max_i (|z - c_i|^2 - r_i^2)/2 for an explicit list of balls.
Margin ball_margin(std::span<const Ball> balls);

/// Largest alpha (within relative 1e-2, capped by alpha_hi) for which the
/// region is nonempty.
double largest_feasible_alpha(std::span<const FirstOrderRecord> records, double fval,
                              double alpha_hi);

/// Region at (alpha, fval) in the coordinates of the records.
BallRegion build_region(std::span<const FirstOrderRecord> records, double alpha, double fval);

/// Region with ball centers expressed in the reduced coordinates of `basis`.
BallRegion build_region(std::span<const FirstOrderRecord> records, double alpha, double fval,
                        const SubspaceBasis& basis);

}  // namespace geopol
