#pragma once

#include <functional>

#include "geopol/engine.hpp"

namespace geopol {

class LineSearchError : public Error {
 public:
  using Error::Error;
};

/// Value and derivative of a one-dimensional restriction t -> f(a + t (b - a)).
struct LinePoint {
  double value;
  double slope;
  /// Magnitude of the terms summed into `slope`; slopes below rounding of
  /// this scale count as zero.
  double slope_scale = 0.0;
};

using LineFunction = std::function<LinePoint(double t)>;

struct LineMinimum {
  double t_star = 0.0;
  double value = 0.0;
  double value_at_0 = 0.0;
  double value_at_1 = 0.0;
  std::size_t evals = 0;
};

/// Minimizes a convex restriction over the whole real line. Brackets the
/// minimizer by doubling from [0, 1] (up to 2^60), then shrinks the bracket
/// on the sign of the derivative (safeguarded secant) to a relative width of
/// 4 machine epsilons. The returned value never exceeds the values at t = 0
/// and t = 1.
LineMinimum minimize_on_line(const LineFunction& phi);

struct LineSearchResult {
  double t_star = 0.0;
  Vector point;
  double value = 0.0;
  std::size_t value_evals = 0;
  /// f(a) and f(b), both evaluated as anchors.
  double value_a = 0.0;
  double value_b = 0.0;
};

/// Exact line search on the line through a (t = 0) and b (t = 1). Probes
/// are charged to the oracle's value-evaluation counter.
LineSearchResult exact_line_search(Oracle& oracle, const Vector& a, const Vector& b);

/// Exact line search from `from` along `direction`.
inline LineSearchResult line_search_along(Oracle& oracle, const Vector& from,
                                          const Vector& direction) {
  return exact_line_search(oracle, from, from + direction);
}

}  // namespace geopol
