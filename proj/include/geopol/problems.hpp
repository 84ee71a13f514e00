#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "geopol/engine.hpp"
#include "geopol/libsvm.hpp"

namespace geopol {

/// f(x) = sum_i D_i (x_i - c_i)^2.
struct QuadraticProblem {
  Vector D;
  Vector c;
  std::uint64_t seed = 0;

  /// D uniform on [0, 1], c standard normal. With `kappa_floor` set, D is
  /// clamped below at 1/kappa_floor so the condition number is at most kappa_floor.
  static QuadraticProblem random(std::size_t n, std::uint64_t seed,
                                 std::optional<double> kappa_floor = std::nullopt);

  std::size_t dimension() const { return static_cast<std::size_t>(D.size()); }
  double eval(const Vector& x, Vector& grad) const;
  /// Strong convexity 2 min D and smoothness 2 max D of the Hessian 2D.
  double strong_convexity() const { return 2.0 * D.minCoeff(); }
  double smoothness() const { return 2.0 * D.maxCoeff(); }
  /// max D over the smallest positive D (infinity when D == 0).
  double kappa() const;
  Objective objective() const;
};

/// f(x) = g(1 - x_1) + sum_k g(x_k - x_{k+1}) with the smoothed dead-zone g.
struct NesterovVariantProblem {
  std::size_t n = 0;

  static constexpr double kKnot = 0.1;
  static constexpr double kSmoothing = 0.001;

  static double g(double z);
  static double g_prime(double z);

  double eval(const Vector& x, Vector& grad) const;
  /// (1, 0.9, ..., 0.1, 0, ..., 0), truncated to n entries.
  Vector minimizer() const;
  Objective objective() const;
};

/// f_t(x) = (1/N) sum_i phi_t(b_i a_i^T x) + (lambda/2) |x|^2.
struct HingeRegressionProblem {
  SparseDataset data;
  double t = 1.0;
  double lambda = 1e-4;

  static double phi(double t, double z);
  static double phi_prime(double t, double z);

  /// Synthetic data: `samples` rows in dimension d, about `density` nonzeros
  /// per row, labels from a random hyperplane with 10% flipped.
  static HingeRegressionProblem synthetic(std::size_t samples, std::size_t d, std::uint64_t seed,
                                          double t, double lambda, double density = 0.2);

  std::size_t dimension() const { return data.dim; }
  double eval(const Vector& x, Vector& grad) const;
  Objective objective() const;
};

}  // namespace geopol
