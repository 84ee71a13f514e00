#pragma once

#include <optional>

#include "geopol/engine.hpp"
#include "geopol/region.hpp"

namespace geopol {

/// Evaluation point on or outside the boundary of a ball.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::size_t ball) : Error(what), ball_(ball) {}
  std::size_t ball() const { return ball_; }

 private:
  std::size_t ball_;
};

/// No strictly interior starting point for centering.
class CenteringError : public Error {
 public:
  using Error::Error;
};

/// Quantities shared by the analytic and volumetric barrier derivatives at one
/// point: d_i = 1/slack_i, rows of A are d_i (x - c_i), H = 2 A^T A + lambda1 I.
struct BarrierWorkspace {
  Vector slack;
  Vector d;
  Matrix A;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Matrix H;
  Eigen::LLT<Matrix> llt;
  Matrix H_inv;
  /// sigma_i = a_i^T H^{-1} a_i.
  Vector sigma;

  BarrierWorkspace(const BallRegion& region, const Vector& x);
};

double analytic_value(const BallRegion& region, const Vector& x);

struct GradHess {
  Vector gradient;
  Matrix hessian;
};
GradHess analytic_grad_hess(const BallRegion& region, const Vector& x);

/// logdet of the analytic barrier Hessian.
double volumetric_value(const BallRegion& region, const Vector& x);
Vector volumetric_grad(const BallRegion& region, const Vector& x);
/// Closed-form Hessian of the volumetric barrier, symmetrized.
Matrix volumetric_hess(const BallRegion& region, const Vector& x);

/// Central finite differences of volumetric_grad.
Matrix volumetric_hess_fd(const BallRegion& region, const Vector& x, double step);

enum class CenterKind { Analytic, Volumetric };

struct CenterResult {
  Vector center;
  std::size_t newton_iterations = 0;
  double final_decrement = kInfinity;
  CenterKind kind = CenterKind::Volumetric;
  bool converged = false;
  /// Newton steps that switched to a finite-difference Hessian.
  std::size_t fd_fallbacks = 0;
  /// Newton decrement before each step, then the final one.
  std::vector<double> decrements;
};

struct CenterOptions {
  double tol = 1e-10;
  std::size_t max_iterations = 50;
  /// Check the closed-form Hessian along each Newton direction.
  bool verify_hessian = true;
};

/// Strictly interior start: `warm` when valid, else `warm` pulled toward the
/// min-max witness of the region, else the witness itself.
Vector interior_start(const BallRegion& region, const std::optional<Vector>& warm);

/// Damped Newton minimization of the analytic or volumetric barrier.
CenterResult newton_center(const BallRegion& region, CenterKind kind,
                           const std::optional<Vector>& warm = std::nullopt,
                           const CenterOptions& options = {});

}  // namespace geopol
