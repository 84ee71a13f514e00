#include "geopol/barriers.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace geopol {

namespace {


void require_nondegenerate(const BallRegion& region) {
  if (region.is_point()) throw DomainError("barrier of a single-point region", 0);
  if (region.balls.empty()) throw DomainError("barrier of an empty ball list", 0);
}

// Translated and scaled copy: z = origin + scale * xi.
BallRegion normalized(const BallRegion& region, const Vector& origin, double scale) {
  BallRegion out;
  out.alpha = region.alpha;
  out.fval = region.fval;
  out.balls.reserve(region.balls.size());
  const double s2 = scale * scale;
  for (const Ball& b : region.balls) {
    Ball nb;
    nb.center = (b.center - origin) / scale;
    nb.radius_sq = b.radius_sq / s2;
    // Re-anchored at the origin so slacks near it keep their own relative precision.
    nb.anchor = Vector::Zero(origin.size());
    nb.anchor_slack = b.slack(origin) / s2;
    out.balls.push_back(std::move(nb));
  }
  return out;
}

struct Evaluation {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

Evaluation evaluate(const BallRegion& region, const Vector& x, CenterKind kind, bool hessian) {
  Evaluation e;
  if (kind == CenterKind::Analytic) {
    e.value = analytic_value(region, x);
    if (hessian) {
      GradHess gh = analytic_grad_hess(region, x);
      e.gradient = std::move(gh.gradient);
      e.hessian = std::move(gh.hessian);
    }
  } else {
    e.value = volumetric_value(region, x);
    if (hessian) {
      e.gradient = volumetric_grad(region, x);
      e.hessian = volumetric_hess(region, x);
    }
  }
  return e;
}

// Newton direction with H + mu I when H is not positive definite.
Vector newton_direction(const Matrix& hessian, const Vector& gradient) {
  Eigen::LLT<Matrix> llt(hessian);
  if (llt.info() == Eigen::Success) {
    Vector dir = -llt.solve(gradient);
    if (dir.allFinite() && gradient.dot(dir) < 0.0) return dir;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hessian, Eigen::EigenvaluesOnly);
  const double mu = 1e-10 + std::abs(eig.eigenvalues().minCoeff());
  const Matrix shifted = hessian + mu * Matrix::Identity(hessian.rows(), hessian.cols());
  return -shifted.llt().solve(gradient);
}

// The volumetric gradient is a sum of terms that cancel at the center, each
// carrying the conditioning of H. Computed in extended precision it resolves
// Newton decrements well below the centering tolerance. The Hessian only
// steers the step, so it stays in double.
template <class Real>
struct ScalarWorkspace {
  using VectorX = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  using MatrixX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

  VectorX slack;
  VectorX d;
  MatrixX A;
  Real lambda1 = 0;
  Real lambda2 = 0;
  MatrixX H;
  Eigen::LLT<MatrixX> llt;
  MatrixX H_inv;
  VectorX sigma;

  ScalarWorkspace(const BallRegion& region, const Vector& xd) {
    require_nondegenerate(region);
    const auto k = static_cast<Eigen::Index>(region.balls.size());
    const auto m = xd.size();
    const VectorX x = xd.cast<Real>();
    slack.resize(k);
    d.resize(k);
    A.resize(k, m);
    for (Eigen::Index i = 0; i < k; ++i) {
      const Ball& b = region.balls[static_cast<std::size_t>(i)];
      if (b.center.size() != m)
        throw DomainError("ball dimension mismatch", static_cast<std::size_t>(i));
      const VectorX dz = x - b.anchor.cast<Real>();
      const VectorX ac = (b.anchor - b.center).cast<Real>();
      slack[i] = static_cast<Real>(b.anchor_slack) - dz.dot(dz + 2 * ac);
      if (!(slack[i] > 0))
        throw DomainError("point is not strictly inside ball " + std::to_string(i),
                          static_cast<std::size_t>(i));
      d[i] = 1 / slack[i];
      A.row(i) = d[i] * (x - b.center.cast<Real>()).transpose();
    }
    lambda1 = d.sum();
    lambda2 = d.squaredNorm();
    H = 2 * A.transpose() * A;
    H.diagonal().array() += lambda1;
    llt.compute(H);
    if (llt.info() != Eigen::Success) throw DomainError("barrier Hessian not positive definite", 0);
    H_inv = llt.solve(MatrixX::Identity(m, m));
    sigma = (A * H_inv).cwiseProduct(A).rowwise().sum();
  }
};

using ExtendedWorkspace = ScalarWorkspace<long double>;

}  // namespace

BarrierWorkspace::BarrierWorkspace(const BallRegion& region, const Vector& x) {
  const ExtendedWorkspace ext(region, x);
  slack = ext.slack.cast<double>();
  d = ext.d.cast<double>();
  A = ext.A.cast<double>();
  lambda1 = static_cast<double>(ext.lambda1);
  lambda2 = static_cast<double>(ext.lambda2);
  H = ext.H.cast<double>();
  llt.compute(H);
  H_inv = ext.H_inv.cast<double>();
  sigma = ext.sigma.cast<double>();
}

double analytic_value(const BallRegion& region, const Vector& x) {
  require_nondegenerate(region);
  double v = 0.0;
  for (std::size_t i = 0; i < region.balls.size(); ++i) {
    const double s = region.balls[i].slack(x);
    if (!(s > 0.0)) throw DomainError("point is not strictly inside ball " + std::to_string(i), i);
    v -= 0.5 * std::log(s);
  }
  return v;
}

GradHess analytic_grad_hess(const BallRegion& region, const Vector& x) {
  require_nondegenerate(region);
  const auto k = static_cast<Eigen::Index>(region.balls.size());
  Matrix A(k, x.size());
  double lambda1 = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const Ball& b = region.balls[static_cast<std::size_t>(i)];
    const double s = b.slack(x);
    if (!(s > 0.0))
      throw DomainError("point is not strictly inside ball " + std::to_string(i),
                        static_cast<std::size_t>(i));
    A.row(i) = ((x - b.center) / s).transpose();
    lambda1 += 1.0 / s;
  }
  GradHess out;
  out.gradient = A.colwise().sum().transpose();
  out.hessian = 2.0 * A.transpose() * A;
  out.hessian.diagonal().array() += lambda1;
  return out;
}

double volumetric_value(const BallRegion& region, const Vector& x) {
  const ExtendedWorkspace ws(region, x);
  return static_cast<double>(2 * ws.llt.matrixLLT().diagonal().array().log().sum());
}

Vector volumetric_grad(const BallRegion& region, const Vector& x) {
  using VectorX = ExtendedWorkspace::VectorX;
  const ExtendedWorkspace ws(region, x);
  const VectorX w = ws.A.transpose() * ws.d;
  const VectorX g = 2 * ws.H_inv.trace() * w + 4 * ws.H_inv * w + 8 * ws.A.transpose() * ws.sigma;
  return g.cast<double>();
}

Matrix volumetric_hess(const BallRegion& region, const Vector& x) {
  using Real = double;
  using VectorX = Vector;
  using MatrixX = Matrix;
  const ScalarWorkspace<double> ws(region, x);
  const MatrixX& A = ws.A;
  const MatrixX& P = ws.H_inv;
  const VectorX& d = ws.d;
  const VectorX& sigma = ws.sigma;
  auto sym = [](const MatrixX& b) -> MatrixX { return b + b.transpose(); };
  const VectorX w = A.transpose() * d;
  const MatrixX B = A * P;                        // rows b_i = P a_i
  const MatrixX S = B * A.transpose();            // A P A^T
  const VectorX tau = B.rowwise().squaredNorm();  // a_i^T P^2 a_i
  const VectorX z = P * w;
  const VectorX az = A * z;
  const VectorX p2w = P * z;
  const Real trP = P.trace();
  const Real trP2 = P.squaredNorm();
  const Real wPw = w.dot(z);

  const MatrixX AtSigmaA = A.transpose() * sigma.asDiagonal() * A;
  const MatrixX AtS2A = A.transpose() * S.cwiseAbs2() * A;
  const MatrixX AtDA = A.transpose() * d.asDiagonal() * A;
  const MatrixX AtDiagAzA = A.transpose() * az.asDiagonal() * A;
  const VectorX At_tau = A.transpose() * tau;

  MatrixX hv = 48 * AtSigmaA - 64 * AtS2A;
  hv.diagonal().array() += 8 * d.dot(sigma) + 2 * ws.lambda2 * trP;
  hv += 4 * ws.lambda2 * P;
  hv += 8 * trP * AtDA;
  hv += 16 * sym(AtDA * P);
  hv -= 4 * trP2 * (w * w.transpose());
  hv -= 8 * (z * z.transpose());
  hv -= 8 * sym(w * p2w.transpose());
  hv -= 8 * wPw * P;
  hv -= 16 * sym(At_tau * w.transpose());
  hv -= 32 * sym(AtDiagAzA * P);
  return 0.5 * (hv + hv.transpose());
}

Matrix volumetric_hess_fd(const BallRegion& region, const Vector& x, double step) {
  const auto m = x.size();
  Matrix h(m, m);
  Vector xp = x, xm = x;
  for (Eigen::Index j = 0; j < m; ++j) {
    xp[j] = x[j] + step;
    xm[j] = x[j] - step;
    h.col(j) = (volumetric_grad(region, xp) - volumetric_grad(region, xm)) / (2.0 * step);
    xp[j] = xm[j] = x[j];
  }
  return 0.5 * (h + h.transpose());
}

Vector interior_start(const BallRegion& region, const std::optional<Vector>& warm) {
  if (region.is_point()) return *region.point;
  const Margin margin = ball_margin(region.balls);
  if (!margin.has_interior())
    throw CenteringError("region has no strictly interior point (margin " +
                         std::to_string(margin.value) + ")");
  const Vector& witness = margin.witness;
  const double floor = 1e-14 * std::max(region.min_slack(witness), 0.0);
  if (!warm || warm->size() != witness.size()) return witness;
  if (region.min_slack(*warm) > floor) return *warm;

  // Smallest t with warm + t (witness - warm) interior, then halfway to the witness.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (region.min_slack(*warm + mid * (witness - *warm)) > floor)
      hi = mid;
    else
      lo = mid;
  }
  const double t = hi + 0.5 * (1.0 - hi);
  return *warm + t * (witness - *warm);
}

CenterResult newton_center(const BallRegion& region, CenterKind kind,
                           const std::optional<Vector>& warm, const CenterOptions& options) {
  CenterResult result;
  result.kind = kind;
  if (region.is_point()) {
    result.center = *region.point;
    result.final_decrement = 0.0;
    result.converged = true;
    result.decrements.push_back(0.0);
    return result;
  }

  const Vector start = interior_start(region, warm);
  const double start_slack = region.min_slack(start);
  const double scale = std::sqrt(start_slack);
  BallRegion reg = normalized(region, start, scale);
  const auto m = start.size();
  // Frame offset: the iterate is start + scale * (offset + x).
  Vector offset = Vector::Zero(m);

  Vector x = Vector::Zero(m);
  const double floor = 0.0;

  Evaluation cur = evaluate(reg, x, kind, true);
  for (std::size_t it = 0;; ++it) {
    Vector dir = newton_direction(cur.hessian, cur.gradient);
    double dec = std::sqrt(std::max(0.0, -cur.gradient.dot(dir)));
    result.decrements.push_back(dec);
    result.final_decrement = dec;
    if (dec <= options.tol) {
      result.converged = true;
      break;
    }
    if (it >= options.max_iterations) break;

    if (kind == CenterKind::Volumetric && options.verify_hessian) {
      // Directional check of the closed form against central differences of the gradient.
      const Vector u = dir / dir.norm();
      double eps = 1e-5;
      for (int shrink = 0; shrink < 30; ++shrink) {
        if (reg.min_slack(x + eps * u) > floor && reg.min_slack(x - eps * u) > floor) break;
        eps *= 0.5;
      }
      const Vector fd =
          (volumetric_grad(reg, x + eps * u) - volumetric_grad(reg, x - eps * u)) / (2.0 * eps);
      const Vector hd = cur.hessian * u;
      if ((fd - hd).norm() > 1e-3 * (fd.norm() + hd.norm()) + 1e-12) {
        const Matrix hfd = volumetric_hess_fd(reg, x, 1e-6);
        dir = newton_direction(hfd, cur.gradient);
        dec = std::sqrt(std::max(0.0, -cur.gradient.dot(dir)));
        ++result.fd_fallbacks;
      }
    }

    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
      const Vector cand = x + t * dir;
      if (!(reg.min_slack(cand) > floor)) continue;
      const double v = kind == CenterKind::Analytic ? analytic_value(reg, cand)
                                                    : volumetric_value(reg, cand);
      const bool quadratic_phase = dec < 0.25 && t == 1.0;
      if (quadratic_phase || v < cur.value ||
          (v <= cur.value + 1e-14 * (1.0 + std::abs(cur.value)) && dec < 1e-4)) {
        x = cand;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    ++result.newton_iterations;
    if (dec < 0.25) {
      // Near the center, keep the iterate at the frame origin where it is
      // resolved finest; coordinates far from zero cap the reachable decrement.
      reg = normalized(reg, x, 1.0);
      offset += x;
      x.setZero();
    }
    cur = evaluate(reg, x, kind, true);
  }
  result.center = start + scale * (offset + x);
  return result;
}

}  // namespace geopol
