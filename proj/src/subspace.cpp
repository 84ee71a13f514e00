#include "geopol/subspace.hpp"

#include <algorithm>
#include <cmath>

namespace geopol {

SubspaceBasis::SubspaceBasis(Vector base) : base_(std::move(base)) {
  const auto n = base_.size();
  const Eigen::Index cap = std::min<Eigen::Index>(n, 8);
  q_ = Matrix::Zero(n, cap);
  r_ = Matrix::Zero(cap, cap);
}

SubspaceBasis SubspaceBasis::full(Vector base) {
  SubspaceBasis b(std::move(base));
  const auto n = b.base_.size();
  b.q_ = Matrix::Identity(n, n);
  b.r_ = Matrix::Identity(n, n);
  b.m_ = static_cast<std::size_t>(n);
  b.full_ = true;
  return b;
}

void SubspaceBasis::grow_storage() {
  const Eigen::Index n = base_.size();
  const Eigen::Index cap = std::min<Eigen::Index>(n, std::max<Eigen::Index>(8, 2 * q_.cols()));
  Matrix q = Matrix::Zero(n, cap);
  Matrix r = Matrix::Zero(cap, cap);
  q.leftCols(q_.cols()) = q_;
  r.topLeftCorner(r_.rows(), r_.cols()) = r_;
  q_.swap(q);
  r_.swap(r);
}

bool SubspaceBasis::insert(const Vector& v) {
  if (!initialized()) throw SubspaceError("basis used before initialization");
  if (v.size() != base_.size()) throw SubspaceError("inserted vector has wrong dimension");
  const double vnorm = v.norm();
  if (full_ || vnorm == 0.0 || m_ == ambient_dimension()) {
    ++dependent_;
    return false;
  }
  const auto m = static_cast<Eigen::Index>(m_);
  const auto Q = q_.leftCols(m);

  // Classical Gram-Schmidt twice; a third pass only if the new column is
  // still visibly non-orthogonal.
  Vector w = v;
  Vector coeff = Vector::Zero(m);
  for (int pass = 0; pass < 3; ++pass) {
    if (m == 0) break;
    const Vector c = Q.transpose() * w;
    w.noalias() -= Q * c;
    coeff += c;
    if (pass >= 1) {
      const double wn = w.norm();
      if (wn == 0.0 || (Q.transpose() * w).cwiseAbs().maxCoeff() <= kOrthoTol * wn) break;
    }
  }
  const double residual = w.norm();
  if (residual <= kDependenceTol * vnorm) {
    ++dependent_;
    return false;
  }
  if (m == q_.cols()) grow_storage();
  q_.col(m) = w / residual;
  r_.col(m).head(m) = coeff;
  r_(m, m) = residual;
  ++m_;
  return true;
}

Vector SubspaceBasis::reduce(const Vector& x) const {
  if (x.size() != base_.size()) throw SubspaceError("reduced point has wrong dimension");
  const Vector shifted = x - base_;
  Vector u = q().transpose() * shifted;
  if (!full_) {
    const double residual = (shifted - q() * u).norm();
    if (residual > kSpanTol * (1.0 + x.norm()))
      throw SubspaceError("point lies outside base + span(Q): residual " +
                          std::to_string(residual));
  }
  return u;
}

Vector SubspaceBasis::reduce_direction(const Vector& v) const { return q().transpose() * v; }

Vector SubspaceBasis::lift(const Vector& u) const {
  if (static_cast<std::size_t>(u.size()) != m_)
    throw SubspaceError("lifted coordinates have wrong dimension");
  return base_ + q() * u;
}

double SubspaceBasis::orthonormality_error() const {
  if (m_ == 0) return 0.0;
  const Matrix g = q().transpose() * q();
  return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace geopol
