#pragma once

#include "geopol/engine.hpp"

namespace geopol {

class SubspaceError : public Error {
 public:
  using Error::Error;
};

/// Orthonormal basis of an affine subspace base + span(Q), grown one vector
/// at a time by Gram-Schmidt with one re-orthogonalization pass.
///
/// Columns are only ever appended, so coordinates computed against an older
/// basis stay valid after zero padding.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;
  explicit SubspaceBasis(Vector base);

  /// Use an identity basis of R^n instead of an incremental one.
  static SubspaceBasis full(Vector base);

  bool initialized() const { return base_.size() > 0; }
  std::size_t ambient_dimension() const { return static_cast<std::size_t>(base_.size()); }
  std::size_t dimension() const { return m_; }
  const Vector& base() const { return base_; }
  /// n x m block of orthonormal columns.
  auto q() const { return q_.leftCols(static_cast<Eigen::Index>(m_)); }
  /// m x m upper-triangular coordinates of the independent inserted vectors.
  auto r() const {
    return r_.topLeftCorner(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
  }

  /// Inserts `v`; returns false when it was numerically dependent and the
  /// dimension did not grow.
  bool insert(const Vector& v);

  std::size_t dependent_count() const { return dependent_; }

  /// Q^T (x - base). Throws SubspaceError when x is not in base + span(Q).
  Vector reduce(const Vector& x) const;
  /// Q^T v for a direction v (no base shift, no span check).
  Vector reduce_direction(const Vector& v) const;
  /// base + Q u.
  Vector lift(const Vector& u) const;

  /// max |Q^T Q - I|.
  double orthonormality_error() const;

  static constexpr double kDependenceTol = 1e-12;
  static constexpr double kOrthoTol = 1e-10;
  static constexpr double kSpanTol = 1e-8;

 private:
  void grow_storage();

  Vector base_;
  Matrix q_;
  Matrix r_;
  std::size_t m_ = 0;
  std::size_t dependent_ = 0;
  bool full_ = false;
};

}  // namespace geopol
