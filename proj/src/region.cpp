#include "geopol/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace geopol {

namespace {

// h_i(origin + w) = (curvature/2)|w|^2 + <a_i, w> + b_i, one row of `a` per i.
struct QuadraticFamily {
  double curvature = 1.0;
  Matrix a;
  Vector b;
  Vector origin;
  // Magnitudes of the terms that were summed into b_i and a_i, for rounding estimates.
  Vector b_terms;
  Vector a_terms;
};

enum class SolveMode { Full, Sign };

constexpr std::size_t kMaxSmoIterations = 50000;
constexpr double kRoundingFactor = 64.0 * std::numeric_limits<double>::epsilon();
constexpr double kGapTol = 1e-14;

// Rounding error of max_i h_i at the current dual point, over the constraints
// that carry weight or attain the max (s = K lambda).
double rounding_level(const QuadraticFamily& fam, const Vector& s, const Vector& lambda,
                      double quad, Eigen::Index argmax) {
  const double q = fam.curvature;
  const double wnorm = std::sqrt(2.0 * std::max(quad, 0.0) / q);
  auto level = [&](Eigen::Index t) {
    return fam.b_terms[t] + std::abs(s[t]) / q + fam.a_terms[t] * wnorm;
  };
  double out = level(argmax);
  for (Eigen::Index t = 0; t < lambda.size(); ++t)
    if (lambda[t] > 0.0) out = std::max(out, level(t));
  return kRoundingFactor * (out + quad);
}

// Maximizes the dual  b^T l - l^T K l / (2q)  over the simplex by pairwise
// (maximal violating pair) coordinate ascent, K = a a^T. The primal minimizer
// is w = -a^T l / q.
Margin solve_min_max(const QuadraticFamily& fam, SolveMode mode) {
  const Eigen::Index k = fam.b.size();
  const double q = fam.curvature;
  Margin out;
  if (k == 0) throw RegionError("feasibility margin of an empty constraint set");

  const Matrix K = fam.a * fam.a.transpose();
  double scale = 0.0;
  for (Eigen::Index i = 0; i < k; ++i)
    scale = std::max(scale, std::abs(fam.b[i]) + K(i, i) / (2.0 * q));
  const double tol = kGapTol * std::max(scale, std::numeric_limits<double>::min());

  Vector lambda = Vector::Zero(k);
  {
    Eigen::Index best = 0;
    double best_val = -kInfinity;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double v = fam.b[i] - K(i, i) / (2.0 * q);
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    lambda[best] = 1.0;
  }
  Vector s = K * lambda;  // K lambda
  Vector grad(k);

  std::size_t it = 0;
  for (; it < kMaxSmoIterations; ++it) {
    if (it % 512 == 511) s = K * lambda;
    grad = fam.b - s / q;
    Eigen::Index i = 0, j = -1;
    grad.maxCoeff(&i);
    double gj = kInfinity;
    for (Eigen::Index t = 0; t < k; ++t)
      if (lambda[t] > 0.0 && grad[t] < gj) {
        gj = grad[t];
        j = t;
      }
    const double quad = lambda.dot(s) / (2.0 * q);
    const double primal = grad[i] + quad;
    const double dual = fam.b.dot(lambda) - quad;
    if (primal - dual <= tol) break;
    // Gap below the rounding level of the constraint values: no further progress possible.
    if (it % 16 == 0 && primal - dual <= rounding_level(fam, s, lambda, quad, i)) break;
    if (mode == SolveMode::Sign && (primal < 0.0 || dual > 0.0)) break;
    if (j < 0 || i == j) break;

    const double curv = K(i, i) + K(j, j) - 2.0 * K(i, j);
    double delta = lambda[j];
    if (curv > 0.0) delta = std::min(delta, q * (grad[i] - grad[j]) / curv);
    if (!(delta > 0.0)) break;
    lambda[i] += delta;
    lambda[j] -= delta;
    if (lambda[j] < 1e-300) lambda[j] = 0.0;
    s.noalias() += delta * (K.col(i) - K.col(j));
  }
  out.iterations = it;

  s = K * lambda;
  const Vector w = -fam.a.transpose() * lambda / q;
  const Vector values = (fam.a * w).array() + fam.b.array() + 0.5 * q * w.squaredNorm();
  out.value = values.maxCoeff();
  Eigen::Index arg = 0;
  values.maxCoeff(&arg);
  out.rounding = rounding_level(fam, s, lambda, lambda.dot(s) / (2.0 * q), arg);
  out.lower_bound = fam.b.dot(lambda) - lambda.dot(s) / (2.0 * q);
  out.witness = fam.origin + w;
  out.weights = std::move(lambda);
  return out;
}

QuadraticFamily family_from_records(std::span<const FirstOrderRecord> records, double alpha,
                                    double fval) {
  if (records.empty()) throw RegionError("no records");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw RegionError("feasibility margin needs a finite positive alpha");
  std::size_t best = 0;
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].value < records[best].value) best = i;

  QuadraticFamily fam;
  fam.curvature = alpha;
  fam.origin = records[best].point;
  const auto k = static_cast<Eigen::Index>(records.size());
  const auto m = fam.origin.size();
  fam.a.resize(k, m);
  fam.b.resize(k);
  fam.b_terms.resize(k);
  fam.a_terms.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& rec = records[static_cast<std::size_t>(i)];
    const Vector e = rec.point - fam.origin;
    fam.a.row(i) = (rec.gradient - alpha * e).transpose();
    fam.b[i] = (rec.value - fval) - rec.gradient.dot(e) + 0.5 * alpha * e.squaredNorm();
    fam.b_terms[i] = std::abs(rec.value - fval) + std::abs(rec.gradient.dot(e)) +
                     0.5 * alpha * e.squaredNorm();
    fam.a_terms[i] = rec.gradient.norm() + alpha * e.norm();
  }
  return fam;
}

bool feasible_at(std::span<const FirstOrderRecord> records, double alpha, double fval) {
  const Margin m = solve_min_max(family_from_records(records, alpha, fval), SolveMode::Sign);
  if (m.value <= 0.0) return true;
  if (m.lower_bound > 0.0) return false;
  return 0.5 * (m.value + m.lower_bound) <= 0.0;
}

}  // namespace

Ball Ball::plain(Vector center, double radius_sq) {
  Ball b;
  b.anchor = center;
  b.anchor_slack = radius_sq;
  b.center = std::move(center);
  b.radius_sq = radius_sq;
  return b;
}

double Ball::slack(const Vector& z) const {
  const Vector dz = z - anchor;
  return anchor_slack - dz.dot(dz + 2.0 * (anchor - center));
}

std::size_t BallRegion::dimension() const {
  if (point) return static_cast<std::size_t>(point->size());
  return balls.empty() ? 0 : balls.front().dimension();
}

double BallRegion::min_slack(const Vector& z) const {
  if (point) return -(z - *point).squaredNorm();
  double s = kInfinity;
  for (const auto& b : balls) s = std::min(s, b.slack(z));
  return s;
}

double lower_bound_constraint(const FirstOrderRecord& rec, double alpha, double fval,
                              const Vector& z) {
  const Vector dz = z - rec.point;
  return rec.value + rec.gradient.dot(dz) + 0.5 * alpha * dz.squaredNorm() - fval;
}

std::optional<Ball> ball_from_record(const FirstOrderRecord& rec, double alpha, double fval) {
  if (!(alpha > 0.0)) throw RegionError("ball_from_record needs alpha > 0");
  if (std::isinf(alpha)) {
    if (rec.value == fval) return Ball::plain(rec.point, 0.0);
    return std::nullopt;
  }
  const double radius_sq = rec.gradient.squaredNorm() / (alpha * alpha) -
                           (2.0 / alpha) * (rec.value - fval);
  if (radius_sq < 0.0) return std::nullopt;
  Ball b;
  b.center = rec.point - rec.gradient / alpha;
  b.radius_sq = radius_sq;
  b.anchor = rec.point;
  b.anchor_slack = (2.0 / alpha) * (fval - rec.value);
  return b;
}

Margin feasibility_margin(std::span<const FirstOrderRecord> records, double alpha, double fval) {
  return solve_min_max(family_from_records(records, alpha, fval), SolveMode::Full);
}

Margin ball_margin(std::span<const Ball> balls) {
  if (balls.empty()) throw RegionError("no balls");
  std::size_t smallest = 0;
  for (std::size_t i = 1; i < balls.size(); ++i)
    if (balls[i].radius_sq < balls[smallest].radius_sq) smallest = i;

  // -slack_i(z)/2 = |z-p|^2/2 + <p-c, z-p> - kappa/2, expanded around the origin.
  QuadraticFamily fam;
  fam.curvature = 1.0;
  fam.origin = balls[smallest].anchor;
  const auto k = static_cast<Eigen::Index>(balls.size());
  fam.a.resize(k, fam.origin.size());
  fam.b.resize(k);
  fam.b_terms.resize(k);
  fam.a_terms.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Ball& ball = balls[static_cast<std::size_t>(i)];
    const Vector e = ball.anchor - fam.origin;
    const Vector l = ball.anchor - ball.center;
    fam.a.row(i) = (l - e).transpose();
    fam.b[i] = 0.5 * e.squaredNorm() - l.dot(e) - 0.5 * ball.anchor_slack;
    fam.b_terms[i] = 0.5 * e.squaredNorm() + std::abs(l.dot(e)) + 0.5 * std::abs(ball.anchor_slack);
    fam.a_terms[i] = l.norm() + e.norm();
  }
  return solve_min_max(fam, SolveMode::Full);
}

double largest_feasible_alpha(std::span<const FirstOrderRecord> records, double fval,
                              double alpha_hi) {
  if (records.empty()) throw RegionError("largest_feasible_alpha needs records");
  if (!(alpha_hi > 0.0)) throw RegionError("alpha_hi must be positive");

  // A single ball is empty beyond |g|^2 / (2 (f - fval)).
  double cap = alpha_hi;
  for (const auto& rec : records) {
    const double gap = rec.value - fval;
    if (gap > 0.0) cap = std::min(cap, rec.gradient.squaredNorm() / (2.0 * gap));
  }

  double hi;
  if (std::isfinite(cap)) {
    if (cap > 0.0 && feasible_at(records, cap, fval)) return cap;
    hi = cap;
  } else {
    double a = 1.0;
    while (feasible_at(records, a, fval)) {
      a *= 2.0;
      if (a > 0x1p200) return alpha_hi;
    }
    hi = a;
  }

  double lo = hi / 2.0;
  while (!feasible_at(records, lo, fval)) {
    hi = lo;
    lo /= 2.0;
    if (lo < 0x1p-1000) throw RegionError("no feasible alpha found");
  }
  while (hi > lo * (1.0 + 1e-2)) {
    const double mid = std::sqrt(lo * hi);
    if (feasible_at(records, mid, fval))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

BallRegion build_region(std::span<const FirstOrderRecord> records, double alpha, double fval) {
  if (records.empty()) throw RegionError("build_region needs records");
  BallRegion region;
  region.alpha = alpha;
  region.fval = fval;
  if (std::isinf(alpha)) {
    const Vector& p = records.front().point;
    for (const auto& rec : records)
      if (rec.value != fval || rec.point != p)
        throw RegionError("region is empty at alpha = infinity");
    region.point = p;
    return region;
  }
  region.balls.reserve(records.size());
  for (const auto& rec : records) {
    auto ball = ball_from_record(rec, alpha, fval);
    if (!ball) throw RegionError("alpha is infeasible: a lower-bound ball is empty");
    region.balls.push_back(std::move(*ball));
  }
  if (records.size() > 1 && feasibility_margin(records, alpha, fval).certainly_empty())
    throw RegionError("alpha is infeasible: lower-bound balls do not intersect");
  return region;
}

BallRegion build_region(std::span<const FirstOrderRecord> records, double alpha, double fval,
                        const SubspaceBasis& basis) {
  std::vector<FirstOrderRecord> reduced;
  reduced.reserve(records.size());
  for (const auto& rec : records)
    reduced.push_back({basis.reduce(rec.point), rec.value, basis.reduce_direction(rec.gradient)});
  return build_region(reduced, alpha, fval);
}

}  // namespace geopol
