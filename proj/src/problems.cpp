#include "geopol/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace geopol {

QuadraticProblem QuadraticProblem::random(std::size_t n, std::uint64_t seed,
                                          std::optional<double> kappa_floor) {
  if (n == 0) throw Error("quadratic dimension must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  QuadraticProblem p;
  p.seed = seed;
  p.D.resize(static_cast<Eigen::Index>(n));
  p.c.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < p.D.size(); ++i) p.D[i] = uniform(rng);
  for (Eigen::Index i = 0; i < p.c.size(); ++i) p.c[i] = normal(rng);
  if (kappa_floor) {
    if (!(*kappa_floor >= 1.0)) throw Error("condition number floor must be >= 1");
    const double lo = 1.0 / *kappa_floor;
    p.D = p.D.cwiseMax(lo);
  }
  return p;
}

double QuadraticProblem::eval(const Vector& x, Vector& grad) const {
  const Vector r = x - c;
  grad = 2.0 * D.cwiseProduct(r);
  return D.dot(r.cwiseProduct(r));
}

double QuadraticProblem::kappa() const {
  double lo = kInfinity;
  for (Eigen::Index i = 0; i < D.size(); ++i)
    if (D[i] > 0.0) lo = std::min(lo, D[i]);
  return std::isinf(lo) ? kInfinity : D.maxCoeff() / lo;
}

Objective QuadraticProblem::objective() const {
  return Objective(
      dimension(), [p = *this](const Vector& x, Vector& g) { return p.eval(x, g); },
      "quadratic");
}

double NesterovVariantProblem::g(double z) {
  const double e = kSmoothing;
  if (z >= kKnot) return std::sqrt((z - kKnot) * (z - kKnot) + e * e) - e;
  if (z <= -kKnot) return std::sqrt((z + kKnot) * (z + kKnot) + e * e) - e;
  return 0.0;
}

double NesterovVariantProblem::g_prime(double z) {
  const double e = kSmoothing;
  if (z >= kKnot) return (z - kKnot) / std::sqrt((z - kKnot) * (z - kKnot) + e * e);
  if (z <= -kKnot) return (z + kKnot) / std::sqrt((z + kKnot) * (z + kKnot) + e * e);
  return 0.0;
}

double NesterovVariantProblem::eval(const Vector& x, Vector& grad) const {
  const Eigen::Index m = x.size();
  grad.setZero(m);
  double value = g(1.0 - x[0]);
  grad[0] = -g_prime(1.0 - x[0]);
  for (Eigen::Index k = 0; k + 1 < m; ++k) {
    const double d = x[k] - x[k + 1];
    value += g(d);
    const double s = g_prime(d);
    grad[k] += s;
    grad[k + 1] -= s;
  }
  return value;
}

Vector NesterovVariantProblem::minimizer() const {
  Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size() && i < 10; ++i) x[i] = (10 - i) / 10.0;
  return x;
}

Objective NesterovVariantProblem::objective() const {
  if (n == 0) throw Error("Nesterov variant dimension must be positive");
  return Objective(
      n, [p = *this](const Vector& x, Vector& g) { return p.eval(x, g); }, "nesterov");
}

double HingeRegressionProblem::phi(double t, double z) {
  if (z <= -1.0) return 0.0;
  if (z >= -1.0 + t) return z + 1.0 - t / 2.0;
  return (z + 1.0) * (z + 1.0) / (2.0 * t);
}

double HingeRegressionProblem::phi_prime(double t, double z) {
  if (z <= -1.0) return 0.0;
  if (z >= -1.0 + t) return 1.0;
  return (z + 1.0) / t;
}

HingeRegressionProblem HingeRegressionProblem::synthetic(std::size_t samples, std::size_t d,
                                                         std::uint64_t seed, double t,
                                                         double lambda, double density) {
  if (samples == 0 || d == 0) throw Error("hinge problem needs samples and features");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector w(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = normal(rng);

  HingeRegressionProblem p;
  p.t = t;
  p.lambda = lambda;
  p.data.dim = d;
  for (std::size_t i = 0; i < samples; ++i) {
    SparseRow row;
    for (std::size_t j = 1; j <= d; ++j)
      if (uniform(rng) < density) row.features.emplace_back(j, normal(rng));
    if (row.features.empty()) row.features.emplace_back(1 + i % d, normal(rng));
    const double margin = row.dot(w);
    const bool flip = uniform(rng) < 0.1;
    row.label = ((margin >= 0.0) != flip) ? 1.0 : -1.0;
    p.data.rows.push_back(std::move(row));
  }
  return p;
}

double HingeRegressionProblem::eval(const Vector& x, Vector& grad) const {
  grad = lambda * x;
  double value = 0.5 * lambda * x.squaredNorm();
  const double inv_n = 1.0 / static_cast<double>(data.rows.size());
  for (const auto& row : data.rows) {
    const double z = row.label * row.dot(x);
    value += inv_n * phi(t, z);
    const double s = inv_n * phi_prime(t, z) * row.label;
    if (s != 0.0)
      for (const auto& [j, v] : row.features) grad[static_cast<Eigen::Index>(j - 1)] += s * v;
  }
  return value;
}

Objective HingeRegressionProblem::objective() const {
  if (data.rows.empty() || data.dim == 0) throw Error("hinge problem has no data");
  if (!(t > 0.0)) throw Error("hinge smoothness t must be positive");
  if (!(lambda > 0.0)) throw Error("regularization lambda must be positive");
  return Objective(
      data.dim, [p = *this](const Vector& x, Vector& g) { return p.eval(x, g); }, "hinge");
}

}  // namespace geopol
