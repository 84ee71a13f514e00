#include <doctest.h>

#include <random>

#include "geopol/barriers.hpp"
#include "oracles.hpp"

using namespace geopol;

namespace {

BallRegion region_of(std::vector<Ball> balls) {
  BallRegion r;
  r.alpha = 1.0;
  r.balls = std::move(balls);
  return r;
}

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// Interior point of a random region, not too close to the boundary.
Vector interior_sample(const BallRegion& reg, const oracle::RandomRegion& rr, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  for (int attempt = 0; attempt < 100; ++attempt) {
    Vector x = rr.interior;
    for (auto& e : x) e += 0.05 * normal(rng);
    bool ok = true;
    for (std::size_t i = 0; i < rr.centers.size(); ++i)
      ok = ok && reg.balls[i].slack(x) > 0.02 * rr.r2[i];
    if (ok) return x;
  }
  return rr.interior;
}

}  // namespace

TEST_CASE("analytic barrier values") {
  const BallRegion unit = region_of({Ball::plain(Vector::Zero(2), 1.0)});
  CHECK(analytic_value(unit, Vector::Zero(2)) == 0.0);
  const double rad = std::sqrt(1.0 - std::exp(-2.0));
  CHECK(analytic_value(unit, v2(rad, 0.0)) == doctest::Approx(1.0).epsilon(1e-12));

  const BallRegion two = region_of({Ball::plain(Vector::Zero(2), 1.0),
                                    Ball::plain(v2(0.5, 0.0), 1.0)});
  CHECK(analytic_value(two, v2(0.25, 0.0)) ==
        doctest::Approx(-0.5 * (2.0 * std::log(0.9375))).epsilon(1e-14));

  try {
    analytic_value(two, v2(1.2, 0.0));
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(e.ball() == 0);
  }

  const GradHess gh = analytic_grad_hess(unit, Vector::Zero(2));
  CHECK(gh.gradient.isZero(0.0));
  CHECK(gh.hessian.isApprox(Matrix::Identity(2, 2)));
}

TEST_CASE("volumetric barrier values") {
  const BallRegion unit = region_of({Ball::plain(Vector::Zero(3), 1.0)});
  CHECK(volumetric_value(unit, Vector::Zero(3)) == doctest::Approx(0.0));
  const double r = 0.7;
  const BallRegion ball = region_of({Ball::plain(Vector::Ones(3), r * r)});
  CHECK(volumetric_value(ball, Vector::Ones(3)) ==
        doctest::Approx(3.0 * std::log(1.0 / (r * r))).epsilon(1e-13));
  CHECK(volumetric_grad(ball, Vector::Ones(3)).norm() < 1e-14);

  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto rr = oracle::random_region(rng, 2, 2);
    const BallRegion reg = oracle::to_ball_region(rr);
    CHECK(volumetric_value(reg, rr.interior) ==
          doctest::Approx(oracle::volumetric_direct(rr.centers, rr.r2, rr.interior)).epsilon(1e-10));
    CHECK(analytic_value(reg, rr.interior) ==
          doctest::Approx(oracle::analytic_direct(rr.centers, rr.r2, rr.interior)).epsilon(1e-10));
  }
}

TEST_CASE("symmetric balls give an axial gradient") {
  const BallRegion reg = region_of({Ball::plain(v2(0.0, 1.0), 4.0), Ball::plain(v2(0.0, -1.0), 4.0)});
  const Vector g = volumetric_grad(reg, v2(0.3, 0.0));
  CHECK(std::abs(g[1]) < 1e-10);
  const Matrix H = volumetric_hess(reg, Vector::Zero(2));
  const Matrix Hfd = volumetric_hess_fd(reg, Vector::Zero(2), 1e-5);
  CHECK(oracle::rel_err(H, Hfd) < 1e-6);
}

TEST_CASE("derivatives match finite differences") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> mdist(1, 5), kdist(1, 8);
  for (int t = 0; t < 50; ++t) {
    const int m = mdist(rng), k = kdist(rng);
    CAPTURE(m);
    CAPTURE(k);
    const auto rr = oracle::random_region(rng, m, k);
    const BallRegion reg = oracle::to_ball_region(rr);
    const Vector x = interior_sample(reg, rr, rng);
    auto F = [&](const Vector& z) { return analytic_value(reg, z); };
    auto V = [&](const Vector& z) { return volumetric_value(reg, z); };
    const GradHess gh = analytic_grad_hess(reg, x);
    CHECK(oracle::rel_err(gh.gradient, oracle::fd_gradient(F, x, 1e-6)) <= 1e-5);
    const Matrix hfd =
        oracle::fd_jacobian([&](const Vector& z) { return analytic_grad_hess(reg, z).gradient; }, x, 1e-6);
    CHECK(oracle::rel_err(gh.hessian, hfd) <= 1e-4);
    CHECK(oracle::rel_err(volumetric_grad(reg, x), oracle::fd_gradient(V, x, 1e-6)) <= 1e-4);
    const Matrix vfd =
        oracle::fd_jacobian([&](const Vector& z) { return volumetric_grad(reg, z); }, x, 1e-6);
    CHECK(oracle::rel_err(volumetric_hess(reg, x), vfd) <= 1e-3);
  }
}

TEST_CASE("workspace identities") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 10; ++t) {
    const auto rr = oracle::random_region(rng, 3, 6);
    const BallRegion reg = oracle::to_ball_region(rr);
    const BarrierWorkspace ws(reg, rr.interior);
    CHECK((ws.d.array() > 0.0).all());
    CHECK((ws.sigma.array() > 0.0).all());
    CHECK(ws.sigma.sum() <= 1.5 + 1e-12);  // tr(A H^-1 A^T) <= m/2
    CHECK((ws.H - ws.H.transpose()).norm() == 0.0);
  }
}

TEST_CASE("centers of simple regions") {
  const BallRegion one = region_of({Ball::plain(v2(1.0, -2.0), 3.0)});
  const CenterResult c1 = newton_center(one, CenterKind::Volumetric);
  CHECK(c1.converged);
  CHECK((c1.center - v2(1.0, -2.0)).norm() < 1e-12);
  const CenterResult c1a = newton_center(one, CenterKind::Analytic);
  CHECK((c1a.center - v2(1.0, -2.0)).norm() < 1e-12);

  const BallRegion same = region_of({Ball::plain(v2(0.5, 0.5), 1.0), Ball::plain(v2(0.5, 0.5), 1.0)});
  CHECK((newton_center(same, CenterKind::Volumetric).center - v2(0.5, 0.5)).norm() < 1e-12);
}

TEST_CASE("volumetric center agrees with a grid search") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 3; ++t) {
    const auto rr = oracle::random_region(rng, 2, 2);
    const BallRegion reg = oracle::to_ball_region(rr);
    const CenterResult c = newton_center(reg, CenterKind::Volumetric);
    REQUIRE(c.converged);
    // Box around the lens: intersection of the bounding boxes of both balls.
    double lo[2], hi[2];
    for (int d = 0; d < 2; ++d) {
      lo[d] = std::max(rr.centers[0][d] - std::sqrt(rr.r2[0]), rr.centers[1][d] - std::sqrt(rr.r2[1]));
      hi[d] = std::min(rr.centers[0][d] + std::sqrt(rr.r2[0]), rr.centers[1][d] + std::sqrt(rr.r2[1]));
    }
    const int N = 400;
    const double hx = (hi[0] - lo[0]) / N, hy = (hi[1] - lo[1]) / N;
    double best = kInfinity;
    Vector arg;
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j <= N; ++j) {
        const Vector z = v2(lo[0] + i * hx, lo[1] + j * hy);
        const double v = oracle::volumetric_direct(rr.centers, rr.r2, z);
        if (v < best) {
          best = v;
          arg = z;
        }
      }
    CHECK(std::abs(c.center[0] - arg[0]) <= hx);
    CHECK(std::abs(c.center[1] - arg[1]) <= hy);
  }
}

TEST_CASE("rounding property at the analytic center") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 10; ++t) {
    const auto rr = oracle::random_region(rng, 3, 5);
    const BallRegion reg = oracle::to_ball_region(rr);
    const CenterResult c = newton_center(reg, CenterKind::Analytic);
    REQUIRE(c.converged);
    const Matrix H2 = 2.0 * analytic_grad_hess(reg, c.center).hessian;
    const Eigen::LLT<Matrix> llt(H2);
    for (int s = 0; s < 200; ++s) {
      Vector u(3);
      for (auto& e : u) e = normal(rng);
      // x^T H2 x = 1 for x = L^{-T} u/|u|.
      const Vector x = llt.matrixU().solve(u / u.norm());
      CHECK(reg.min_slack(c.center + x) >= -1e-9);
    }
  }
}

TEST_CASE("translation and rotation equivariance") {
  std::mt19937_64 rng(51);
  const auto rr = oracle::random_region(rng, 3, 4);
  const BallRegion reg = oracle::to_ball_region(rr);
  const Vector shift = Vector::Constant(3, 2.5);
  const Matrix Q = oracle::random_orthogonal(rng, 3);
  BallRegion moved, rotated;
  for (std::size_t i = 0; i < rr.centers.size(); ++i) {
    moved.balls.push_back(Ball::plain(rr.centers[i] + shift, rr.r2[i]));
    rotated.balls.push_back(Ball::plain(Q * rr.centers[i], rr.r2[i]));
  }
  for (CenterKind kind : {CenterKind::Analytic, CenterKind::Volumetric}) {
    const Vector c = newton_center(reg, kind).center;
    CHECK((newton_center(moved, kind).center - (c + shift)).norm() < 1e-9);
    CHECK((newton_center(rotated, kind).center - Q * c).norm() < 1e-9);
  }
}

TEST_CASE("Newton convergence") {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 20; ++t) {
    const auto rr = oracle::random_region(rng, 4, 7);
    const BallRegion reg = oracle::to_ball_region(rr);
    const CenterResult c = newton_center(reg, CenterKind::Volumetric, rr.interior);
    REQUIRE(c.converged);
    CHECK(c.final_decrement <= 1e-10);
    std::size_t first_small = c.decrements.size();
    for (std::size_t i = 0; i < c.decrements.size(); ++i)
      if (c.decrements[i] < 0.25) {
        first_small = i;
        break;
      }
    CHECK(c.decrements.size() - first_small <= 9);

    // One Newton step from a point near the center halves the gradient.
    Vector x = c.center;
    for (auto& e : x) e += 1e-3 * std::sqrt(rr.r2[0]) * std::normal_distribution<double>()(rng);
    if (reg.min_slack(x) <= 0.0) continue;
    const Vector g = volumetric_grad(reg, x);
    const Vector step = volumetric_hess(reg, x).ldlt().solve(g);
    CHECK(volumetric_grad(reg, x - step).norm() <= 0.5 * g.norm());
  }
}

TEST_CASE("interior start") {
  const BallRegion reg = region_of({Ball::plain(Vector::Zero(2), 1.0), Ball::plain(v2(1.5, 0.0), 1.0)});
  const Vector s = interior_start(reg, v2(5.0, 5.0));
  CHECK(reg.min_slack(s) > 0.0);
  CHECK(interior_start(reg, v2(0.75, 0.1)) == v2(0.75, 0.1));

  const BallRegion touching =
      region_of({Ball::plain(Vector::Zero(2), 1.0), Ball::plain(v2(2.0, 0.0), 1.0)});
  CHECK_THROWS_AS(newton_center(touching, CenterKind::Volumetric), CenteringError);
}
