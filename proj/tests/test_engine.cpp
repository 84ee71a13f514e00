#include <doctest.h>

#include <cmath>

#include "geopol/bench.hpp"
#include "geopol/geometric.hpp"
#include "geopol/methods.hpp"
#include "geopol/problems.hpp"

using namespace geopol;

namespace {

Objective square_1d() {
  return Objective(1, [](const Vector& x, Vector& g) {
    g.resize(1);
    g[0] = 2.0 * x[0];
    return x[0] * x[0];
  });
}

Objective half_square(std::size_t n) {
  return Objective(n, [](const Vector& x, Vector& g) {
    g = x;
    return 0.5 * x.squaredNorm();
  });
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) out[i++] = e;
  return out;
}

// Answers a point slightly worse than the query.
class LiarPolitician final : public Politician {
 public:
  std::string name() const override { return "liar"; }
  Answer answer(const Vector& x, const History&, Oracle& oracle) override {
    Answer a;
    a.query_value = oracle.probe_value(x);
    a.record = oracle.answer(x + Vector::Constant(x.size(), 0.5));
    return a;
  }
};

}  // namespace

TEST_CASE("oracle politician answers at the query") {
  Objective f = square_1d();
  Oracle oracle(f);
  History h;
  const FirstOrderRecord r = oracle_politician(vec({3.0}), h, oracle);
  CHECK(r.point[0] == 3.0);
  CHECK(r.value == 9.0);
  CHECK(r.gradient[0] == 6.0);

  Objective g = half_square(3);
  Oracle o2(g);
  const FirstOrderRecord z = oracle_politician(Vector::Zero(3), h, o2);
  CHECK(z.value == 0.0);
  CHECK(z.gradient.isZero(0.0));

  QuadraticProblem q;
  q.D = vec({0.5});
  q.c = vec({1.0});
  Objective qo = q.objective();
  Oracle o3(qo);
  const FirstOrderRecord w = oracle_politician(vec({2.0}), h, o3);
  CHECK(w.value == 0.5);
  CHECK(w.gradient[0] == 1.0);
}

TEST_CASE("non-finite evaluation carries the point") {
  Objective bad(2, [](const Vector& x, Vector& g) {
    g = x;
    return x[0] > 1.0 ? NAN : 0.0;
  });
  Oracle oracle(bad);
  try {
    oracle.answer(vec({2.0, 5.0}));
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(e.point()[0] == 2.0);
    CHECK(e.point()[1] == 5.0);
  }
}

TEST_CASE("one exact steepest-descent step on x^2/2") {
  Objective f = half_square(1);
  SteepestDescent sd;
  OraclePolitician oracle;
  RunOptions opt;
  opt.budget = 1;
  opt.final_query = true;
  const RunTrace t = run(sd, oracle, f, vec({1.0}), opt);
  REQUIRE(t.steps.size() == 1);
  CHECK(t.steps[0].answer[0] == 1.0);
  REQUIRE(t.next_query);
  CHECK(std::abs((*t.next_query)[0]) < 1e-15);
}

TEST_CASE("empty method with the oracle never moves") {
  QuadraticProblem q = QuadraticProblem::random(5, 3);
  Objective f = q.objective();
  EmptyMethod m;
  OraclePolitician p;
  RunOptions opt;
  opt.budget = 5;
  opt.stall_window = 100;
  const Vector x0 = Vector::LinSpaced(5, -1.0, 1.0);
  const RunTrace t = run(m, p, f, x0, opt);
  REQUIRE(t.steps.size() == 5);
  for (const auto& s : t.steps) {
    CHECK(s.answer == s.query);
    CHECK(s.answer == x0);
  }
}

TEST_CASE("BFGS+ solves a 10-dimensional quadratic in n+1 gradients") {
  QuadraticProblem q = QuadraticProblem::random(10, 7);
  Objective f = q.objective();
  const Vector x0 = Vector::Zero(10);
  // f* from the normal equations 2D(x - c) = 0.
  const Vector xstar = (2.0 * q.D).asDiagonal().inverse() * (2.0 * q.D.asDiagonal() * q.c);
  const double fstar = q.D.dot((xstar - q.c).cwiseAbs2());

  Bfgs bfgs;
  GeometricPolitician geo;
  RunOptions opt;
  opt.budget = 10;
  opt.final_query = true;
  const RunTrace t = run(bfgs, geo, f, x0, opt);
  REQUIRE(t.next_query);
  Vector g;
  CHECK(q.eval(*t.next_query, g) - fstar <= 1e-10);

  opt.budget = 11;
  const RunTrace t2 = run(bfgs, geo, f, x0, opt);
  CHECK(t2.steps.back().value - fstar <= 1e-10);
}

TEST_CASE("contract violation names politician and iteration") {
  Objective f = half_square(2);
  SteepestDescent sd;
  LiarPolitician liar;
  RunOptions opt;
  opt.budget = 3;
  try {
    run(sd, liar, f, vec({1.0, 1.0}), opt);
    FAIL("expected ContractViolation");
  } catch (const ContractViolation& e) {
    CHECK(e.politician() == "liar");
    CHECK(e.iteration() == 1);
  }
}

TEST_CASE("run preconditions") {
  Objective f = half_square(2);
  SteepestDescent sd;
  OraclePolitician p;
  RunOptions opt;
  opt.budget = 0;
  CHECK_THROWS_AS(run(sd, p, f, vec({1.0, 1.0}), opt), Error);
  opt.budget = 3;
  CHECK_THROWS_AS(run(sd, p, f, vec({NAN, 1.0}), opt), Error);
  CHECK_THROWS_AS(run(sd, p, f, vec({1.0}), opt), Error);
}

TEST_CASE("stopping rules") {
  SUBCASE("exact stationarity") {
    Objective f = half_square(2);
    SteepestDescent sd;
    OraclePolitician p;
    const RunTrace t = run(sd, p, f, Vector::Zero(2), RunOptions{});
    CHECK(t.reason == StopReason::Stationary);
    CHECK(t.steps.size() == 1);
  }
  SUBCASE("gradient tolerance") {
    QuadraticProblem q = QuadraticProblem::random(6, 1, 10.0);
    Objective f = q.objective();
    SteepestDescent sd;
    OraclePolitician p;
    RunOptions opt;
    opt.budget = 1000;
    opt.tol = 1e-6;
    const RunTrace t = run(sd, p, f, Vector::Zero(6), opt);
    CHECK(t.reason == StopReason::GradientTolerance);
    CHECK(t.steps.back().grad_norm <= 1e-6);
    for (std::size_t i = 0; i + 1 < t.steps.size(); ++i) CHECK(t.steps[i].grad_norm > 1e-6);
  }
  SUBCASE("stall") {
    Objective f(1, [](const Vector& x, Vector& g) {
      g.resize(1);
      g[0] = 1.0;
      return 0.0 * x[0];
    });
    EmptyMethod m;
    OraclePolitician p;
    RunOptions opt;
    opt.budget = 50;
    const RunTrace t = run(m, p, f, vec({0.0}), opt);
    CHECK(t.reason == StopReason::Stalled);
    CHECK(t.steps.size() == 1 + opt.stall_window);
  }
  SUBCASE("budget") {
    QuadraticProblem q = QuadraticProblem::random(30, 2, 100.0);
    Objective f = q.objective();
    SteepestDescent sd;
    OraclePolitician p;
    RunOptions opt;
    opt.budget = 7;
    const RunTrace t = run(sd, p, f, Vector::Zero(30), opt);
    CHECK(t.reason == StopReason::Budget);
    CHECK(t.steps.size() == 7);
  }
}

TEST_CASE("one gradient per answer, monotone counters, determinism") {
  for (const std::string name : {"sd", "sd+", "cg", "gk+", "bfgs+", "empty+"}) {
    CAPTURE(name);
    QuadraticProblem q = QuadraticProblem::random(12, 5, 50.0);
    Objective f = q.objective();
    const MethodSpec spec = parse_method(name);
    RunOptions opt;
    opt.budget = 15;
    auto m1 = make_method(spec);
    auto p1 = make_politician(spec);
    const RunTrace a = run(*m1, *p1, f, Vector::Zero(12), opt);
    auto m2 = make_method(spec);
    auto p2 = make_politician(spec);
    const RunTrace b = run(*m2, *p2, f, Vector::Zero(12), opt);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      CHECK(a.steps[i].grad_evals == i + 1);
      CHECK(a.steps[i].value == b.steps[i].value);
      CHECK(a.steps[i].answer == b.steps[i].answer);
      CHECK(a.steps[i].query == b.steps[i].query);
      CHECK(a.steps[i].value <=
            a.steps[i].query_value + 1e-12 * (1.0 + std::abs(a.steps[i].query_value)));
      if (i > 0) CHECK(a.steps[i].value_evals >= a.steps[i - 1].value_evals);
    }
  }
}

TEST_CASE("the oracle politician reproduces steepest descent bit for bit") {
  QuadraticProblem q = QuadraticProblem::random(8, 11, 20.0);
  Objective f = q.objective();
  SteepestDescent sd;
  OraclePolitician p;
  RunOptions opt;
  opt.budget = 12;
  opt.tol = 0.0;
  const RunTrace t = run(sd, p, f, Vector::Zero(8), opt);

  // Direct loop without the framework.
  Oracle oracle(f);
  Vector x = Vector::Zero(8);
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    FirstOrderRecord r = oracle.answer(x);
    CHECK(t.steps[k].answer == r.point);
    CHECK(t.steps[k].value == r.value);
    x = line_search_along(oracle, r.point, -r.gradient).point;
  }
}
