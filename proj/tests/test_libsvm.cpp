#include <doctest.h>

#include <random>

#include "geopol/libsvm.hpp"

using namespace geopol;

namespace {

void expect_error(const std::string& text, std::size_t line, std::size_t column) {
  try {
    parse_libsvm_string(text);
    FAIL("expected ParseError for: " << text);
  } catch (const ParseError& e) {
    CHECK(e.line() == line);
    CHECK(e.column() == column);
  }
}

}  // namespace

TEST_CASE("basic lines") {
  const SparseDataset d = parse_libsvm_string("+1 1:0.5 3:-2\n");
  REQUIRE(d.rows.size() == 1);
  CHECK(d.rows[0].label == 1.0);
  REQUIRE(d.rows[0].features.size() == 2);
  CHECK(d.rows[0].features[0] == std::pair<std::size_t, double>{1, 0.5});
  CHECK(d.rows[0].features[1] == std::pair<std::size_t, double>{3, -2.0});
  CHECK(d.dim == 3);

  const SparseDataset e = parse_libsvm_string("-1\n");
  REQUIRE(e.rows.size() == 1);
  CHECK(e.rows[0].label == -1.0);
  CHECK(e.rows[0].features.empty());

  const SparseDataset c = parse_libsvm_string("# header\n\n+1 2:1 # trailing\n-1 1:2\n");
  CHECK(c.rows.size() == 2);
  CHECK(c.dim == 2);
}

TEST_CASE("errors carry line and column") {
  expect_error("1 3:1 2:1\n", 1, 7);
  expect_error("+1 1:1\n-1 0:2\n", 2, 4);
  expect_error("+1 1:1\n\nabc 1:1\n", 3, 1);
  expect_error("+1 1:1\n-1 2\n", 2, 4);
  expect_error("+1 x:1\n", 1, 4);
  expect_error("+1 1:1\n+1 2:zz\n", 2, 6);
}

TEST_CASE("labels are mapped by sign") {
  const SparseDataset d = parse_libsvm_string("2 1:1\n0 1:1\n-1 1:1\n1 1:1\n");
  CHECK(d.rows[0].label == 1.0);
  CHECK(d.rows[1].label == -1.0);
  CHECK(d.rows[2].label == -1.0);
  CHECK(d.rows[3].label == 1.0);
  CHECK_FALSE(d.warnings.empty());
  CHECK(parse_libsvm_string("+1 1:1\n-1 1:1\n").warnings.empty());
}

TEST_CASE("parse, serialize, parse") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin(0.3);
  SparseDataset d;
  for (int i = 0; i < 200; ++i) {
    SparseRow r;
    r.label = coin(rng) ? 1.0 : -1.0;
    for (std::size_t j = 1; j <= 40; ++j)
      if (coin(rng)) r.features.emplace_back(j, normal(rng) * std::pow(10.0, normal(rng) * 5));
    d.rows.push_back(r);
  }
  d.dim = 40;
  const std::string text = serialize_libsvm_string(d);
  const SparseDataset back = parse_libsvm_string(text);
  REQUIRE(back.rows.size() == d.rows.size());
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    CHECK(back.rows[i].label == d.rows[i].label);
    CHECK(back.rows[i].features == d.rows[i].features);
  }
  CHECK(serialize_libsvm_string(back) == text);
}

TEST_CASE("sparse dot product") {
  const SparseDataset d = parse_libsvm_string("+1 1:2 3:-1\n");
  Vector x(3);
  x << 1.0, 5.0, 4.0;
  CHECK(d.rows[0].dot(x) == -2.0);
}
