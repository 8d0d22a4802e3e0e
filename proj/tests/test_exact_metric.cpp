#include "support.hpp"

#include "bforge/errors.hpp"

#include <doctest.h>

using namespace bforge;
using bforge::testing::random_collection;
using bforge::testing::random_metric;

namespace {

Rational q(const char* s) { return parse_rational(s); }

FiniteMetricSpace path_metric(std::size_t n) {
  std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n));
  std::vector<std::string> pts;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back(std::string(1, static_cast<char>('a' + i)));
    for (std::size_t j = 0; j < n; ++j) d[i][j] = i > j ? i - j : j - i;
  }
  return make_space(pts, d);
}

bool triangle_ok(const FiniteMetricSpace& m) {
  for (std::size_t x = 0; x < m.size(); ++x)
    for (std::size_t y = 0; y < m.size(); ++y)
      for (std::size_t z = 0; z < m.size(); ++z)
        if (m.d(x, z) > m.d(x, y) + m.d(y, z)) return false;
  return true;
}

}  // namespace

TEST_CASE("rationals print with a denominator and reject junk") {
  CHECK(to_string(Rational(3)) == "3/1");
  CHECK(to_string(q("-6/8")) == "-3/4");
  CHECK(q("7") == 7);
  CHECK_THROWS_AS(parse_rational("3/0"), StructuralError);
  CHECK_THROWS_AS(parse_rational("1.5"), StructuralError);
  CHECK_THROWS_AS(parse_rational(""), StructuralError);
  CHECK(pow2(-3) == Rational(1, 8));
  CHECK(pow2(2) == 4);
}

TEST_CASE("validate_metric") {
  SUBCASE("one point") {
    CHECK(validate_metric(make_space({"a"}, {{Rational(0)}})).ok());
  }
  SUBCASE("triangle violation names (a,c,b)") {
    auto m = make_space({"a", "b", "c"}, {{Rational(0), Rational(1), Rational(3)},
                                          {Rational(1), Rational(0), Rational(1)},
                                          {Rational(3), Rational(1), Rational(0)}});
    auto r = validate_metric(m);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].axiom == "triangle");
    CHECK(r.violations[0].witness == std::vector<std::string>{"a", "c", "b"});
  }
  SUBCASE("path metric is a metric") {
    auto m = path_metric(4);
    CHECK(triangle_ok(m));
    CHECK(validate_metric(m).ok());
  }
  SUBCASE("malformed tables are structural, not axiom failures") {
    auto ragged = make_space({"a", "b"}, {{Rational(0), Rational(1)}, {Rational(1)}});
    auto r = validate_metric(ragged);
    CHECK(!r.structural.empty());
    CHECK(r.violations.empty());
    auto neg = make_space({"a", "b"}, {{Rational(0), Rational(-1)}, {Rational(-1), Rational(0)}});
    CHECK(!validate_metric(neg).structural.empty());
  }
  SUBCASE("symmetry, identity and positivity") {
    auto m = make_space({"a", "b"}, {{Rational(1), Rational(0)}, {Rational(2), Rational(0)}});
    auto r = validate_metric(m);
    std::set<std::string> axioms;
    for (const auto& v : r.violations) axioms.insert(v.axiom);
    CHECK(axioms == std::set<std::string>{"identity", "symmetry", "positivity"});
  }
}

TEST_CASE("urysohn_map endpoints and closed form") {
  auto m = make_space({"p", "q", "x"}, {{Rational(0), Rational(2), Rational(1)},
                                        {Rational(2), Rational(0), Rational(2)},
                                        {Rational(1), Rational(2), Rational(0)}});
  auto u = urysohn_map(m, 0, 1);
  CHECK(u[0] == 0);
  CHECK(u[1] == 2);
  CHECK(u[2] == Rational(2, 3));
  CHECK_THROWS_AS(urysohn_map(m, 1, 1), DomainError);
}

TEST_CASE("urysohn_map is 1-Lipschitz on random spaces") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto m = random_metric(rng, 2 + trial % 9);
    std::size_t p = rng() % m.size(), qi = rng() % m.size();
    if (p == qi) qi = (p + 1) % m.size();
    auto u = urysohn_map(m, p, qi);
    for (std::size_t x = 0; x < m.size(); ++x) {
      CHECK(u[x] >= 0);
      CHECK(u[x] <= m.d(p, qi));
      for (std::size_t y = 0; y < m.size(); ++y) CHECK(abs_diff(u[x], u[y]) <= m.d(x, y));
    }
  }
}

TEST_CASE("halver_rescale on a 4-point space") {
  auto m = make_space({"a", "b", "x", "y"},
                      {{q("0"), q("2"), q("1"), q("2")},
                       {q("2"), q("0"), q("2"), q("1")},
                       {q("1"), q("2"), q("0"), q("3/2")},
                       {q("2"), q("1"), q("3/2"), q("0")}});
  REQUIRE(validate_metric(m).ok());
  PairCollection c{{0, 1}, {2, 3}};
  auto h = halver_rescale(m, c, {0, 1}, Rational(1));
  CHECK(h.points == m.points);
  CHECK(validate_metric(h).ok());
  CHECK(triangle_ok(h));
  Rational diam(0);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (h.d(i, j) > diam) diam = h.d(i, j);
  CHECK(diam == 1);
  CHECK(h.d(0, 1) == 1);
  CHECK(h.d(2, 3) <= Rational(1, 2));
  CHECK(null_check(h, c, Rational(1, 2)) == PairCollection{{0, 1}});
}

TEST_CASE("halver_rescale errors") {
  std::mt19937 rng(5);
  auto m = random_metric(rng, 4);
  PairCollection c{{0, 1}, {2, 3}};
  CHECK_THROWS_AS(halver_rescale(m, c, {0, 2}, Rational(1)), ArgumentError);
  CHECK_THROWS_AS(halver_rescale(m, c, {1, 1}, Rational(1)), DomainError);
}

TEST_CASE("halver_rescale properties on random inputs") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    auto m = random_metric(rng, 2 + trial % 9);
    auto c = random_collection(rng, m.size(), 1 + trial % 4);
    REQUIRE(!c.empty());
    Rational K(1 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 3));
    K.canonicalize();
    auto h = halver_rescale(m, c, c[0], K);
    CHECK(validate_metric(h).ok());
    CHECK(diameter(h) == K);
    CHECK(pair_diameter(h, c[0]) == K);
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(pair_diameter(h, c[i]) * 2 <= K);
    CHECK(h == halver_rescale(m, c, c[0], K));
  }
}

TEST_CASE("null_check") {
  auto m = path_metric(4);
  PairCollection c{{0, 1}, {1, 3}};
  CHECK(null_check(m, c, diameter(m)).empty());
  CHECK(null_check(m, {{0, 1}}, Rational(1, 2)) == PairCollection{{0, 1}});
  CHECK(null_check(m, c, Rational(1)) == PairCollection{{1, 3}});
}

TEST_CASE("validate_collection") {
  auto m = path_metric(4);
  CHECK(validate_collection(m, {{0, 1}, {1, 2}}).empty());
  CHECK(validate_collection(m, {{0, 1}, {1, 0}}).size() == 1);
  CHECK(validate_collection(m, {{0, 0}}).size() == 1);
  CHECK(validate_collection(m, {{0, 9}}).size() == 1);
}
