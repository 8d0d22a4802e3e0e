#include "support.hpp"

#include "bforge/errors.hpp"

#include <doctest.h>

using namespace bforge;
using bforge::testing::class_oracle;
using bforge::testing::load_tree;

namespace {

std::shared_ptr<const GluedSpace> glued(const TreeSystem& s) {
  auto sys = std::make_shared<TreeSystem>(s);
  auto m = assign_shrinking(*sys);
  return std::make_shared<GluedSpace>(glue(*sys, m));
}

}  // namespace

TEST_CASE("glue matches brute-force chains on small systems") {
  for (const char* name : {"path2.json", "small_star.json", "chain5.json"}) {
    CAPTURE(name);
    auto g = glued(load_tree(name));
    REQUIRE(g->system->tree.w_nodes.size() <= 6);
    for (std::size_t a = 0; a < g->size(); ++a)
      for (std::size_t b = 0; b < g->size(); ++b) CHECK(g->dist[a][b] == class_oracle(*g, a, b));
    CHECK(isometry_violations(*g).empty());
    CHECK(validate_metric(make_space(std::vector<std::string>(g->size(), ""), g->dist))
              .violations.empty());
  }
}

TEST_CASE("glue on two spaces sharing a pair") {
  auto g = glued(load_tree("path2.json"));
  const auto& m = *g->metrics;
  const auto& d0 = m.spaces.at("v0");
  const auto& d1 = m.spaces.at("v1");
  // v0's {a,b} is glued to v1's {c,d}
  auto x = g->cls("v0", "c"), y = g->cls("v1", "a");
  Rational via_a = d0.d(d0.index("c"), d0.index("a")) + d1.d(d1.index("c"), d1.index("a"));
  Rational via_b = d0.d(d0.index("c"), d0.index("b")) + d1.d(d1.index("d"), d1.index("a"));
  CHECK(g->dist[x][y] == std::min(via_a, via_b));
  CHECK(g->cls("v0", "a") == g->cls("w0", "p"));
  CHECK(g->cls("v0", "a") == g->cls("v1", "c"));
  CHECK(g->dist[g->cls("v0", "b")][g->cls("v1", "d")] == 0);
}

TEST_CASE("glue rejects incompatible metrics") {
  auto s = load_tree("path2.json");
  auto m = assign_shrinking(s);
  m.spaces.at("w0").dist[0][1] += 1;
  m.spaces.at("w0").dist[1][0] += 1;
  CHECK_THROWS_AS(glue(s, m), ArgumentError);
}

TEST_CASE("shrinking bound on the three-level instance") {
  auto g = glued(load_tree("three_level.json"));
  CHECK(shrinking_violations(*g).empty());
  auto dist = tree_distances(g->system->tree, "v0");
  for (const auto& v : g->system->tree.v_nodes) {
    Rational diam(0);
    for (auto a : g->vertex_classes(v))
      for (auto b : g->vertex_classes(v))
        if (g->dist[a][b] > diam) diam = g->dist[a][b];
    CHECK(diam <= pow2(-dist.at(v) / 2));
  }
}

TEST_CASE("end classification") {
  auto s = load_tree("k4_template.json");
  const auto& t = *s.templ;
  std::string witness;
  // e1 then e3 both use point a, so the first point persists
  CHECK(classify_period(t, "P", {{"e1", "e3"}, {"e3", "e1"}}, &witness) ==
        EndDescriptor::Kind::Redundant);
  CHECK(witness == "P.p");
  // e1 = {a,b} and e2 = {c,d} are disjoint
  CHECK(classify_period(t, "P", {{"e1", "e2"}}) == EndDescriptor::Kind::NonRedundant);

  auto plain = enumerate_ends(load_tree("three_level.json"), 2);
  CHECK(plain.size() == 12);
  for (const auto& e : plain) CHECK(e.kind == EndDescriptor::Kind::Undecided);
}

TEST_CASE("end classification is stable when the depth doubles") {
  auto s = load_tree("abc_theta.json");
  const int k = 1;
  auto shallow = enumerate_ends(s, k);
  auto deep_sys = unfold_template(*s.templ, 2 * k, "v0");
  auto deep = enumerate_ends(deep_sys, 2 * k);
  std::map<std::pair<std::vector<std::string>, std::vector<TemplateStep>>, EndDescriptor::Kind> by;
  for (const auto& e : deep) by[{e.ray, e.period}] = e.kind;
  REQUIRE(!shallow.empty());
  for (const auto& e : shallow) {
    auto ray = e.ray;
    for (const auto& x : continue_ray(deep_sys, e, k)) ray.push_back(x);
    auto p = e.period;
    std::rotate(p.begin(), p.begin() + (k % p.size()), p.end());
    auto it = by.find({ray, p});
    REQUIRE(it != by.end());
    CHECK(it->second == e.kind);
  }
}

TEST_CASE("approximate_completion") {
  auto s = load_tree("three_level.json");
  auto g = glued(s);
  SUBCASE("eps at the threshold is refused") {
    CHECK(minimal_completion_eps(3) == Rational(1, 2));
    CHECK_THROWS_AS(approximate_completion(g, 3, Rational(1, 2)), DepthError);
  }
  SUBCASE("net covers classes and ends") {
    Rational eps(3, 4);
    auto c = approximate_completion(g, 3, eps);
    CHECK(c.error_bound == Rational(1, 4));
    CHECK(c.end_error_bound == Rational(1, 2));
    for (std::size_t x = 0; x < g->size(); ++x) {
      bool hit = false;
      for (auto y : c.net) hit = hit || g->dist[x][y] <= eps;
      CHECK(hit);
    }
    for (std::size_t j = 0; j < c.group_frontier.size(); ++j) {
      bool hit = false;
      for (auto y : c.net) hit = hit || c.dist_to_ends[y][j] + c.error_bound <= eps;
      CHECK(hit);
    }
  }
  SUBCASE("template ends: none redundant, lower bounds sound") {
    auto t = load_tree("k4_template.json");
    auto gt = glued(t);
    auto c = approximate_completion(gt, 3, Rational(1));
    REQUIRE(!c.end_points.empty());
    for (const auto& e : c.end_points) CHECK(e.kind != EndDescriptor::Kind::Redundant);
    // groups whose rays pass through glued W-pairs get no positive bound
    std::size_t positive = 0;
    for (std::size_t i = 0; i < c.group_frontier.size(); ++i)
      for (std::size_t j = 0; j < c.group_frontier.size(); ++j) {
        if (i == j) continue;
        positive += c.end_lower_bound[i][j] > 0;
        CHECK(c.end_lower_bound[i][j] <= c.end_distance[i][j] + c.end_error_bound);
      }
    CHECK(positive > 0);
  }
}

TEST_CASE("end distances move by at most the tail bound") {
  auto t = load_tree("k4_template.json");
  const int k = 2;
  auto gk = glued(unfold_template(*t.templ, k, "v0"));
  auto sys1 = unfold_template(*t.templ, k + 1, "v0");
  auto gk1 = glued(sys1);
  auto ck = approximate_completion(gk, k, Rational(2));
  auto ck1 = approximate_completion(gk1, k + 1, Rational(2));
  std::map<std::string, std::size_t> group1;
  for (std::size_t j = 0; j < ck1.group_frontier.size(); ++j) group1[ck1.group_frontier[j]] = j;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < ck.end_points.size(); i += 7) {
    const auto& e = ck.end_points[i];
    auto next = continue_ray(sys1, e, 1);
    std::size_t j0 = ck.end_group[i], j1 = group1.at(next.back());
    for (std::size_t x = 0; x < gk->size(); ++x) {
      auto x1 = gk1->find(gk->classes[x].name);
      CHECK(abs_diff(ck.dist_to_ends[x][j0], ck1.dist_to_ends[x1][j1]) <= pow2(-k + 1));
      CHECK(gk1->dist[x1][gk1->find(gk->classes[0].name)] == gk->dist[x][0]);
    }
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("split_at_pair") {
  SUBCASE("valence-2 pair on a path") {
    auto g = glued(load_tree("chain5.json"));
    for (const auto& w : g->system->tree.w_nodes) {
      CHECK(split_at_pair(*g, w).components.size() == 2);
      CHECK(split_side_violations(*g, w).empty());
    }
  }
  SUBCASE("three-level instance against tree sides") {
    auto s = load_tree("three_level.json");
    auto g = glued(s);
    for (const auto& w : s.tree.w_nodes) {
      CAPTURE(w);
      CHECK(split_at_pair(*g, w).components.size() == s.neighbors(w).size());
      CHECK(split_side_violations(*g, w).empty());
    }
    // the count does not change with depth for pairs interior at depth 2
    auto g2 = glued(truncate(s, 2));
    for (const auto& w : g2->system->tree.w_nodes) {
      if (g2->system->tree.frontier.count(w)) {
        CHECK_THROWS_AS(split_at_pair(*g2, w), DepthError);
        continue;
      }
      CHECK(split_at_pair(*g2, w).components.size() == split_at_pair(*g, w).components.size());
    }
  }
  SUBCASE("ends follow their side") {
    auto g = glued(load_tree("k4_template.json"));
    auto c = approximate_completion(g, 3, Rational(1));
    const auto& w = c.end_points.front().ray[1];
    auto r = split_at_pair(c, w);
    std::size_t total = 0;
    for (const auto& comp : r.end_components) total += comp.size();
    CHECK(total == c.end_points.size());
    CHECK(r.components.size() == g->system->neighbors(w).size());
  }
  SUBCASE("non-W argument") {
    auto g = glued(load_tree("path2.json"));
    CHECK_THROWS_AS(split_at_pair(*g, "v0"), ArgumentError);
  }
}
