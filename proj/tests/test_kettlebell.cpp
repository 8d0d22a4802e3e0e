#include "support.hpp"

#include "bforge/errors.hpp"

#include <doctest.h>

using namespace bforge;
using bforge::testing::load_tree;

namespace {

std::shared_ptr<KettlebellSystem> system_for(const TreeSystem& s) {
  auto sys = std::make_shared<TreeSystem>(s);
  auto m = std::make_shared<MetricAssignment>(assign_shrinking(*sys));
  auto g = std::make_shared<GluedSpace>(glue(*sys, *m));
  return std::make_shared<KettlebellSystem>(g);
}

// Base classes of M_F plus a few parameters on each peripheral arc.
std::vector<KPoint> sample_points(const KettlebellSystem& ks, const std::set<std::string>& F) {
  auto k = build_kettlebell(ks, F);
  std::vector<KPoint> out;
  for (auto c : k.base) out.push_back(KPoint::base(c));
  for (const auto& a : k.arcs)
    for (int i = 1; i <= 3; ++i) out.push_back(KPoint{true, 0, a.edge, a.length * i / 4});
  return out;
}

}  // namespace

TEST_CASE("kettlebell metric") {
  auto ks = system_for(truncate(load_tree("small_star.json"), 0));
  const auto& g = ks->glued();
  auto k = build_kettlebell(*ks, {"v0"});
  REQUIRE(k.arcs.size() == 3);
  for (const auto& a : k.arcs) {
    CHECK(ks->normalize(KPoint{true, 0, a.edge, Rational(0)}) == KPoint::base(a.a));
    CHECK(ks->normalize(KPoint{true, 0, a.edge, a.length}) == KPoint::base(a.b));
    CHECK(ks->distance(KPoint{true, 0, a.edge, Rational(0)}, KPoint::base(a.a)) == 0);
    CHECK(ks->distance(KPoint{true, 0, a.edge, a.length}, KPoint::base(a.b)) == 0);
    KPoint mid{true, 0, a.edge, a.length / 2};
    CHECK(ks->distance(mid, KPoint::base(a.a)) == a.length / 2);
    for (auto x : k.base) {
      Rational t = a.length / 3;
      Rational want = std::min<Rational>(t + g.dist[a.a][x], a.length - t + g.dist[a.b][x]);
      CHECK(ks->distance(KPoint{true, 0, a.edge, t}, KPoint::base(x)) == want);
    }
  }
  for (auto x : k.base)
    for (auto y : k.base) CHECK(ks->distance(KPoint::base(x), KPoint::base(y)) == g.dist[x][y]);
  CHECK_THROWS_AS(ks->normalize(KPoint{true, 0, k.arcs[0].edge, k.arcs[0].length + 1}),
                  ArgumentError);
}

TEST_CASE("bond basics") {
  auto ks = system_for(load_tree("three_level.json"));
  auto F = ks->ball(0), F1 = ks->ball(1);
  for (const auto& p : sample_points(*ks, F)) CHECK(ks->bond(F, F, p) == ks->normalize(p));
  CHECK_THROWS_AS(ks->bond(F, F1, KPoint::base(0)), ArgumentError);
  // the glued pair itself lands on the arc endpoints
  for (const auto& a : build_kettlebell(*ks, F).arcs) {
    CHECK(ks->bond(F1, F, KPoint::base(a.a)) == KPoint::base(a.a));
    CHECK(ks->bond(F1, F, KPoint::base(a.b)) == KPoint::base(a.b));
  }
}

TEST_CASE("gamma one branch away is the Urysohn value") {
  auto ks = system_for(load_tree("three_level.json"));
  const auto& g = ks->glued();
  auto F = ks->ball(0);
  auto k = build_kettlebell(*ks, F);
  std::size_t checked = 0;
  for (const auto& a : k.arcs) {
    const auto& w = a.edge.second;
    for (const auto& v : g.system->neighbors(w)) {
      if (v == "v0") continue;
      for (auto x : g.vertex_classes(v)) {
        auto got = ks->gamma(F, x);
        Rational da = g.dist[x][a.a], db = g.dist[x][a.b];
        KPoint want{true, 0, a.edge, a.length * da / (da + db)};
        CHECK(got == ks->normalize(want));
        ++checked;
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("gamma on M_F and refusals") {
  auto ks = system_for(load_tree("three_level.json"));
  auto F = ks->ball(1);
  auto k = build_kettlebell(*ks, F);
  for (auto x : k.base) CHECK(ks->gamma(F, x) == KPoint::base(x));
  // injective on a common member
  auto big = ks->ball(2);
  auto kb = build_kettlebell(*ks, big);
  for (std::size_t i = 0; i < kb.base.size(); ++i)
    for (std::size_t j = i + 1; j < kb.base.size(); ++j)
      CHECK(ks->gamma(big, kb.base[i]) != ks->gamma(big, kb.base[j]));
  // a point three levels down is not in T_1
  std::size_t deep = ks->glued().vertex_classes("v0/w0/v/w0/v/w0/v").back();
  CHECK_THROWS_AS(ks->gamma(F, deep, ks->ball(1)), DepthError);
}

TEST_CASE("bonds compose and are 1-Lipschitz over the filtration") {
  for (const char* name : {"three_level.json", "chain5.json", "abc_theta.json"}) {
    CAPTURE(name);
    auto ks = system_for(truncate(load_tree(name), 2));
    auto fil = filtration(*ks, 2);
    REQUIRE(fil.size() == 5);
    for (std::size_t c = 0; c < fil.size(); ++c) {
      auto pts = sample_points(*ks, fil[c]);
      for (std::size_t b = 0; b <= c; ++b) {
        std::vector<KPoint> img;
        for (const auto& p : pts) {
          auto direct = ks->bond(fil[c], fil[b], p);
          CHECK(direct == ks->bond(fil[c], fil[b], p, ChainOrder::ReverseLexicographic));
          for (std::size_t a = 0; a <= b; ++a)
            CHECK(ks->bond(fil[c], fil[a], p) == ks->bond(fil[b], fil[a], direct));
          img.push_back(direct);
        }
        for (std::size_t i = 0; i < pts.size(); i += 3)
          for (std::size_t j = 0; j < pts.size(); j += 2)
            CHECK(ks->distance(img[i], img[j]) <= ks->distance(pts[i], pts[j]));
      }
    }
  }
}

TEST_CASE("boundary_gamma") {
  SUBCASE("three-level rays") {
    auto ks = system_for(load_tree("three_level.json"));
    auto F = ks->ball(0);
    auto ray = tree_path(ks->glued().system->tree, "v0", "v0/w2/v/w1/v/w0/v");
    auto A = ks->boundary_gamma(F, ray, 3);
    REQUIRE(A.size() == 3);
    auto first = ks->arc({"v0", "v0/w2"});
    CHECK(A[0] == ArcInterval{first.edge, Rational(0), first.length});
    for (int n = 1; n <= 3; ++n) {
      CHECK(A[n - 1].arc == first.edge);
      CHECK(A[n - 1].length() <= pow2(-n + 1));
      if (n > 1) {
        CHECK(A[n - 1].lo >= A[n - 2].lo);
        CHECK(A[n - 1].hi <= A[n - 2].hi);
      }
    }
    CHECK_THROWS_AS(ks->boundary_gamma(F, ray, 4), DepthError);
  }
  SUBCASE("template ends") {
    auto t = load_tree("k4_template.json");
    auto ends = enumerate_ends(t, 1);
    const EndDescriptor* red = nullptr;
    const EndDescriptor* nonred = nullptr;
    for (const auto& e : ends) {
      if (!red && e.kind == EndDescriptor::Kind::Redundant) red = &e;
      if (!nonred && e.kind == EndDescriptor::Kind::NonRedundant) nonred = &e;
    }
    REQUIRE(red);
    REQUIRE(nonred);
    auto sys = unfold_template(*t.templ, 1, "v0");
    EndDescriptor e = *nonred;
    e.ray = extend_along(sys, *nonred, 3);
    auto ks = system_for(sys);
    auto F = ks->ball(0);
    auto A = ks->boundary_gamma(F, e, 2);
    auto L = ks->arc(A[0].arc).length;
    CHECK(A[1].lo > A[0].lo);
    CHECK(A[1].hi < A[0].hi);
    CHECK(A[0].hi == L);
    CHECK_THROWS_AS(ks->boundary_gamma(F, *red, 1), ArgumentError);
  }
}

TEST_CASE("compare_limits on small depths") {
  for (const char* name : {"three_level.json", "abc_theta.json"}) {
    CAPTURE(name);
    auto s = load_tree(name);
    auto samples = default_samples(s, 2, 12, 4);
    auto r = compare_limits(s, 2, samples);
    CHECK(r.failures.empty());
    CHECK(r.checks["thread_consistency"] > 0);
    CHECK(r.checks["eventually_constant"] == samples.base.size());
    for (std::size_t n = 1; n <= r.max_interval_length_per_n.size(); ++n)
      CHECK(r.max_interval_length_per_n[n - 1] <= pow2(-static_cast<int>(n) + 1));
  }
}
