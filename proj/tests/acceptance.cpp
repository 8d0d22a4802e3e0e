// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: bforge_acceptance [criterion...]

#include "support.hpp"

#include "bforge/errors.hpp"
#include "bforge/parallel.hpp"
#include "bforge_cli/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace bforge;
using namespace bforge::testing;

namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void fail(std::string msg) {
    pass = false;
    if (failures.size() < 10) failures.push_back(std::move(msg));
  }
};

std::string join(const std::vector<std::size_t>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

std::shared_ptr<const GluedSpace> glued(const TreeSystem& s) {
  auto sys = std::make_shared<TreeSystem>(s);
  auto m = assign_shrinking(*sys);
  return std::make_shared<GluedSpace>(glue(*sys, m));
}

Rational glued_diameter(const GluedSpace& g, const std::string& v) {
  Rational d(0);
  for (auto a : g.vertex_classes(v))
    for (auto b : g.vertex_classes(v))
      if (g.dist[a][b] > d) d = g.dist[a][b];
  return d;
}

Verdict urysohn_suite() {
  Verdict r;
  std::mt19937 rng(1);
  std::size_t pairs = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + rng() % 9;
    auto m = random_metric(rng, n);
    std::size_t p = rng() % n, q = (p + 1 + rng() % (n - 1)) % n;
    auto u = urysohn_map(m, p, q);
    if (u[p] != 0 || u[q] != m.d(p, q)) r.fail("trial " + std::to_string(trial) + ": endpoint values");
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) {
        ++pairs;
        if (abs_diff(u[x], u[y]) > m.d(x, y))
          r.fail("trial " + std::to_string(trial) + ": |u(" + m.points[x] + ")-u(" + m.points[y] +
                 ")| > d");
      }
  }
  r.detail = "200 spaces, " + std::to_string(pairs) + " pairs";
  return r;
}

Verdict halving_suite() {
  Verdict r;
  std::mt19937 rng(2);
  std::size_t pairs = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 3 + rng() % 8;
    auto m = random_metric(rng, n);
    auto c = random_collection(rng, n, 1 + rng() % 5);
    Rational K(1 + static_cast<long>(rng() % 5), 1 + static_cast<long>(rng() % 3));
    K.canonicalize();
    const auto anchor = c.front();
    auto out = halver_rescale(m, c, anchor, K);
    std::string tag = "trial " + std::to_string(trial) + ": ";
    if (!validate_metric(out).ok()) r.fail(tag + "output is not a metric");
    if (diameter(out) != K) r.fail(tag + "diameter " + to_string(diameter(out)));
    if (out.d(anchor.first, anchor.second) != K) r.fail(tag + "anchor distance");
    for (std::size_t i = 1; i < c.size(); ++i) {
      ++pairs;
      if (same_pair(c[i], anchor)) continue;
      if (pair_diameter(out, c[i]) > K / 2) r.fail(tag + "pair " + std::to_string(i) + " above K/2");
    }
  }
  r.detail = "200 inputs, " + std::to_string(pairs) + " non-anchor pairs";
  return r;
}

Verdict quotient_oracle() {
  Verdict r;
  std::vector<std::string> used;
  std::size_t compared = 0;
  for (const auto& name : tree_instances()) {
    auto s = load_tree(name);
    if (s.templ || s.tree.w_nodes.size() > 6) continue;
    used.push_back(name);
    auto g = glued(s);
    for (std::size_t a = 0; a < g->size(); ++a)
      for (std::size_t b = 0; b < g->size(); ++b) {
        ++compared;
        if (g->dist[a][b] != class_oracle(*g, a, b))
          r.fail(name + ": " + g->classes[a].name + " to " + g->classes[b].name);
      }
  }
  r.detail = std::to_string(used.size()) + " systems, " + std::to_string(compared) + " class pairs";
  return r;
}

Verdict shrinking_bound() {
  Verdict r;
  auto g = glued(load_tree("three_level.json"));
  auto dist = tree_distances(g->system->tree, "v0");
  std::size_t checked = 0;
  for (const auto& v : g->system->tree.v_nodes) {
    int k = dist.at(v) / 2;
    ++checked;
    auto d = glued_diameter(*g, v);
    if (d > pow2(-k)) r.fail(v + ": diameter " + to_string(d) + " > 2^-" + std::to_string(k));
  }
  r.detail = std::to_string(checked) + " V-nodes";
  return r;
}

// Base classes of M_F and enough arc parameters for at least `want` points.
std::vector<KPoint> sample_points(const KettlebellSystem& ks, const std::set<std::string>& F,
                                  std::size_t want) {
  auto k = build_kettlebell(ks, F);
  std::vector<KPoint> out;
  for (auto c : k.base) out.push_back(KPoint::base(c));
  if (k.arcs.empty()) return out;
  std::size_t per = 3;
  if (want > out.size()) per = std::max<std::size_t>(per, (want - out.size()) / k.arcs.size() + 1);
  for (const auto& a : k.arcs)
    for (std::size_t i = 1; i <= per; ++i)
      out.push_back(KPoint{true, 0, a.edge, a.length * Rational(i) / Rational(per + 1)});
  return out;
}

Verdict bonding_suite() {
  Verdict r;
  std::size_t triples = 0, points = 0, compositions = 0, lipschitz = 0;
  for (const auto& name : tree_instances()) {
    auto s = truncate(load_tree(name), 2);
    auto sys = std::make_shared<TreeSystem>(s);
    auto m = std::make_shared<MetricAssignment>(assign_shrinking(*sys));
    auto ks = KettlebellSystem(std::make_shared<GluedSpace>(glue(*sys, *m)));
    auto fil = filtration(ks, 2);
    std::size_t here = 0;
    for (std::size_t c = 0; c < fil.size(); ++c) {
      auto pts = sample_points(ks, fil[c], 100);
      here += pts.size();
      for (std::size_t b = 0; b <= c; ++b) {
        std::vector<KPoint> img;
        for (const auto& p : pts) img.push_back(ks.bond(fil[c], fil[b], p));
        for (std::size_t i = 0; i < pts.size(); ++i)
          for (std::size_t j = i + 1; j < pts.size(); ++j) {
            ++lipschitz;
            if (ks.distance(img[i], img[j]) > ks.distance(pts[i], pts[j]))
              r.fail(name + ": bond T" + std::to_string(c) + "->T" + std::to_string(b) +
                     " stretches a pair");
          }
        for (std::size_t a = 0; a <= b; ++a) {
          ++triples;
          for (std::size_t i = 0; i < pts.size(); ++i) {
            ++compositions;
            if (ks.bond(fil[c], fil[a], pts[i]) != ks.bond(fil[b], fil[a], img[i]))
              r.fail(name + ": composition fails on F" + std::to_string(a) + " F" +
                     std::to_string(b) + " F" + std::to_string(c));
          }
        }
      }
    }
    if (here < 100) r.fail(name + ": only " + std::to_string(here) + " sampled points");
    points += here;
  }
  r.detail = std::to_string(triples) + " triples, " + std::to_string(points) + " points, " +
             std::to_string(compositions) + " compositions, " + std::to_string(lipschitz) +
             " Lipschitz pairs";
  return r;
}

Verdict limit_comparison() {
  Verdict r;
  const int k = 4;
  std::string detail;
  for (const char* name : {"three_level.json", "k4_template.json", "abc_theta.json"}) {
    auto s = load_tree(name);
    auto samples = default_samples(s, k, 12, 4);
    auto rep = compare_limits(s, k, samples);
    for (const auto& f : rep.failures) r.fail(std::string(name) + ": " + f);
    for (std::size_t n = 1; n <= rep.max_interval_length_per_n.size(); ++n)
      if (rep.max_interval_length_per_n[n - 1] > pow2(-static_cast<int>(n) + 1))
        r.fail(std::string(name) + ": nested arc too long at n=" + std::to_string(n));
    if (!samples.ends.empty() && rep.checks["end_image_interior"] == 0)
      r.fail(std::string(name) + ": no end image checked");
    if (rep.checks["base_image_is_base"] == 0) r.fail(std::string(name) + ": no base image checked");
    std::size_t total = 0;
    for (const auto& [key, n] : rep.checks) total += n;
    detail += std::string(detail.empty() ? "" : "; ") + name + " " + std::to_string(total) +
              " checks, " + std::to_string(samples.ends.size()) + " ends";
  }
  r.detail = "k=4: " + detail;
  return r;
}

// Circuit counts through the junction of the first interior W next to the
// base, and through its translate.
struct CircuitData {
  std::string w;
  std::vector<std::size_t> counts, translated;
  std::string translation;
};

CircuitData circuits(const SplittingSpec& spec, const FineGraphBall& b, int D, int R, int n) {
  CircuitData out;
  const auto& base = b.tree.tree.base;
  for (const auto& w : b.interior_w)
    if (std::binary_search(b.tree.tree.edges.begin(), b.tree.tree.edges.end(), Edge{base, w})) {
      out.w = w;
      break;
    }
  if (out.w.empty()) return out;
  auto j = b.junction.at(out.w);
  out.counts = circuits_through_edge(b.ball, j[0], j[1], n).count_by_length;
  const auto& orbit = b.tree.orbit.at(out.w);
  Word g;
  for (const auto& [id, wo] : spec.w_orbits)
    if (id != orbit && spec.groups.at(wo.group).order() > 1) {
      g = {{id, 1}};
      break;
    }
  if (g.empty()) return out;
  out.translation = word_name(g);
  auto moved = build_barK(spec, D, R, g);
  const auto& lam = spec.w_orbits.at(orbit).lambda;
  auto p = translate(spec, g, orbit, b.tree.rep.at(out.w), lam[0]);
  auto q = translate(spec, g, orbit, b.tree.rep.at(out.w), lam[1]);
  auto bp = moved.ball_pos[moved.rho[moved.K.index(p.first + "|" + p.second)]];
  auto bq = moved.ball_pos[moved.rho[moved.K.index(q.first + "|" + q.second)]];
  if (bp < moved.ball.size() && bq < moved.ball.size())
    out.translated = circuits_through_edge(moved.ball, bp, bq, n).count_by_length;
  return out;
}

Verdict combination_suite() {
  Verdict r;
  const int D = 4, R = 3, n = 8;
  auto spec = load_splitting("abc_splitting.json");
  auto b = build_barK(spec, D, R);
  const auto& ball = b.ball;
  std::vector<std::string> parts;

  // (a)
  std::size_t sep_bad = 0;
  for (const auto& w : b.interior_w) {
    auto j = b.junction.at(w);
    if (separation_components(ball, {j[0], j[1]}).size() < 2) {
      ++sep_bad;
      r.fail("(a) lambda of " + w + " does not separate");
    }
  }
  parts.push_back("(a) " + std::to_string(b.interior_w.size() - sep_bad) + "/" +
                  std::to_string(b.interior_w.size()) + " separate");

  // (b)
  std::size_t convex = 0, checked = 0;
  for (const auto* list : {&b.tree.tree.v_nodes, &b.tree.tree.w_nodes})
    for (const auto& u : *list) {
      auto img = b.image_of(u);
      if (img.empty()) continue;
      ++checked;
      if (convexity_check(ball, img).convex)
        ++convex;
      else
        r.fail("(b) image of " + u + " is not convex");
    }
  parts.push_back("(b) " + std::to_string(convex) + "/" + std::to_string(checked) + " convex");

  // (c)
  auto f = parabolic_forest(spec, D);
  if (!f.acyclic) r.fail("(c) parabolic forest has a cycle");
  std::set<std::size_t> hit;
  for (const auto& comp : f.components) {
    std::set<std::size_t> cls;
    for (auto x : comp) cls.insert(b.rho[b.K.index(f.forest.names[x])]);
    if (cls.size() != 1 || b.class_members[*cls.begin()].size() != comp.size()) {
      r.fail("(c) component of " + f.forest.names[comp.front()] + " is not a class");
      continue;
    }
    if (b.ball_pos[*cls.begin()] < ball.size() && !hit.insert(*cls.begin()).second)
      r.fail("(c) two components on one class");
  }
  if (hit.size() != ball.size()) r.fail("(c) components in range do not cover the ball");
  parts.push_back("(c) " + std::to_string(hit.size()) + " components on " +
                  std::to_string(ball.size()) + " ball classes");

  // (d)
  auto c4 = circuits(spec, b, D, R, n);
  if (c4.counts.empty()) r.fail("(d) no interior W next to the base");
  if (c4.translated != c4.counts)
    r.fail("(d) counts on the translate by " + c4.translation + " differ: " + join(c4.translated));
  auto c5 = circuits(spec, build_barK(spec, D + 1, R), D + 1, R, n);
  std::vector<std::size_t> unstable;
  for (std::size_t len = 0; len < c4.counts.size() && len < c5.counts.size(); ++len)
    if (c4.counts[len] != c5.counts[len]) unstable.push_back(len);
  if (!unstable.empty())
    r.fail("(d) counts change from D=" + std::to_string(D) + " to D=" + std::to_string(D + 1) +
           " at lengths " + join(unstable) + ": " + join(c4.counts) + " vs " + join(c5.counts));
  parts.push_back("(d) through " + c4.w + " " + join(c4.counts) + ", translate " +
                  join(c4.translated) + ", D=5 " + join(c5.counts));

  for (const auto& p : parts) r.detail += (r.detail.empty() ? "" : "; ") + p;
  return r;
}

Verdict round_trip() {
  Verdict r;
  std::size_t pairs = 0;
  for (const auto& name : tree_instances()) {
    auto g = glued(system_at_depth(load_tree(name), 3));
    auto cg = class_graph(*g);
    auto corr = pair_correspondence(*g);
    std::vector<CutPair> W;
    try {
      W = inseparable_cut_pairs(cg);
    } catch (const ArgumentError& e) {
      r.fail(name + ": " + e.what());
      continue;
    }
    std::set<CutPair> want, got(W.begin(), W.end());
    for (const auto& [w, p] : corr) {
      CutPair c{cg.index(p[0]), cg.index(p[1])};
      if (c[0] > c[1]) std::swap(c[0], c[1]);
      want.insert(c);
    }
    if (got != want)
      r.fail(name + ": " + std::to_string(got.size()) + " inseparable pairs, " +
             std::to_string(want.size()) + " interior W-nodes");
    pairs += got.size();
    if (W.empty()) continue;
    auto dual = dual_tree(cg, W);
    for (const auto& p : dual.problems) r.fail(name + ": " + p);
    auto iso = iso_check(g->system->tree, cg, dual, corr);
    if (!iso.ok) r.fail(name + ": " + iso.mismatch);
  }
  r.detail = std::to_string(tree_instances().size()) + " systems at depth 3, " +
             std::to_string(pairs) + " cut pairs";
  return r;
}

std::map<std::string, std::string> run_outputs(const cli::PipelineConfig& cfg) {
  fs::remove_all(cfg.out_dir);
  std::ostringstream out, err;
  int status = cli::run(cfg, out, err);
  std::map<std::string, std::string> files;
  files["<status>"] = std::to_string(status) + "\n" + out.str() + err.str();
  if (fs::exists(cfg.out_dir))
    for (const auto& e : fs::directory_iterator(cfg.out_dir)) {
      std::ifstream in(e.path(), std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      files[e.path().filename().string()] = ss.str();
    }
  return files;
}

Verdict determinism() {
  Verdict r;
  auto dir = fs::temp_directory_path() / "bforge_acceptance_runs";
  std::size_t compared = 0;
  for (const auto& cmd : cli::commands()) {
    cli::PipelineConfig cfg;
    cfg.command = cmd;
    cfg.instance = data_path(cmd == "combine" ? "abc_splitting.json" : "three_level.json");
    cfg.depth = cmd == "combine" ? 4 : 3;
    cfg.radius = 3;
    if (cmd == "complete") cfg.eps = "3/4";
    for (const char* format : {"json", "dot"}) {
      cfg.format = format;
      std::map<std::string, std::string> first;
      int run = 0;
      for (unsigned threads : {1u, 1u, 4u, 4u}) {
        cfg.threads = threads;
        cfg.out_dir = (dir / std::to_string(run)).string();
        auto files = run_outputs(cfg);
        if (run == 0) {
          first = files;
          if (files.size() < 2) r.fail(cmd + " " + format + ": no output written");
        } else {
          ++compared;
          if (files != first)
            r.fail(cmd + " " + format + ": run " + std::to_string(run) + " (threads " +
                   std::to_string(threads) + ") differs");
        }
        ++run;
      }
    }
  }
  fs::remove_all(dir);
  r.detail = std::to_string(cli::commands().size()) + " commands, 2 formats, " +
             std::to_string(compared) + " repeat runs at 1 and 4 threads";
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, Verdict (*)()>> criteria{
      {"Urysohn maps are 1-Lipschitz", urysohn_suite},
      {"halver rescaling", halving_suite},
      {"glued metric equals the chain oracle", quotient_oracle},
      {"shrinking diameters on the three-level instance", shrinking_bound},
      {"bonding maps compose and are 1-Lipschitz", bonding_suite},
      {"limit comparison at depth 4", limit_comparison},
      {"combination suite, D=4 R=3", combination_suite},
      {"cut pair round trip", round_trip},
      {"determinism across runs and thread counts", determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    set_thread_count(0);
    auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream time;
    time.precision(1);
    time << std::fixed << secs << "s";
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << criteria[i].first
              << " (" << v.detail << (v.detail.empty() ? "" : ", ") << time.str() << ")\n";
    for (const auto& f : v.failures) std::cout << "    " << f << "\n";
    std::cout.flush();
    if (!v.pass) ++failed;
  }
  return failed ? 1 : 0;
}
