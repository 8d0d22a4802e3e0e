#include "bforge_cli/pipeline.hpp"

#include "bforge/errors.hpp"
#include "bforge/parallel.hpp"
#include "bforge/serialize.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>

namespace bforge::cli {

namespace {

struct Outcome {
  Json report = Json::object();
  std::vector<std::string> failures;
  std::vector<std::pair<std::string, std::string>> dot;  // (file stem suffix, content)
};

// Refusals: bad input or infeasible parameters, exit status 2.
struct Refusal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const TreeSystem& need_tree(const Instance& inst, const std::string& cmd) {
  if (auto* t = std::get_if<TreeSystem>(&inst)) return *t;
  throw Refusal(cmd + " needs a tree-system instance");
}

const SplittingSpec& need_splitting(const Instance& inst, const std::string& cmd) {
  if (auto* s = std::get_if<SplittingSpec>(&inst)) return *s;
  throw Refusal(cmd + " needs a splitting instance");
}

void append(std::vector<std::string>& to, const std::vector<std::string>& from,
            const std::string& prefix) {
  for (const auto& f : from) to.push_back(prefix + f);
}

struct Glued {
  TreeSystem system;
  MetricAssignment metrics;
  std::shared_ptr<const GluedSpace> glued;
};

Glued glue_at(const TreeSystem& s, int k, Outcome& o) {
  Glued g;
  g.system = system_at_depth(s, k);
  g.metrics = assign_shrinking(g.system);
  for (const auto& [id, m] : g.metrics.spaces)
    if (!validate_metric(m).ok()) o.failures.push_back("metric: assigned metric at " + id + " is invalid");
  append(o.failures, compatibility_violations(g.system, g.metrics), "compatibility: ");
  g.glued = std::make_shared<const GluedSpace>(glue(g.system, g.metrics));
  append(o.failures, shrinking_violations(*g.glued), "shrinking: ");
  return g;
}

Outcome cmd_validate(const std::string& path) {
  Outcome o;
  Instance inst;
  try {
    inst = parse_instance(path);
  } catch (const SystemError& e) {
    o.report["diagnostics"] = to_json(e.diagnostics);
    for (const auto& d : e.diagnostics) o.failures.push_back(d.code + ": " + d.message);
    return o;
  }
  if (auto* t = std::get_if<TreeSystem>(&inst)) {
    o.report["kind"] = "tree_system";
    o.report["v_nodes"] = t->tree.v_nodes.size();
    o.report["w_nodes"] = t->tree.w_nodes.size();
    o.report["frontier"] = t->tree.frontier.size();
    o.report["template"] = t->templ.has_value();
    o.report["diagnostics"] = Json::array();
    o.dot.push_back({"", dot_tree(t->tree, "tree")});
  } else {
    const auto& s = std::get<SplittingSpec>(inst);
    o.report["kind"] = "splitting";
    o.report["v_orbits"] = s.v_orbits.size();
    o.report["w_orbits"] = s.w_orbits.size();
    o.report["installed_necks"] = s.installed_necks;
    o.report["reservoir_diameter"] = reservoir_diameter(s);
    o.report["diagnostics"] = Json::array();
    o.dot.push_back({"", dot_tree(unfold_tree(s, 1).tree, "unfolding")});
  }
  return o;
}

Outcome cmd_shrink(const TreeSystem& s, int k) {
  Outcome o;
  auto g = glue_at(s, k, o);
  o.report["depth"] = k;
  o.report["metrics"] = to_json(g.metrics);
  o.dot.push_back({"", dot_tree(g.system.tree, "truncation")});
  return o;
}

Outcome cmd_glue(const TreeSystem& s, int k) {
  Outcome o;
  auto g = glue_at(s, k, o);
  append(o.failures, isometry_violations(*g.glued), "isometry: ");
  o.report["depth"] = k;
  o.report["glued"] = to_json(*g.glued);
  o.dot.push_back({"", dot_graph(class_graph(*g.glued), "glued")});
  return o;
}

Outcome cmd_complete(const TreeSystem& s, int k, const std::string& eps_text) {
  if (eps_text.empty()) throw Refusal("complete needs --eps P/Q");
  Rational eps;
  try {
    eps = parse_rational(eps_text);
  } catch (const StructuralError& e) {
    throw Refusal(std::string("--eps: ") + e.what());
  }
  if (eps <= minimal_completion_eps(k))
    throw Refusal("eps " + to_string(eps) + " is infeasible at depth " + std::to_string(k) +
                  "; it must exceed " + to_string(minimal_completion_eps(k)));
  Outcome o;
  auto g = glue_at(s, k, o);
  auto c = approximate_completion(g.glued, k, eps);
  // every class is within eps - 2^(-k+1) of the net
  Rational r = eps - c.error_bound;
  for (std::size_t x = 0; x < g.glued->size(); ++x) {
    bool covered = false;
    for (auto y : c.net) covered = covered || g.glued->dist[x][y] <= r;
    if (!covered) o.failures.push_back("net: " + g.glued->classes[x].name + " is not covered");
  }
  o.report = to_json(c);
  const auto& T = g.system.tree;
  auto w = std::find_if(T.w_nodes.begin(), T.w_nodes.end(),
                        [&](const std::string& x) { return !T.frontier.count(x); });
  if (w != T.w_nodes.end())
    o.dot.push_back({"", dot_split(*g.glued, split_at_pair(c, *w), *w)});
  else
    o.dot.push_back({"", dot_graph(class_graph(*g.glued), "completion")});
  return o;
}

Outcome cmd_kettlebell(const TreeSystem& s, int k) {
  Outcome o;
  auto samples = default_samples(s, k, 24, 8);
  auto rep = compare_limits(s, k, samples);
  o.report = to_json(rep);
  o.report["depth"] = k;
  Json ends = Json::array();
  for (const auto& e : samples.ends) ends.push_back(e.id());
  o.report["sampled_ends"] = ends;
  o.report["sampled_points"] = samples.base.size();
  o.failures = rep.failures;
  o.dot.push_back({"", dot_tree(system_at_depth(s, k).tree, "filtration")});
  return o;
}

Outcome cmd_combine(const SplittingSpec& spec, int D, int R) {
  Outcome o;
  FineGraphBall b;
  try {
    b = build_barK(spec, D, R);
  } catch (const DepthError& e) {
    throw Refusal(e.what());
  }
  const auto& ball = b.ball;
  Json rep;
  rep["depth"] = D;
  rep["radius"] = R;
  rep["k_vertices"] = b.K.size();
  rep["classes"] = b.class_names.size();
  rep["ball_vertices"] = ball.size();
  rep["ball_edges"] = ball.edge_count();
  if (b.duplicate_edges) o.failures.push_back("simple: " + std::to_string(b.duplicate_edges) + " duplicate edges in K-bar");

  // separation by interior lambda_w
  Json sep = Json::object();
  for (const auto& w : b.interior_w) {
    auto j = b.junction.at(w);
    auto comps = separation_components(ball, {j[0], j[1]});
    sep[w] = comps.size();
    if (comps.size() < 2) o.failures.push_back("separation: lambda of " + w + " does not separate the ball");
  }
  rep["separation_components"] = sep;

  // convexity of every complete K_u image
  std::size_t convex_checked = 0;
  for (const auto* list : {&b.tree.tree.v_nodes, &b.tree.tree.w_nodes})
    for (const auto& u : *list) {
      auto img = b.image_of(u);
      if (img.empty()) continue;
      ++convex_checked;
      auto c = convexity_check(ball, img);
      if (!c.convex) {
        std::string path;
        for (auto x : c.witness) path += (path.empty() ? "" : " ") + ball.names[x];
        o.failures.push_back("convexity: image of " + u + " is not convex, geodesic " + path);
      }
    }
  rep["convexity_checked"] = convex_checked;

  // parabolic forest against the pipe classes
  auto f = parabolic_forest(spec, D);
  if (!f.acyclic) o.failures.push_back("forest: parabolic forest has a cycle");
  std::size_t meeting = 0;
  for (const auto& comp : f.components) {
    std::set<std::size_t> cls;
    for (auto x : comp) cls.insert(b.rho[b.K.index(f.forest.names[x])]);
    if (cls.size() != 1 || b.class_members[*cls.begin()].size() != comp.size()) {
      o.failures.push_back("forest: component of " + f.forest.names[comp.front()] + " is not one class");
      continue;
    }
    if (b.ball_pos[*cls.begin()] != b.class_names.size()) ++meeting;
  }
  rep["forest_components"] = f.components.size();
  rep["forest_components_in_ball"] = meeting;
  if (meeting != ball.size()) o.failures.push_back("forest: components in range do not biject with ball classes");

  // circuits through the junction at the first interior W next to the base
  const auto& base = b.tree.tree.base;
  std::string w0;
  for (const auto& w : b.interior_w)
    if (std::binary_search(b.tree.tree.edges.begin(), b.tree.tree.edges.end(), Edge{base, w})) {
      w0 = w;
      break;
    }
  if (!w0.empty()) {
    auto j = b.junction.at(w0);
    auto c = circuits_through_edge(ball, j[0], j[1], 8);
    rep["circuit_edge"] = w0;
    rep["circuit_counts"] = c.count_by_length;
    // the same edge seen from a translate of the base
    Word g;
    for (const auto& [id, wo] : spec.w_orbits)
      if (id != b.tree.orbit.at(w0) && spec.groups.at(wo.group).order() > 1) {
        g = {{id, 1}};
        break;
      }
    if (!g.empty()) {
      auto moved = build_barK(spec, D, R, g);
      const auto& orbit = b.tree.orbit.at(w0);
      const auto& lam = spec.w_orbits.at(orbit).lambda;
      auto p = translate(spec, g, orbit, b.tree.rep.at(w0), lam[0]);
      auto q = translate(spec, g, orbit, b.tree.rep.at(w0), lam[1]);
      auto bp = moved.ball_pos[moved.rho[moved.K.index(p.first + "|" + p.second)]];
      auto bq = moved.ball_pos[moved.rho[moved.K.index(q.first + "|" + q.second)]];
      if (bp == moved.class_names.size() || bq == moved.class_names.size()) {
        o.failures.push_back("orbit: translated edge leaves the translated ball");
      } else {
        auto c2 = circuits_through_edge(moved.ball, bp, bq, 8);
        rep["circuit_counts_translated"] = c2.count_by_length;
        rep["translation"] = word_name(g);
        if (c2.count_by_length != c.count_by_length)
          o.failures.push_back("orbit: circuit counts differ on the translated edge");
      }
    }
  }

  // hyperbolicity estimate on classes away from the ball boundary
  auto d = bfs_distances(ball, b.ball_pos[b.base_class]);
  std::vector<std::size_t> interior;
  for (std::size_t v = 0; v < ball.size(); ++v)
    if (d[v] != kUnreached && d[v] < R) interior.push_back(v);
  auto delta = delta_estimate(ball, interior, 2000000);
  rep["delta"] = {{"value", rational_json(delta.delta)},
                  {"exhaustive", delta.exhaustive},
                  {"quadruples", delta.quadruples},
                  {"witness", {ball.names[delta.witness[0]], ball.names[delta.witness[1]],
                               ball.names[delta.witness[2]], ball.names[delta.witness[3]]}}};
  o.report = rep;

  std::vector<std::size_t> ring(ball.size());
  for (std::size_t v = 0; v < ball.size(); ++v) ring[v] = static_cast<std::size_t>(d[v]);
  o.dot.push_back({"", dot_graph(ball, "barK_ball", ring)});
  o.dot.push_back({"_K", dot_graph(b.K, "K")});
  o.dot.push_back({"_forest", dot_graph(f.forest, "parabolic_forest", f.component_of)});
  return o;
}

Outcome cmd_decompose(const TreeSystem& s, int k) {
  Outcome o;
  auto g = glue_at(s, k, o);
  auto cg = class_graph(*g.glued);
  std::vector<CutPair> W;
  try {
    W = inseparable_cut_pairs(cg);
  } catch (const ArgumentError& e) {
    o.failures.push_back(std::string("cut_pairs: ") + e.what());
    return o;
  }
  Json pairs = Json::array();
  for (const auto& p : W) pairs.push_back({cg.names[p[0]], cg.names[p[1]]});
  o.report["depth"] = k;
  o.report["cut_pairs"] = pairs;
  if (W.empty()) {
    o.report["stars"] = Json::array();
    if (!pair_correspondence(*g.glued).empty())
      o.failures.push_back("cut_pairs: none found, but the tree has interior W-nodes");
    return o;
  }
  auto dual = dual_tree(cg, W);
  append(o.failures, dual.problems, "dual_tree: ");
  Json stars = Json::array();
  for (std::size_t s2 = 0; s2 < dual.stars.size(); ++s2) {
    Json members = Json::array();
    for (auto p : dual.stars[s2]) members.push_back(DualCutPairTree::pair_name(p));
    Json B = Json::array();
    for (auto x : dual.B[s2]) B.push_back(cg.names[x]);
    stars.push_back({{"name", DualCutPairTree::star_name(s2)}, {"members", members}, {"B", B}});
  }
  o.report["stars"] = stars;
  auto iso = iso_check(g.system.tree, cg, dual, pair_correspondence(*g.glued));
  o.report["isomorphism"] = iso.mapping;
  if (!iso.ok) o.failures.push_back("iso_check: " + iso.mismatch);
  o.dot.push_back({"", dot_dual_tree(dual, cg)});
  return o;
}

std::string text_report(const std::string& command, const Json& report,
                        const std::vector<std::string>& failures) {
  std::string out = "command: " + command + "\n";
  out += "status: " + std::string(failures.empty() ? "ok" : "failed") + "\n";
  for (const auto& [key, value] : report.items()) {
    if (key == "failures" || key == "status" || key == "command") continue;
    if (value.is_primitive())
      out += key + ": " + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
    else
      out += key + ": " + std::to_string(value.size()) + " entries\n";
  }
  for (const auto& f : failures) out += "FAIL " + f + "\n";
  return out;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Refusal("cannot write " + p.string());
  f << content;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"validate",   "shrink",  "glue",     "complete",
                                          "kettlebell", "combine", "decompose"};
  return c;
}

int run(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const auto& cs = commands();
    if (std::find(cs.begin(), cs.end(), cfg.command) == cs.end())
      throw Refusal("unknown command '" + cfg.command + "'");
    if (cfg.format != "json" && cfg.format != "dot" && cfg.format != "text")
      throw Refusal("unknown format '" + cfg.format + "'");
    if (cfg.depth < 0) throw Refusal("--depth must be >= 0");
    if (cfg.radius < 0) throw Refusal("--radius must be >= 0");
    set_thread_count(cfg.threads);

    Outcome o;
    if (cfg.command == "validate") {
      o = cmd_validate(cfg.instance);
    } else {
      auto inst = parse_instance(cfg.instance);
      if (cfg.command == "shrink") o = cmd_shrink(need_tree(inst, cfg.command), cfg.depth);
      if (cfg.command == "glue") o = cmd_glue(need_tree(inst, cfg.command), cfg.depth);
      if (cfg.command == "complete")
        o = cmd_complete(need_tree(inst, cfg.command), cfg.depth, cfg.eps);
      if (cfg.command == "kettlebell") o = cmd_kettlebell(need_tree(inst, cfg.command), cfg.depth);
      if (cfg.command == "combine")
        o = cmd_combine(need_splitting(inst, cfg.command), cfg.depth, cfg.radius);
      if (cfg.command == "decompose") o = cmd_decompose(need_tree(inst, cfg.command), cfg.depth);
    }
    o.report["command"] = cfg.command;
    o.report["failures"] = o.failures;
    o.report["status"] = o.failures.empty() ? "ok" : "failed";

    std::filesystem::create_directories(cfg.out_dir);
    std::filesystem::path dir(cfg.out_dir);
    if (cfg.format == "json") write_file(dir / (cfg.command + ".json"), dump(o.report));
    if (cfg.format == "text")
      write_file(dir / (cfg.command + ".txt"), text_report(cfg.command, o.report, o.failures));
    if (cfg.format == "dot")
      for (const auto& [suffix, content] : o.dot)
        write_file(dir / (cfg.command + suffix + ".dot"), content);

    out << cfg.command << ": " << (o.failures.empty() ? "ok" : "failed");
    if (!o.failures.empty()) out << " (" << o.failures.size() << " failures)";
    out << "\n";
    for (const auto& f : o.failures) err << "  " << f << "\n";
    return o.failures.empty() ? 0 : 1;
  } catch (const Refusal& e) {
    err << "bforge: " << e.what() << "\n";
  } catch (const SystemError& e) {
    err << "bforge: invalid instance\n";
    for (const auto& d : e.diagnostics) err << "  " << d.code << ": " << d.message << "\n";
  } catch (const std::exception& e) {
    err << "bforge: " << e.what() << "\n";
  }
  return 2;
}

}  // namespace bforge::cli
