#include "bforge/splitting_engine.hpp"

#include "bforge/errors.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

namespace bforge {

int FiniteGroup::inv(int a) const {
  for (int b = 0; b < order(); ++b)
    if (table[a][b] == 0) return b;
  throw StructuralError("group element " + std::to_string(a) + " has no inverse");
}

std::string group_table_error(const FiniteGroup& g) {
  const int n = g.order();
  if (n == 0) return "empty table";
  for (int a = 0; a < n; ++a) {
    if (static_cast<int>(g.table[a].size()) != n)
      return "row " + std::to_string(a) + " has " + std::to_string(g.table[a].size()) +
             " entries, expected " + std::to_string(n);
    for (int b = 0; b < n; ++b)
      if (g.table[a][b] < 0 || g.table[a][b] >= n)
        return "entry (" + std::to_string(a) + "," + std::to_string(b) + ") out of range";
  }
  for (int a = 0; a < n; ++a)
    if (g.table[0][a] != a || g.table[a][0] != a)
      return "0 is not an identity at " + std::to_string(a);
  for (int a = 0; a < n; ++a) {
    std::vector<bool> seen(n, false);
    for (int b = 0; b < n; ++b) seen[g.table[a][b]] = true;
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      return "row " + std::to_string(a) + " is not a permutation (no inverse)";
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)))
          return "not associative at (" + std::to_string(a) + "," + std::to_string(b) + "," +
                 std::to_string(c) + ")";
  return {};
}

const EdgeOrbit& SplittingSpec::edge(const std::string& id) const {
  for (const auto& e : edges)
    if (e.id == id) return e;
  throw ArgumentError("unknown edge orbit '" + id + "'");
}

const FiniteGroup& SplittingSpec::group_of(const std::string& orbit) const {
  auto v = v_orbits.find(orbit);
  const std::string& name = v != v_orbits.end() ? v->second.group : w_orbits.at(orbit).group;
  return groups.at(name);
}

namespace {

int lambda_index(const std::vector<std::string>& lambda, const std::string& x) {
  auto it = std::find(lambda.begin(), lambda.end(), x);
  return it == lambda.end() ? -1 : static_cast<int>(it - lambda.begin());
}

std::pair<std::string, std::string> ordered(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return {a, b};
}

// Pairs h*s_e(lambda_w) over edge orbits at v and h in G_v, tagged by (e, h).
std::vector<std::pair<std::string, std::array<int, 2>>> neck_pairs(const SplittingSpec& spec,
                                                                   const std::string& v) {
  std::vector<std::pair<std::string, std::array<int, 2>>> out;
  const auto& vo = spec.v_orbits.at(v);
  const auto& G = spec.groups.at(vo.group);
  for (const auto& e : spec.edges) {
    if (e.v != v) continue;
    int a = lambda_index(vo.lambda, e.s[0]), b = lambda_index(vo.lambda, e.s[1]);
    if (a < 0 || b < 0) continue;
    for (int h = 0; h < G.order(); ++h)
      out.push_back({e.id + "*" + std::to_string(h), {vo.action[h][a], vo.action[h][b]}});
  }
  return out;
}

bool action_ok(const FiniteGroup& G, const std::vector<std::vector<int>>& act, std::size_t n,
               std::string& why) {
  if (static_cast<int>(act.size()) != G.order()) {
    why = "action has " + std::to_string(act.size()) + " rows for a group of order " +
          std::to_string(G.order());
    return false;
  }
  for (int g = 0; g < G.order(); ++g) {
    if (act[g].size() != n) {
      why = "row " + std::to_string(g) + " has the wrong length";
      return false;
    }
    std::vector<int> sorted = act[g];
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i)
      if (sorted[i] != static_cast<int>(i)) {
        why = "row " + std::to_string(g) + " is not a permutation";
        return false;
      }
  }
  for (std::size_t x = 0; x < n; ++x)
    if (act[0][x] != static_cast<int>(x)) {
      why = "identity does not act trivially";
      return false;
    }
  for (int g = 0; g < G.order(); ++g)
    for (int h = 0; h < G.order(); ++h)
      for (std::size_t x = 0; x < n; ++x)
        if (act[G.mul(g, h)][x] != act[g][act[h][x]]) {
          why = "not a homomorphism at (" + std::to_string(g) + "," + std::to_string(h) + ")";
          return false;
        }
  return true;
}

std::vector<std::vector<int>> w_action_rows(const WOrbit& w) {
  std::vector<std::vector<int>> rows;
  for (const auto& r : w.action) rows.push_back({r[0], r[1]});
  return rows;
}

std::vector<std::vector<int>> reservoir_adjacency(const VOrbit& vo) {
  std::vector<std::vector<int>> adj(vo.lambda.size());
  for (const auto& [x, y] : vo.reservoir) {
    int a = lambda_index(vo.lambda, x), b = lambda_index(vo.lambda, y);
    if (a < 0 || b < 0 || a == b) continue;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

std::vector<int> reservoir_bfs(const std::vector<std::vector<int>>& adj, int from) {
  std::vector<int> d(adj.size(), -1);
  std::deque<int> q{from};
  d[from] = 0;
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    for (int y : adj[x])
      if (d[y] < 0) {
        d[y] = d[x] + 1;
        q.push_back(y);
      }
  }
  return d;
}

}  // namespace

SplittingReport validate_splitting(const SplittingSpec& input) {
  SplittingReport rep;
  rep.spec = input;
  auto& spec = rep.spec;
  auto& out = rep.diagnostics;
  for (const auto& [name, g] : spec.groups) {
    auto err = group_table_error(g);
    if (!err.empty()) throw StructuralError("group '" + name + "': " + err);
  }
  std::sort(spec.edges.begin(), spec.edges.end(),
            [](const EdgeOrbit& a, const EdgeOrbit& b) { return a.id < b.id; });

  bool groups_ok = true;
  for (const auto& [id, vo] : spec.v_orbits) {
    if (spec.w_orbits.count(id))
      out.push_back({"quotient", "orbit '" + id + "' is both a V- and a W-orbit"});
    if (!spec.groups.count(vo.group)) {
      out.push_back({"unknown_group", "V-orbit '" + id + "' uses unknown group '" + vo.group + "'"});
      groups_ok = false;
      continue;
    }
    std::set<std::string> distinct(vo.lambda.begin(), vo.lambda.end());
    if (distinct.size() != vo.lambda.size() || vo.lambda.empty())
      out.push_back({"lambda", "lambda of '" + id + "' is empty or repeats a point"});
    std::string why;
    if (!action_ok(spec.groups.at(vo.group), vo.action, vo.lambda.size(), why)) {
      out.push_back({"action", "V-orbit '" + id + "': " + why});
      groups_ok = false;
    }
  }
  for (const auto& [id, wo] : spec.w_orbits) {
    if (!spec.groups.count(wo.group)) {
      out.push_back({"unknown_group", "W-orbit '" + id + "' uses unknown group '" + wo.group + "'"});
      groups_ok = false;
      continue;
    }
    if (wo.lambda[0] == wo.lambda[1])
      out.push_back({"lambda", "lambda of '" + id + "' must have two distinct points"});
    std::string why;
    if (!action_ok(spec.groups.at(wo.group), w_action_rows(wo), 2, why)) {
      out.push_back({"action", "W-orbit '" + id + "': " + why});
      groups_ok = false;
    }
  }
  if (!spec.v_orbits.count(spec.base))
    out.push_back({"base", "base '" + spec.base + "' is not a V-orbit"});

  // quotient must be a tree
  std::set<std::pair<std::string, std::string>> seen_pairs;
  std::set<std::string> ids;
  bool edges_ok = true;
  for (const auto& e : spec.edges) {
    if (!ids.insert(e.id).second) out.push_back({"quotient", "duplicate edge orbit '" + e.id + "'"});
    if (!spec.v_orbits.count(e.v) || !spec.w_orbits.count(e.w)) {
      out.push_back({"quotient", "edge orbit '" + e.id + "' does not join a V- to a W-orbit"});
      edges_ok = false;
      continue;
    }
    if (!seen_pairs.insert({e.v, e.w}).second)
      out.push_back({"quotient", "two edge orbits join '" + e.v + "' and '" + e.w +
                                     "'; only tree quotients are supported"});
  }
  std::size_t n_orbits = spec.v_orbits.size() + spec.w_orbits.size();
  if (edges_ok) {
    std::map<std::string, std::vector<std::string>> qadj;
    for (const auto& e : spec.edges) {
      qadj[e.v].push_back(e.w);
      qadj[e.w].push_back(e.v);
    }
    std::set<std::string> reached;
    std::deque<std::string> q;
    if (!spec.v_orbits.empty()) {
      q.push_back(spec.v_orbits.begin()->first);
      reached.insert(q.front());
    }
    while (!q.empty()) {
      auto x = q.front();
      q.pop_front();
      for (const auto& y : qadj[x])
        if (reached.insert(y).second) q.push_back(y);
    }
    if (reached.size() != n_orbits)
      out.push_back({"quotient", "quotient graph is not connected"});
    else if (spec.edges.size() + 1 != n_orbits)
      out.push_back({"quotient", "quotient graph has a cycle; only tree quotients are supported"});
  }
  if (!groups_ok || !edges_ok) return rep;

  for (const auto& [id, wo] : spec.w_orbits) {
    int valence = 0;
    for (const auto& e : spec.edges)
      if (e.w == id) valence += spec.groups.at(wo.group).order();
    if (valence < 2)
      out.push_back({"w_valence", "W-orbit '" + id + "' lifts to vertices of valence " +
                                      std::to_string(valence)});
  }

  bool signature_ok = true;
  for (const auto& e : spec.edges) {
    const auto& vo = spec.v_orbits.at(e.v);
    for (const auto& x : e.s)
      if (lambda_index(vo.lambda, x) < 0) {
        out.push_back({"signature", "s_" + e.id + " maps to '" + x + "', not in lambda of '" +
                                        e.v + "'"});
        signature_ok = false;
      }
    if (e.s[0] == e.s[1]) {
      out.push_back({"non_injective", "s_" + e.id + " sends both points to '" + e.s[0] + "'"});
      signature_ok = false;
    }
  }
  if (!signature_ok) return rep;

  for (auto& [id, vo] : spec.v_orbits) {
    const auto pairs = neck_pairs(spec, id);
    for (std::size_t i = 0; i < pairs.size(); ++i)
      for (std::size_t j = i + 1; j < pairs.size(); ++j) {
        const auto& A = pairs[i].second;
        const auto& B = pairs[j].second;
        int common = 0;
        for (int a : A)
          for (int b : B) common += a == b;
        if (common > 1)
          out.push_back({"image_overlap", "image overlap = 2 at '" + id + "' for " +
                                              pairs[i].first + " and " + pairs[j].first});
      }

    // reservoir: edges on lambda, invariant, connected once necks are in
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& [x, y] : vo.reservoir) {
      if (lambda_index(vo.lambda, x) < 0 || lambda_index(vo.lambda, y) < 0 || x == y) {
        out.push_back({"reservoir", "reservoir of '" + id + "' has edge (" + x + "," + y +
                                        ") outside lambda"});
        continue;
      }
      edges.insert(ordered(x, y));
    }
    for (const auto& [_, p] : pairs) {
      auto key = ordered(vo.lambda[p[0]], vo.lambda[p[1]]);
      if (edges.insert(key).second) spec.installed_necks.push_back({id, key.first, key.second});
    }
    vo.reservoir.assign(edges.begin(), edges.end());
    const auto& G = spec.groups.at(vo.group);
    for (const auto& [x, y] : vo.reservoir)
      for (int g = 1; g < G.order(); ++g) {
        auto img = ordered(vo.lambda[vo.action[g][lambda_index(vo.lambda, x)]],
                           vo.lambda[vo.action[g][lambda_index(vo.lambda, y)]]);
        if (!edges.count(img))
          out.push_back({"reservoir_invariance", "element " + std::to_string(g) + " of '" + id +
                                                     "' moves edge (" + x + "," + y + ") off K_v"});
      }
    auto d = reservoir_bfs(reservoir_adjacency(vo), 0);
    if (std::find(d.begin(), d.end(), -1) != d.end())
      out.push_back({"reservoir_connected", "reservoir of '" + id + "' is not connected"});
  }
  std::sort(spec.installed_necks.begin(), spec.installed_necks.end());
  return rep;
}

SplittingSpec build_splitting(const SplittingSpec& raw) {
  auto rep = validate_splitting(raw);
  if (!rep.ok()) throw SystemError(rep.diagnostics);
  return rep.spec;
}

// ---------------------------------------------------------------- words

Word word_mul(const SplittingSpec& spec, const Word& a, const Word& b) {
  Word out = a;
  for (const auto& syl : b) {
    if (!out.empty() && out.back().first == syl.first) {
      int m = spec.group_of(syl.first).mul(out.back().second, syl.second);
      if (m == 0)
        out.pop_back();
      else
        out.back().second = m;
    } else if (syl.second != 0) {
      out.push_back(syl);
    }
  }
  return out;
}

Word word_inv(const SplittingSpec& spec, const Word& a) {
  Word out;
  for (auto it = a.rbegin(); it != a.rend(); ++it)
    out.push_back({it->first, spec.group_of(it->first).inv(it->second)});
  return out;
}

std::string word_name(const Word& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += '.';
    s += w[i].first + ":" + std::to_string(w[i].second);
  }
  return s;
}

std::string vertex_name(const std::string& orbit, const Word& rep) {
  return orbit + "[" + word_name(rep) + "]";
}

Word coset_rep(const Word& r, const std::string& orbit, int* stripped) {
  if (stripped) *stripped = 0;
  if (!r.empty() && r.back().first == orbit) {
    if (stripped) *stripped = r.back().second;
    return Word(r.begin(), r.end() - 1);
  }
  return r;
}

// ---------------------------------------------------------------- unfolding

namespace {

// Labels at the tree edge g*e0 where g = r_v h = r_w k.
std::array<std::string, 2> edge_signature(const SplittingSpec& spec, const EdgeOrbit& e, int h,
                                          int k) {
  const auto& vo = spec.v_orbits.at(e.v);
  const auto& wo = spec.w_orbits.at(e.w);
  const auto& Gw = spec.groups.at(wo.group);
  int kinv = Gw.inv(k);
  std::array<std::string, 2> out;
  for (int i = 0; i < 2; ++i) {
    int x = wo.action[kinv][i];
    int y = lambda_index(vo.lambda, e.s[x]);
    out[i] = vo.lambda[vo.action[h][y]];
  }
  return out;
}

}  // namespace

UnfoldedTree unfold_tree(const SplittingSpec& spec, int D, const Word& center) {
  if (D < 0) throw ArgumentError("unfold depth must be >= 0");
  UnfoldedTree t;
  t.depth = D;
  Word root = coset_rep(center, spec.base);
  std::string root_name = vertex_name(spec.base, root);
  std::map<std::string, int> depth{{root_name, 0}};
  t.orbit[root_name] = spec.base;
  t.rep[root_name] = root;
  std::deque<std::string> queue{root_name};
  std::set<std::string> vs{root_name}, ws;
  std::set<Edge> edges;
  const int limit = 2 * D + 1;
  auto visit = [&](const std::string& name, const std::string& orbit, const Word& rep, int d) {
    if (depth.count(name)) return;
    depth[name] = d;
    t.orbit[name] = orbit;
    t.rep[name] = rep;
    (spec.v_orbits.count(orbit) ? vs : ws).insert(name);
    if (d < limit) queue.push_back(name);
  };
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    const auto& orbit = t.orbit[u];
    const Word rep = t.rep[u];
    int d = depth[u];
    bool is_v = spec.v_orbits.count(orbit) > 0;
    for (const auto& e : spec.edges) {
      if ((is_v ? e.v : e.w) != orbit) continue;
      const auto& G = spec.group_of(orbit);
      for (int x = 0; x < G.order(); ++x) {
        Word g = word_mul(spec, rep, Word{{orbit, x}});
        const std::string& other = is_v ? e.w : e.v;
        int y = 0;
        Word r2 = coset_rep(g, other, &y);
        std::string name = vertex_name(other, r2);
        visit(name, other, r2, d + 1);
        Edge edge = is_v ? Edge{u, name} : Edge{name, u};
        if (edges.insert(edge).second) {
          t.edge_orbit[edge] = e.id;
          t.signature[edge] = is_v ? edge_signature(spec, e, x, y) : edge_signature(spec, e, y, x);
        }
      }
    }
  }
  t.tree.v_nodes.assign(vs.begin(), vs.end());
  t.tree.w_nodes.assign(ws.begin(), ws.end());
  t.tree.edges.assign(edges.begin(), edges.end());
  t.tree.base = root_name;
  for (const auto& w : ws)
    if (depth[w] == limit) t.tree.frontier.insert(w);
  return t;
}

std::pair<std::string, std::string> translate(const SplittingSpec& spec, const Word& g,
                                              const std::string& orbit, const Word& rep,
                                              const std::string& label) {
  Word gr = word_mul(spec, g, rep);
  int s = 0;
  Word r2 = coset_rep(gr, orbit, &s);
  std::string out;
  if (auto v = spec.v_orbits.find(orbit); v != spec.v_orbits.end()) {
    int x = lambda_index(v->second.lambda, label);
    if (x < 0) throw ArgumentError("'" + label + "' is not in lambda of '" + orbit + "'");
    out = v->second.lambda[v->second.action[s][x]];
  } else {
    const auto& wo = spec.w_orbits.at(orbit);
    int x = label == wo.lambda[0] ? 0 : label == wo.lambda[1] ? 1 : -1;
    if (x < 0) throw ArgumentError("'" + label + "' is not in lambda of '" + orbit + "'");
    out = wo.lambda[wo.action[s][x]];
  }
  return {vertex_name(orbit, r2), out};
}

std::vector<std::pair<std::string, std::string>> quotient_edges(const UnfoldedTree& t) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [v, w] : t.tree.edges) out.insert({t.orbit.at(v), t.orbit.at(w)});
  return {out.begin(), out.end()};
}

int reservoir_diameter(const SplittingSpec& spec) {
  int diam = 0;
  for (const auto& [_, vo] : spec.v_orbits) {
    auto adj = reservoir_adjacency(vo);
    for (std::size_t x = 0; x < adj.size(); ++x)
      for (int d : reservoir_bfs(adj, static_cast<int>(x))) diam = std::max(diam, d);
  }
  return diam;
}

// ---------------------------------------------------------------- K and K-bar

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::vector<std::string> lambda_of(const SplittingSpec& spec, const std::string& orbit) {
  if (auto v = spec.v_orbits.find(orbit); v != spec.v_orbits.end()) return v->second.lambda;
  const auto& l = spec.w_orbits.at(orbit).lambda;
  return {l[0], l[1]};
}

std::string k_name(const std::string& u, const std::string& x) { return u + "|" + x; }

}  // namespace

std::vector<std::size_t> FineGraphBall::image_of(const std::string& u) const {
  std::vector<std::size_t> out;
  auto it = k_vertices.find(u);
  if (it == k_vertices.end()) return {};
  for (auto kv : it->second) {
    auto b = ball_pos[rho[kv]];
    if (b == class_names.size()) return {};
    out.push_back(b);
  }
  return out;
}

FineGraphBall build_barK(const SplittingSpec& spec, int D, int R, const Word& center) {
  if (R < 0) throw ArgumentError("radius must be >= 0");
  int need = R + reservoir_diameter(spec);
  if (D < need)
    throw DepthError("radius " + std::to_string(R) + " needs depth D >= " + std::to_string(need) +
                     " (got " + std::to_string(D) + ")");
  FineGraphBall b;
  b.radius = R;
  b.tree = unfold_tree(spec, D, center);
  const auto& t = b.tree;

  for (const auto* list : {&t.tree.v_nodes, &t.tree.w_nodes})
    for (const auto& u : *list)
      for (const auto& x : lambda_of(spec, t.orbit.at(u)))
        b.k_vertices[u].push_back(b.K.add_vertex(k_name(u, x)));
  auto add = [&](std::size_t a, std::size_t c, KEdgeKind kind) {
    if (b.K.add_edge(a, c)) {
      b.k_edges.push_back({std::min(a, c), std::max(a, c)});
      b.k_kind.push_back(kind);
    }
  };
  std::map<std::string, std::set<std::pair<std::string, std::string>>> necks;
  for (const auto& [id, vo] : spec.v_orbits)
    for (const auto& [_, p] : neck_pairs(spec, id))
      necks[id].insert(ordered(vo.lambda[p[0]], vo.lambda[p[1]]));
  for (const auto& u : t.tree.v_nodes) {
    const auto& orbit = t.orbit.at(u);
    for (const auto& [x, y] : spec.v_orbits.at(orbit).reservoir)
      add(b.K.index(k_name(u, x)), b.K.index(k_name(u, y)),
          necks[orbit].count(ordered(x, y)) ? KEdgeKind::Neck : KEdgeKind::Reservoir);
  }
  for (const auto& e : t.tree.edges) {
    const auto& wl = spec.w_orbits.at(t.orbit.at(e.second)).lambda;
    const auto& sig = t.signature.at(e);
    for (int i = 0; i < 2; ++i)
      add(b.K.index(k_name(e.second, wl[i])), b.K.index(k_name(e.first, sig[i])),
          KEdgeKind::Pipe);
  }
  for (const auto& w : t.tree.w_nodes) {
    const auto& kv = b.k_vertices.at(w);
    add(kv[0], kv[1], KEdgeKind::Junction);
  }

  // classes: union-find over pipes, named by their smallest member
  UnionFind uf(b.K.size());
  for (std::size_t i = 0; i < b.k_edges.size(); ++i)
    if (b.k_kind[i] == KEdgeKind::Pipe) uf.unite(b.k_edges[i].first, b.k_edges[i].second);
  std::map<std::size_t, std::string> root_name;
  for (std::size_t v = 0; v < b.K.size(); ++v) {
    auto r = uf.find(v);
    auto it = root_name.find(r);
    if (it == root_name.end() || b.K.names[v] < it->second) root_name[r] = b.K.names[v];
  }
  std::vector<std::pair<std::string, std::size_t>> named;
  for (const auto& [r, n] : root_name) named.push_back({n, r});
  std::sort(named.begin(), named.end());
  std::map<std::size_t, std::size_t> class_of_root;
  for (std::size_t i = 0; i < named.size(); ++i) {
    class_of_root[named[i].second] = i;
    b.class_names.push_back(named[i].first);
  }
  b.rho.resize(b.K.size());
  b.class_members.resize(named.size());
  for (std::size_t v = 0; v < b.K.size(); ++v) {
    b.rho[v] = class_of_root[uf.find(v)];
    b.class_members[b.rho[v]].push_back(v);
  }

  for (const auto& n : b.class_names) b.barK.add_vertex(n);
  for (std::size_t i = 0; i < b.k_edges.size(); ++i) {
    if (b.k_kind[i] == KEdgeKind::Pipe || b.k_kind[i] == KEdgeKind::Neck) continue;
    auto [x, y] = b.k_edges[i];
    if (!b.barK.add_edge(b.rho[x], b.rho[y])) ++b.duplicate_edges;
  }

  b.base_class = b.rho[b.k_vertices.at(t.tree.base).front()];
  auto d = bfs_distances(b.barK, b.base_class);
  b.ball_pos.assign(b.class_names.size(), b.class_names.size());
  for (std::size_t c = 0; c < d.size(); ++c)
    if (d[c] != kUnreached && d[c] <= R) {
      b.ball_pos[c] = b.ball_classes.size();
      b.ball_classes.push_back(c);
    }
  b.ball = b.barK.induced(b.ball_classes);

  auto adj = adjacency(t.tree);
  for (const auto& w : t.tree.w_nodes) {
    const auto& kv = b.k_vertices.at(w);
    auto p = b.ball_pos[b.rho[kv[0]]], q = b.ball_pos[b.rho[kv[1]]];
    if (p == b.class_names.size() || q == b.class_names.size()) continue;
    b.junction[w] = {p, q};
    if (t.tree.frontier.count(w)) continue;
    bool inside = true;
    for (const auto& v : adj.at(w)) inside = inside && !b.image_of(v).empty();
    if (inside) b.interior_w.push_back(w);
  }
  return b;
}

ParabolicForest parabolic_forest(const SplittingSpec& spec, int D, const Word& center) {
  auto t = unfold_tree(spec, D, center);
  ParabolicForest f;
  for (const auto* list : {&t.tree.v_nodes, &t.tree.w_nodes})
    for (const auto& u : *list)
      for (const auto& x : lambda_of(spec, t.orbit.at(u))) f.forest.add_vertex(k_name(u, x));
  for (const auto& e : t.tree.edges) {
    const auto& wl = spec.w_orbits.at(t.orbit.at(e.second)).lambda;
    const auto& sig = t.signature.at(e);
    for (int i = 0; i < 2; ++i)
      f.forest.add_edge(f.forest.index(k_name(e.second, wl[i])),
                        f.forest.index(k_name(e.first, sig[i])));
  }
  const std::size_t none = f.forest.size();
  f.component_of.assign(f.forest.size(), none);
  for (std::size_t s = 0; s < f.forest.size(); ++s) {
    if (f.component_of[s] != none) continue;
    std::vector<std::size_t> comp;
    std::deque<std::size_t> q{s};
    f.component_of[s] = f.components.size();
    while (!q.empty()) {
      auto x = q.front();
      q.pop_front();
      comp.push_back(x);
      for (auto y : f.forest.adj[x])
        if (f.component_of[y] == none) {
          f.component_of[y] = f.components.size();
          q.push_back(y);
        }
    }
    std::sort(comp.begin(), comp.end());
    f.components.push_back(std::move(comp));
  }
  f.acyclic = f.forest.edge_count() + f.components.size() == f.forest.size();
  return f;
}

TreeSystem theta_system(const SplittingSpec& spec, int D) {
  auto t = unfold_tree(spec, D);
  TreeSystem s;
  s.tree = t.tree;
  std::map<std::string, FiniteMetricSpace> per_orbit;
  for (const auto& [id, vo] : spec.v_orbits) {
    auto adj = reservoir_adjacency(vo);
    std::vector<std::vector<Rational>> dist;
    for (std::size_t x = 0; x < vo.lambda.size(); ++x) {
      std::vector<Rational> row;
      for (int d : reservoir_bfs(adj, static_cast<int>(x))) row.emplace_back(d);
      dist.push_back(std::move(row));
    }
    per_orbit[id] = make_space(vo.lambda, dist);
  }
  for (const auto& v : t.tree.v_nodes) s.constituent[v] = per_orbit.at(t.orbit.at(v));
  for (const auto& w : t.tree.w_nodes) s.cut_pair[w] = spec.w_orbits.at(t.orbit.at(w)).lambda;
  for (const auto& [e, sig] : t.signature) s.injection[e] = sig;
  return build_tree_system(std::move(s));
}

}  // namespace bforge
