#include "bforge/graph_analysis.hpp"

#include "bforge/errors.hpp"
#include "bforge/parallel.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace bforge {

// ---------------------------------------------------------------- circuits

namespace {

struct CircuitSearch {
  const Graph& g;
  std::size_t a;
  int n;
  const std::vector<int>& to_a;
  std::size_t list_limit;
  std::vector<char> on_path;
  std::vector<std::size_t> path;
  std::vector<std::size_t> counts;
  std::vector<std::vector<std::size_t>> found;

  // path holds a, b, ..., x; its edge count is path.size() - 1.
  void dfs(std::size_t x) {
    int used = static_cast<int>(path.size()) - 1;
    for (auto y : g.adj[x]) {
      if (y == a) {
        if (used >= 2 && used + 1 <= n) {
          ++counts[used + 1];
          if (found.size() < list_limit) found.push_back(path);
        }
        continue;
      }
      if (on_path[y] || to_a[y] == kUnreached) continue;
      if (used + 1 + to_a[y] > n) continue;
      on_path[y] = 1;
      path.push_back(y);
      dfs(y);
      path.pop_back();
      on_path[y] = 0;
    }
  }
};

}  // namespace

CircuitReport circuits_through_edge(const Graph& g, std::size_t a, std::size_t b, int n,
                                    std::size_t list_limit) {
  if (a >= g.size() || b >= g.size() || !g.has_edge(a, b))
    throw ArgumentError("circuits_through_edge: not an edge");
  CircuitReport rep;
  if (n < 3) {
    rep.count_by_length.assign(std::max(n, 0) + 1, 0);
    rep.note = "no circuit has length below 3";
    return rep;
  }
  auto to_a = bfs_distances(g, a);
  std::vector<std::size_t> first;
  for (auto y : g.adj[b])
    if (y != a) first.push_back(y);
  std::vector<CircuitSearch> parts;
  parts.reserve(first.size());
  for (std::size_t i = 0; i < first.size(); ++i)
    parts.push_back(CircuitSearch{g, a, n, to_a, list_limit, std::vector<char>(g.size(), 0),
                                  {}, std::vector<std::size_t>(n + 1, 0), {}});
  parallel_for(first.size(), [&](std::size_t i) {
    auto& s = parts[i];
    auto y = first[i];
    if (1 + to_a[y] > n - 1 || to_a[y] == kUnreached) return;
    s.on_path[a] = s.on_path[b] = s.on_path[y] = 1;
    s.path = {a, b, y};
    s.dfs(y);
  });
  rep.count_by_length.assign(n + 1, 0);
  for (auto& s : parts) {
    for (int L = 0; L <= n; ++L) rep.count_by_length[L] += s.counts[L];
    for (auto& c : s.found) {
      if (rep.circuits.size() < list_limit)
        rep.circuits.push_back(std::move(c));
    }
  }
  for (auto c : rep.count_by_length) rep.total += c;
  rep.list_truncated = rep.circuits.size() < rep.total && list_limit > 0;
  return rep;
}

// ---------------------------------------------------------------- delta

DeltaReport delta_estimate(const Graph& g, const std::vector<std::size_t>& interior,
                           std::size_t max_quadruples) {
  DeltaReport rep;
  rep.delta = 0;
  std::vector<std::size_t> I = interior;
  std::sort(I.begin(), I.end());
  I.erase(std::unique(I.begin(), I.end()), I.end());
  auto choose4 = [](std::size_t m) -> long double {
    if (m < 4) return 0;
    return static_cast<long double>(m) * (m - 1) * (m - 2) * (m - 3) / 24;
  };
  if (choose4(I.size()) > static_cast<long double>(max_quadruples)) {
    std::size_t m = 4;
    while (choose4(m + 1) <= static_cast<long double>(max_quadruples)) ++m;
    std::vector<std::size_t> pick;
    for (std::size_t i = 0; i < m; ++i) pick.push_back(I[i * I.size() / m]);
    I = pick;
    rep.exhaustive = false;
  }
  if (I.size() < 4) return rep;
  std::vector<std::vector<int>> d(I.size());
  parallel_for(I.size(), [&](std::size_t i) {
    auto full = bfs_distances(g, I[i]);
    for (auto j : I) {
      if (full[j] == kUnreached) throw ArgumentError("delta_estimate: graph is disconnected");
      d[i].push_back(full[j]);
    }
  });
  const std::size_t m = I.size();
  struct Best {
    int twice = -1;
    std::array<std::size_t, 4> q{};
    std::size_t count = 0;
  };
  std::vector<Best> best(m);
  parallel_for(m, [&](std::size_t i) {
    auto& b = best[i];
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t k = j + 1; k < m; ++k)
        for (std::size_t l = k + 1; l < m; ++l) {
          int s[3] = {d[i][j] + d[k][l], d[i][k] + d[j][l], d[i][l] + d[j][k]};
          std::sort(s, s + 3);
          int twice = s[2] - s[1];
          ++b.count;
          if (twice > b.twice) {
            b.twice = twice;
            b.q = {I[i], I[j], I[k], I[l]};
          }
        }
  });
  int top = 0;
  for (const auto& b : best) {
    rep.quadruples += b.count;
    if (b.twice > top) {
      top = b.twice;
      rep.witness = b.q;
    }
  }
  if (top == 0) rep.witness = {I[0], I[1], I[2], I[3]};
  rep.delta = Rational(top, 2);
  rep.delta.canonicalize();
  return rep;
}

// ---------------------------------------------------------------- separation

std::vector<std::vector<std::size_t>> separation_components(const Graph& g,
                                                            const std::vector<std::size_t>& S) {
  std::vector<char> removed(g.size(), 0);
  for (auto s : S) removed.at(s) = 1;
  std::vector<char> seen(g.size(), 0);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (removed[s] || seen[s]) continue;
    std::vector<std::size_t> comp;
    std::deque<std::size_t> q{s};
    seen[s] = 1;
    while (!q.empty()) {
      auto x = q.front();
      q.pop_front();
      comp.push_back(x);
      for (auto y : g.adj[x])
        if (!removed[y] && !seen[y]) {
          seen[y] = 1;
          q.push_back(y);
        }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

ConvexityReport convexity_check(const Graph& g, const std::vector<std::size_t>& S) {
  ConvexityReport rep;
  std::vector<char> in(g.size(), 0);
  for (auto s : S) in.at(s) = 1;
  std::vector<std::size_t> members(S.begin(), S.end());
  std::sort(members.begin(), members.end());
  std::vector<std::vector<int>> d(members.size());
  parallel_for(members.size(), [&](std::size_t i) { d[i] = bfs_distances(g, members[i]); });
  auto walk_back = [&](const std::vector<int>& from, std::size_t z) {
    // a shortest path z -> source along decreasing distance, smallest ids first
    std::vector<std::size_t> p{z};
    while (from[p.back()] > 0)
      for (auto y : g.adj[p.back()])
        if (from[y] == from[p.back()] - 1) {
          p.push_back(y);
          break;
        }
    return p;
  };
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const auto& du = d[i];
      const auto& dv = d[j];
      int uv = du[members[j]];
      if (uv == kUnreached) continue;
      for (std::size_t z = 0; z < g.size(); ++z) {
        if (in[z] || du[z] == kUnreached || dv[z] == kUnreached) continue;
        if (du[z] + dv[z] != uv) continue;
        auto left = walk_back(du, z);
        std::reverse(left.begin(), left.end());
        auto right = walk_back(dv, z);
        left.insert(left.end(), right.begin() + 1, right.end());
        rep.convex = false;
        rep.witness = std::move(left);
        return rep;
      }
    }
  return rep;
}

// ---------------------------------------------------------------- cut pairs

std::vector<std::size_t> cut_vertices(const Graph& g) {
  std::vector<char> flag(g.size(), 0);
  parallel_for(g.size(), [&](std::size_t v) {
    flag[v] = separation_components(g, {v}).size() > 1;
  });
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < g.size(); ++v)
    if (flag[v]) out.push_back(v);
  return out;
}

std::vector<CutPair> cut_pairs(const Graph& g) {
  std::vector<std::vector<CutPair>> per(g.size());
  parallel_for(g.size(), [&](std::size_t x) {
    for (std::size_t y = x + 1; y < g.size(); ++y)
      if (separation_components(g, {x, y}).size() > 1) per[x].push_back({x, y});
  });
  std::vector<CutPair> out;
  for (auto& p : per) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<CutPair> inseparable_cut_pairs(const Graph& g) {
  if (!is_connected(g)) throw ArgumentError("inseparable_cut_pairs: graph is disconnected");
  auto cv = cut_vertices(g);
  if (!cv.empty())
    throw ArgumentError("inseparable_cut_pairs: '" + g.names[cv.front()] + "' is a cut vertex");
  auto all = cut_pairs(g);
  std::vector<std::vector<std::size_t>> comp_of(all.size());
  parallel_for(all.size(), [&](std::size_t i) {
    comp_of[i].assign(g.size(), g.size());
    auto comps = separation_components(g, {all[i][0], all[i][1]});
    for (std::size_t c = 0; c < comps.size(); ++c)
      for (auto v : comps[c]) comp_of[i][v] = c;
  });
  std::vector<CutPair> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    bool separated = false;
    for (std::size_t j = 0; j < all.size() && !separated; ++j) {
      if (i == j) continue;
      const auto& c = comp_of[j];
      auto x = all[i][0], y = all[i][1];
      if (c[x] == g.size() || c[y] == g.size()) continue;  // shares a point
      separated = c[x] != c[y];
    }
    if (!separated) out.push_back(all[i]);
  }
  return out;
}

namespace {

// comp[k][v]: component of g - W[k] holding v, or g.size() for W[k]'s points.
std::vector<std::vector<std::size_t>> pair_components(const Graph& g,
                                                      const std::vector<CutPair>& W) {
  std::vector<std::vector<std::size_t>> comp(W.size());
  parallel_for(W.size(), [&](std::size_t k) {
    comp[k].assign(g.size(), g.size());
    auto cs = separation_components(g, {W[k][0], W[k][1]});
    for (std::size_t c = 0; c < cs.size(); ++c)
      for (auto v : cs[c]) comp[k][v] = c;
  });
  return comp;
}

bool separates(const std::vector<std::size_t>& comp, std::size_t none, const CutPair& a,
               const CutPair& b) {
  for (auto x : a)
    for (auto y : b)
      if (comp[x] != none && comp[y] != none && comp[x] != comp[y]) return true;
  return false;
}

// Bron-Kerbosch with pivoting; cliques come out in no particular order.
void bron_kerbosch(const std::vector<std::vector<char>>& adj, std::vector<std::size_t>& R,
                   std::vector<std::size_t> P, std::vector<std::size_t> X,
                   std::vector<std::vector<std::size_t>>& out) {
  if (P.empty() && X.empty()) {
    auto c = R;
    std::sort(c.begin(), c.end());
    out.push_back(c);
    return;
  }
  std::size_t pivot = P.empty() ? X.front() : P.front();
  std::size_t best = 0;
  for (const auto* set : {&P, &X})
    for (auto u : *set) {
      std::size_t c = 0;
      for (auto v : P) c += adj[u][v];
      if (c > best) {
        best = c;
        pivot = u;
      }
    }
  auto cand = P;
  for (auto v : cand) {
    if (adj[pivot][v]) continue;
    std::vector<std::size_t> P2, X2;
    for (auto u : P)
      if (adj[v][u]) P2.push_back(u);
    for (auto u : X)
      if (adj[v][u]) X2.push_back(u);
    R.push_back(v);
    bron_kerbosch(adj, R, P2, X2, out);
    R.pop_back();
    P.erase(std::find(P.begin(), P.end(), v));
    X.push_back(v);
  }
}

}  // namespace

BetweenOracle separation_oracle(const Graph& g, const std::vector<CutPair>& W) {
  auto comp = std::make_shared<std::vector<std::vector<std::size_t>>>(pair_components(g, W));
  auto pairs = std::make_shared<std::vector<CutPair>>(W);
  std::size_t none = g.size();
  return [comp, pairs, none](std::size_t k, std::size_t a, std::size_t b) {
    return separates((*comp)[k], none, (*pairs)[a], (*pairs)[b]);
  };
}

DualCutPairTree dual_tree(std::size_t n_pairs, const BetweenOracle& between) {
  if (n_pairs == 0) throw ArgumentError("dual_tree: no cut pairs");
  DualCutPairTree t;
  std::vector<std::vector<char>> free(n_pairs, std::vector<char>(n_pairs, 1));
  for (std::size_t i = 0; i < n_pairs; ++i) {
    free[i][i] = 0;
    for (std::size_t j = i + 1; j < n_pairs; ++j)
      for (std::size_t k = 0; k < n_pairs; ++k) {
        if (k == i || k == j) continue;
        bool b1 = between(k, i, j), b2 = between(k, j, i);
        if (b1 != b2)
          throw ArgumentError("dual_tree: oracle is not symmetric for pair " + std::to_string(k) +
                              " between " + std::to_string(i) + " and " + std::to_string(j));
        if (b1) free[i][j] = free[j][i] = 0;
      }
  }
  std::vector<std::size_t> R, P(n_pairs), X;
  for (std::size_t i = 0; i < n_pairs; ++i) P[i] = i;
  bron_kerbosch(free, R, P, X, t.stars);
  std::sort(t.stars.begin(), t.stars.end());

  std::set<std::string> vs, ws;
  std::vector<Edge> edges;
  for (std::size_t s = 0; s < t.stars.size(); ++s) {
    vs.insert(DualCutPairTree::star_name(s));
    for (auto w : t.stars[s])
      edges.push_back({DualCutPairTree::star_name(s), DualCutPairTree::pair_name(w)});
  }
  for (std::size_t w = 0; w < n_pairs; ++w) ws.insert(DualCutPairTree::pair_name(w));
  std::sort(edges.begin(), edges.end());
  t.tree.v_nodes.assign(vs.begin(), vs.end());
  t.tree.w_nodes.assign(ws.begin(), ws.end());
  t.tree.edges = edges;
  t.tree.base = DualCutPairTree::star_name(0);

  std::set<std::string> all(vs);
  all.insert(ws.begin(), ws.end());
  if (edges.size() + 1 != all.size())
    t.problems.push_back("dual graph has " + std::to_string(edges.size()) + " edges on " +
                         std::to_string(all.size()) + " vertices, not a tree");
  else if (!is_connected_subtree(t.tree, all))
    t.problems.push_back("dual graph is not connected");
  return t;
}

DualCutPairTree dual_tree(const Graph& g, const std::vector<CutPair>& W) {
  auto comp = pair_components(g, W);
  const std::size_t none = g.size();
  auto between = [&](std::size_t k, std::size_t a, std::size_t b) {
    return separates(comp[k], none, W[a], W[b]);
  };
  auto t = dual_tree(W.size(), between);
  t.pairs = W;
  for (auto& p : t.pairs) std::sort(p.begin(), p.end());

  // component of g - W[w] toward star s: the one holding the other members
  auto toward = [&](std::size_t w, std::size_t s, std::string* problem) -> std::size_t {
    std::set<std::size_t> cs;
    for (auto o : t.stars[s]) {
      if (o == w) continue;
      for (auto x : W[o])
        if (comp[w][x] != none) cs.insert(comp[w][x]);
    }
    if (cs.size() > 1 && problem)
      *problem = "star " + std::to_string(s) + " straddles pair " + std::to_string(w);
    return cs.empty() ? none : *cs.begin();
  };

  t.B.resize(t.stars.size());
  for (std::size_t s = 0; s < t.stars.size(); ++s) {
    std::vector<std::size_t> B;
    for (std::size_t v = 0; v < g.size(); ++v) {
      bool keep = true;
      for (auto w : t.stars[s]) {
        if (comp[w][v] == none) continue;  // a point of w itself
        std::string problem;
        auto c = toward(w, s, &problem);
        if (!problem.empty()) t.problems.push_back(problem);
        if (c != none && comp[w][v] != c) keep = false;
      }
      if (keep) B.push_back(v);
    }
    t.B[s] = std::move(B);
  }
  std::sort(t.problems.begin(), t.problems.end());
  t.problems.erase(std::unique(t.problems.begin(), t.problems.end()), t.problems.end());

  // mu_w: stars at w <-> components of g - w meeting another pair
  for (std::size_t w = 0; w < W.size(); ++w) {
    std::set<std::size_t> meeting;
    for (std::size_t o = 0; o < W.size(); ++o)
      if (o != w)
        for (auto x : W[o])
          if (comp[w][x] != none) meeting.insert(comp[w][x]);
    std::set<std::size_t> hit;
    std::size_t stars_at_w = 0;
    for (std::size_t s = 0; s < t.stars.size(); ++s) {
      if (!std::binary_search(t.stars[s].begin(), t.stars[s].end(), w)) continue;
      ++stars_at_w;
      auto c = toward(w, s, nullptr);
      if (c != none) hit.insert(c);
    }
    std::size_t singleton = 0;
    for (std::size_t s = 0; s < t.stars.size(); ++s)
      if (t.stars[s] == std::vector<std::size_t>{w}) ++singleton;
    if (hit != meeting || hit.size() + singleton != stars_at_w)
      t.problems.push_back("mu at pair " + std::to_string(w) + ": " + std::to_string(stars_at_w) +
                           " stars for " + std::to_string(meeting.size()) + " components");
  }

  // betweenness agrees with the tree path
  if (t.problems.empty()) {
    std::vector<std::map<std::string, int>> dist(W.size());
    for (std::size_t w = 0; w < W.size(); ++w)
      dist[w] = tree_distances(t.tree, DualCutPairTree::pair_name(w));
    for (std::size_t k = 0; k < W.size(); ++k)
      for (std::size_t i = 0; i < W.size(); ++i)
        for (std::size_t j = i + 1; j < W.size(); ++j) {
          if (k == i || k == j) continue;
          auto pk = DualCutPairTree::pair_name(k);
          bool on_path = dist[i].at(pk) + dist[j].at(pk) == dist[i].at(DualCutPairTree::pair_name(j));
          if (on_path != between(k, i, j))
            t.problems.push_back("betweenness of pair " + std::to_string(k) + " for " +
                                 std::to_string(i) + "," + std::to_string(j) +
                                 " disagrees with the tree path");
        }
  }
  return t;
}

// ---------------------------------------------------------------- glued input

Graph class_graph(const GluedSpace& g) {
  Graph out;
  for (const auto& c : g.classes) out.add_vertex(c.name);
  auto adj = class_adjacency(g);
  for (std::size_t a = 0; a < adj.size(); ++a)
    for (auto b : adj[a]) out.add_edge(a, b);
  return out;
}

std::map<std::string, std::array<std::string, 2>> pair_correspondence(const GluedSpace& g) {
  std::map<std::string, std::array<std::string, 2>> out;
  const auto& s = *g.system;
  for (const auto& w : s.tree.w_nodes) {
    if (s.tree.frontier.count(w)) continue;
    const auto& pts = s.cut_pair.at(w);
    out[w] = {g.classes[g.cls(w, pts[0])].name, g.classes[g.cls(w, pts[1])].name};
  }
  return out;
}

IsoReport iso_check(const BipartiteTree& T, const Graph& g, const DualCutPairTree& dual,
                    const std::map<std::string, std::array<std::string, 2>>& correspondence) {
  IsoReport rep;
  auto fail = [&](std::string m) {
    if (rep.ok) rep.mismatch = std::move(m);
    rep.ok = false;
  };
  std::map<CutPair, std::size_t> pair_index;
  for (std::size_t i = 0; i < dual.pairs.size(); ++i) pair_index[dual.pairs[i]] = i;

  std::vector<std::string> interior_w;
  for (const auto& w : T.w_nodes)
    if (!T.frontier.count(w)) interior_w.push_back(w);
  std::map<std::string, std::size_t> phi_w;
  std::vector<int> pair_hits(dual.pairs.size(), 0);
  for (const auto& w : interior_w) {
    auto it = correspondence.find(w);
    if (it == correspondence.end()) {
      fail("no correspondence for W-node '" + w + "'");
      continue;
    }
    const auto& [x, y] = it->second;
    if (!g.contains(x) || !g.contains(y)) {
      fail("at '" + w + "': {" + x + ", " + y + "} are not vertices of the decomposed graph");
      continue;
    }
    CutPair p{g.index(x), g.index(y)};
    std::sort(p.begin(), p.end());
    auto pi = pair_index.find(p);
    if (pi == pair_index.end()) {
      fail("at '" + w + "': {" + x + ", " + y + "} is not an inseparable cut pair");
      continue;
    }
    phi_w[w] = pi->second;
    ++pair_hits[pi->second];
    rep.mapping[w] = DualCutPairTree::pair_name(pi->second);
  }
  for (std::size_t i = 0; i < pair_hits.size(); ++i)
    if (pair_hits[i] != 1)
      fail("pair {" + g.names[dual.pairs[i][0]] + ", " + g.names[dual.pairs[i][1]] + "} has " +
           std::to_string(pair_hits[i]) + " preimages");

  std::map<std::vector<std::size_t>, std::size_t> star_index;
  for (std::size_t s = 0; s < dual.stars.size(); ++s)
    if (dual.stars[s].size() >= 2) star_index[dual.stars[s]] = s;
  std::vector<int> star_hits(dual.stars.size(), 0);
  auto adj = adjacency(T);
  for (const auto& v : T.v_nodes) {
    std::vector<std::size_t> image;
    bool complete = true;
    for (const auto& w : adj.at(v)) {
      if (T.frontier.count(w)) continue;
      auto it = phi_w.find(w);
      if (it == phi_w.end()) {
        complete = false;
        continue;
      }
      image.push_back(it->second);
    }
    if (image.size() < 2) continue;
    if (!complete) {
      fail("at '" + v + "': some adjacent pair has no image");
      continue;
    }
    std::sort(image.begin(), image.end());
    auto si = star_index.find(image);
    if (si == star_index.end()) {
      fail("at '" + v + "': its pairs do not form a star");
      continue;
    }
    ++star_hits[si->second];
    rep.mapping[v] = DualCutPairTree::star_name(si->second);
  }
  for (const auto& [members, s] : star_index)
    if (star_hits[s] != 1)
      fail("star " + DualCutPairTree::star_name(s) + " has " + std::to_string(star_hits[s]) +
           " preimages");
  return rep;
}

}  // namespace bforge
