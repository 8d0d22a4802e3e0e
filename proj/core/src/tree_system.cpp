#include "bforge/tree_system.hpp"

#include "bforge/errors.hpp"

#include <algorithm>
#include <deque>

namespace bforge {

bool BipartiteTree::is_v(const std::string& id) const {
  return std::binary_search(v_nodes.begin(), v_nodes.end(), id);
}

bool BipartiteTree::is_w(const std::string& id) const {
  return std::binary_search(w_nodes.begin(), w_nodes.end(), id);
}

const TemplateEdgeType& TreeTemplate::edge_type(const std::string& id) const {
  for (const auto& e : edge_types)
    if (e.id == id) return e;
  throw ArgumentError("unknown template edge type '" + id + "'");
}

std::vector<std::string> TreeSystem::neighbors(const std::string& id) const {
  std::vector<std::string> out;
  for (const auto& [v, w] : tree.edges) {
    if (v == id) out.push_back(w);
    if (w == id) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SystemError::SystemError(std::vector<Diagnostic> d)
    : std::runtime_error(d.empty() ? std::string("invalid tree system")
                                   : d.front().code + ": " + d.front().message),
      diagnostics(std::move(d)) {}

Adjacency adjacency(const BipartiteTree& tree) {
  Adjacency adj;
  for (const auto& v : tree.v_nodes) adj[v];
  for (const auto& w : tree.w_nodes) adj[w];
  for (const auto& [v, w] : tree.edges) {
    adj[v].push_back(w);
    adj[w].push_back(v);
  }
  for (auto& [_, list] : adj) std::sort(list.begin(), list.end());
  return adj;
}

std::map<std::string, int> tree_distances(const BipartiteTree& tree, const std::string& from) {
  auto adj = adjacency(tree);
  std::map<std::string, int> dist;
  if (!adj.count(from)) return dist;
  std::deque<std::string> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    auto x = queue.front();
    queue.pop_front();
    for (const auto& y : adj[x])
      if (!dist.count(y)) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
  }
  return dist;
}

std::vector<std::string> tree_path(const BipartiteTree& tree, const std::string& from,
                                   const std::string& to) {
  auto adj = adjacency(tree);
  std::map<std::string, std::string> parent;
  std::deque<std::string> queue{from};
  parent[from] = from;
  while (!queue.empty() && !parent.count(to)) {
    auto x = queue.front();
    queue.pop_front();
    for (const auto& y : adj[x])
      if (!parent.count(y)) {
        parent[y] = x;
        queue.push_back(y);
      }
  }
  if (!parent.count(to)) throw ArgumentError("no tree path " + from + " -> " + to);
  std::vector<std::string> path{to};
  while (path.back() != from) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

void normalize(TreeSystem& s) {
  auto tidy = [](auto& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  tidy(s.tree.v_nodes);
  tidy(s.tree.w_nodes);
  tidy(s.tree.edges);
  if (s.templ)
    std::sort(s.templ->edge_types.begin(), s.templ->edge_types.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
}

void validate_template(const TreeTemplate& t, std::vector<Diagnostic>& out) {
  if (!t.v_types.count(t.base_type))
    out.push_back({"template", "base type '" + t.base_type + "' is not a V-type"});
  for (const auto& [id, space] : t.v_types) {
    auto r = validate_metric(space);
    if (!r.ok()) out.push_back({"template", "V-type '" + id + "' is not a metric space"});
  }
  for (const auto& [id, pts] : t.w_types)
    if (pts[0] == pts[1]) out.push_back({"template", "W-type '" + id + "' has equal points"});
  for (const auto& e : t.edge_types) {
    if (!t.v_types.count(e.v_type) || !t.w_types.count(e.w_type)) {
      out.push_back({"template", "edge type '" + e.id + "' references an unknown type"});
      continue;
    }
    const auto& vs = t.v_types.at(e.v_type);
    if (!vs.contains(e.map[0]) || !vs.contains(e.map[1]) || e.map[0] == e.map[1])
      out.push_back({"template", "edge type '" + e.id + "' has a bad injection"});
    if (e.w_mult < 1) out.push_back({"template", "edge type '" + e.id + "' has w_mult < 1"});
  }
}

}  // namespace

std::vector<Diagnostic> validate_tree_system(const TreeSystem& s) {
  std::vector<Diagnostic> out;
  const auto& T = s.tree;
  for (const auto& v : T.v_nodes)
    if (T.is_w(v)) out.push_back({"not_bipartite", "'" + v + "' is both a V- and a W-node"});
  if (!T.is_v(T.base)) out.push_back({"base", "base '" + T.base + "' is not a V-node"});
  for (const auto& f : T.frontier)
    if (!T.is_w(f)) out.push_back({"frontier", "frontier marker '" + f + "' is not a W-node"});
  for (const auto& [v, w] : T.edges)
    if (!T.is_v(v) || !T.is_w(w))
      out.push_back({"not_bipartite", "edge (" + v + "," + w + ") does not join V to W"});
  if (!out.empty()) return out;

  auto adj = adjacency(T);
  std::size_t nodes = T.v_nodes.size() + T.w_nodes.size();
  auto dist = tree_distances(T, T.base);
  if (dist.size() != nodes) {
    for (const auto& [id, _] : adj)
      if (!dist.count(id)) {
        out.push_back({"disconnected", "'" + id + "' is not reachable from the base"});
        break;
      }
  } else if (T.edges.size() + 1 != nodes) {
    out.push_back({"cycle", "the graph has a cycle (" + std::to_string(T.edges.size()) +
                                " edges on " + std::to_string(nodes) + " nodes)"});
  }
  for (const auto& w : T.w_nodes) {
    std::size_t val = adj[w].size();
    if (!T.frontier.count(w) && val < 2)
      out.push_back({"interior_valence", "interior W-node '" + w + "' has valence " +
                                             std::to_string(val)});
  }

  for (const auto& v : T.v_nodes) {
    auto it = s.constituent.find(v);
    if (it == s.constituent.end()) {
      out.push_back({"missing_space", "no constituent space for '" + v + "'"});
      continue;
    }
    auto r = validate_metric(it->second);
    for (const auto& msg : r.structural) out.push_back({"metric", v + ": " + msg});
    for (const auto& viol : r.violations) {
      std::string w;
      for (const auto& x : viol.witness) w += (w.empty() ? "" : ",") + x;
      out.push_back({"metric", v + ": " + viol.axiom + " violated at (" + w + ")"});
    }
  }
  for (const auto& w : T.w_nodes) {
    auto it = s.cut_pair.find(w);
    if (it == s.cut_pair.end())
      out.push_back({"missing_space", "no cut pair for '" + w + "'"});
    else if (it->second[0] == it->second[1])
      out.push_back({"cut_pair", "cut pair of '" + w + "' has two equal points"});
  }
  for (const auto& [id, _] : s.constituent)
    if (!T.is_v(id)) out.push_back({"extra_space", "space for unknown V-node '" + id + "'"});
  for (const auto& [id, _] : s.cut_pair)
    if (!T.is_w(id)) out.push_back({"extra_space", "cut pair for unknown W-node '" + id + "'"});
  if (!out.empty()) return out;

  for (const auto& e : T.edges) {
    auto it = s.injection.find(e);
    if (it == s.injection.end()) {
      out.push_back({"missing_injection", "no injection for (" + e.first + "," + e.second + ")"});
      continue;
    }
    const auto& space = s.constituent.at(e.first);
    bool inside = space.contains(it->second[0]) && space.contains(it->second[1]);
    if (!inside)
      out.push_back({"unknown_point", "injection (" + e.first + "," + e.second +
                                          ") maps outside M_" + e.first});
    else if (it->second[0] == it->second[1])
      out.push_back({"non_injective", "injection (" + e.first + "," + e.second +
                                          ") sends both points to '" + it->second[0] + "'"});
  }
  for (const auto& [e, _] : s.injection)
    if (!std::binary_search(T.edges.begin(), T.edges.end(), e))
      out.push_back({"extra_injection", "injection for non-edge (" + e.first + "," + e.second + ")"});
  if (!out.empty()) return out;

  for (const auto& v : T.v_nodes) {
    std::vector<Edge> edges;
    for (const auto& w : adj[v]) edges.emplace_back(v, w);
    for (std::size_t i = 0; i < edges.size(); ++i)
      for (std::size_t j = i + 1; j < edges.size(); ++j) {
        const auto& a = s.injection.at(edges[i]);
        const auto& b = s.injection.at(edges[j]);
        int common = 0;
        for (const auto& x : a)
          for (const auto& y : b) common += x == y;
        if (common > 1)
          out.push_back({"image_overlap", "image overlap = " + std::to_string(common) + " at " +
                                              v + " for edges to " + edges[i].second + " and " +
                                              edges[j].second});
      }
  }
  if (s.templ) validate_template(*s.templ, out);
  return out;
}

TreeSystem build_tree_system(TreeSystem raw) {
  normalize(raw);
  auto diags = validate_tree_system(raw);
  if (!diags.empty()) throw SystemError(std::move(diags));
  return raw;
}

TreeSystem truncate(const TreeSystem& s, int k) {
  if (k < 0) throw ArgumentError("truncate: k must be non-negative");
  auto dist = tree_distances(s.tree, s.tree.base);
  auto keep = [&](const std::string& id) {
    auto it = dist.find(id);
    return it != dist.end() && it->second <= 2 * k + 1;
  };
  TreeSystem out;
  out.tree.base = s.tree.base;
  out.templ = s.templ;
  if (out.templ) out.templ->depth = std::min(out.templ->depth, k);
  for (const auto& v : s.tree.v_nodes)
    if (keep(v)) {
      out.tree.v_nodes.push_back(v);
      out.constituent[v] = s.constituent.at(v);
    }
  for (const auto& w : s.tree.w_nodes)
    if (keep(w)) {
      out.tree.w_nodes.push_back(w);
      out.cut_pair[w] = s.cut_pair.at(w);
      if (dist[w] == 2 * k + 1 || s.tree.frontier.count(w)) out.tree.frontier.insert(w);
    }
  for (const auto& e : s.tree.edges)
    if (keep(e.first) && keep(e.second)) {
      out.tree.edges.push_back(e);
      out.injection[e] = s.injection.at(e);
    }
  for (const auto& [id, t] : s.node_type)
    if (keep(id)) out.node_type[id] = t;
  for (const auto& [id, t] : s.entered_via)
    if (keep(id)) out.entered_via[id] = t;
  normalize(out);
  return out;
}

TreeSystem system_at_depth(const TreeSystem& s, int k) {
  if (s.templ) {
    int deepest = 0;
    for (const auto& [_, d] : tree_distances(s.tree, s.tree.base)) deepest = std::max(deepest, d);
    if (deepest < 2 * k + 1) return unfold_template(*s.templ, k, s.tree.base);
  }
  return truncate(s, k);
}

PairCollection peripheral_collection(const TreeSystem& s, const std::string& v,
                                     std::vector<Edge>* edges) {
  PairCollection out;
  const auto& space = s.constituent.at(v);
  auto lo = std::lower_bound(s.tree.edges.begin(), s.tree.edges.end(), Edge{v, std::string()});
  for (auto it = lo; it != s.tree.edges.end() && it->first == v; ++it) {
    const auto& img = s.injection.at(*it);
    out.emplace_back(space.index(img[0]), space.index(img[1]));
    if (edges) edges->push_back(*it);
  }
  return out;
}

namespace {

FiniteMetricSpace two_point(const std::array<std::string, 2>& pts, const Rational& d) {
  FiniteMetricSpace m;
  m.points = {pts[0], pts[1]};
  m.dist = {{Rational(0), d}, {d, Rational(0)}};
  return m;
}

}  // namespace

MetricAssignment assign_shrinking(const TreeSystem& s) {
  MetricAssignment out;
  auto adj = adjacency(s.tree);
  const auto& base = s.tree.base;
  const auto& m0 = s.constituent.at(base);
  if (m0.size() < 2) {
    if (!adj[base].empty())
      throw DomainError("assign_shrinking: M_" + base + " has fewer than 2 points");
    out.spaces[base] = m0;
    return out;
  }
  {
    FiniteMetricSpace scaled = m0;
    Rational factor = Rational(1, 2) / diameter(m0);
    for (auto& row : scaled.dist)
      for (auto& x : row) x *= factor;
    out.spaces[base] = std::move(scaled);
  }
  std::deque<std::string> queue{base};
  std::set<std::string> seen{base};
  while (!queue.empty()) {
    auto vp = queue.front();
    queue.pop_front();
    const auto& dvp = out.spaces.at(vp);
    for (const auto& w : adj[vp]) {
      if (seen.count(w)) continue;
      seen.insert(w);
      const auto& img = s.injection.at({vp, w});
      Rational K = dvp.d(dvp.index(img[0]), dvp.index(img[1]));
      out.spaces[w] = two_point(s.cut_pair.at(w), K);
      for (const auto& v : adj[w]) {
        if (seen.count(v)) continue;
        seen.insert(v);
        const auto& mv = s.constituent.at(v);
        if (mv.size() < 2)
          throw DomainError("assign_shrinking: M_" + v + " has fewer than 2 points");
        auto coll = peripheral_collection(s, v);
        const auto& im = s.injection.at({v, w});
        PointPair anchor{mv.index(im[0]), mv.index(im[1])};
        out.spaces[v] = halver_rescale(mv, coll, anchor, K);
        queue.push_back(v);
      }
    }
  }
  return out;
}

std::vector<std::string> compatibility_violations(const TreeSystem& s,
                                                  const MetricAssignment& m) {
  std::vector<std::string> out;
  for (const auto& e : s.tree.edges) {
    auto vi = m.spaces.find(e.first);
    auto wi = m.spaces.find(e.second);
    if (vi == m.spaces.end() || wi == m.spaces.end()) {
      out.push_back("(" + e.first + "," + e.second + "): metric missing");
      continue;
    }
    const auto& img = s.injection.at(e);
    const auto& pts = s.cut_pair.at(e.second);
    const auto& dv = vi->second;
    const auto& dw = wi->second;
    if (!dw.contains(pts[0]) || !dw.contains(pts[1]) || !dv.contains(img[0]) ||
        !dv.contains(img[1])) {
      out.push_back("(" + e.first + "," + e.second + "): point sets differ");
      continue;
    }
    if (dv.d(dv.index(img[0]), dv.index(img[1])) != dw.d(dw.index(pts[0]), dw.index(pts[1])))
      out.push_back("(" + e.first + "," + e.second + "): i_e is not an isometry");
  }
  return out;
}

bool is_connected_subtree(const BipartiteTree& tree, const std::set<std::string>& nodes) {
  if (nodes.empty()) return false;
  for (const auto& x : nodes)
    if (!tree.has(x)) return false;
  auto adj = adjacency(tree);
  std::set<std::string> seen{*nodes.begin()};
  std::deque<std::string> queue{*nodes.begin()};
  while (!queue.empty()) {
    auto x = queue.front();
    queue.pop_front();
    for (const auto& y : adj[x])
      if (nodes.count(y) && seen.insert(y).second) queue.push_back(y);
  }
  return seen.size() == nodes.size();
}

FrontierData frontier_data(const TreeSystem& s, const std::set<std::string>& S) {
  if (!is_connected_subtree(s.tree, S))
    throw ArgumentError("frontier_data: subtree is empty or disconnected");
  auto adj = adjacency(s.tree);
  FrontierData out;
  for (const auto& e : s.tree.edges) {
    bool vin = S.count(e.first) > 0, win = S.count(e.second) > 0;
    if (vin == win) continue;
    out.edges.push_back(e);
    if (win) {
      const auto& p = s.cut_pair.at(e.second);
      out.pairs.push_back({PointRef{e.second, p[0]}, PointRef{e.second, p[1]}});
    } else {
      const auto& img = s.injection.at(e);
      out.pairs.push_back({PointRef{e.first, img[0]}, PointRef{e.first, img[1]}});
    }
    const std::string& outside = vin ? e.second : e.first;
    std::set<std::string> comp{outside};
    std::deque<std::string> queue{outside};
    while (!queue.empty()) {
      auto x = queue.front();
      queue.pop_front();
      for (const auto& y : adj[x])
        if (!S.count(y) && comp.insert(y).second) queue.push_back(y);
    }
    out.branches.emplace_back(comp.begin(), comp.end());
  }
  return out;
}

std::string child_w_name(const std::string& v, const std::string& edge_type) {
  return v + "/" + edge_type;
}

std::string child_v_name(const std::string& w, const std::string& edge_type, int copy) {
  return w + "/" + edge_type + ":" + std::to_string(copy);
}

namespace {

void add_w_children(TreeSystem& s, const TreeTemplate& t, const std::string& v) {
  const auto& type = s.node_type.at(v);
  auto via = s.entered_via.find(v);
  for (const auto& e : t.edge_types) {
    if (e.v_type != type) continue;
    if (via != s.entered_via.end() && via->second == e.id) continue;
    auto w = child_w_name(v, e.id);
    s.tree.w_nodes.push_back(w);
    s.tree.frontier.insert(w);
    s.tree.edges.emplace_back(v, w);
    s.injection[{v, w}] = e.map;
    s.cut_pair[w] = t.w_types.at(e.w_type);
    s.node_type[w] = e.w_type;
    s.entered_via[w] = e.id;
  }
}

void expand_raw(TreeSystem& s, const TreeTemplate& t, const std::string& w) {
  if (!s.tree.frontier.count(w)) throw ArgumentError("'" + w + "' is not a frontier W-node");
  const auto& type = s.node_type.at(w);
  const auto& in = s.entered_via.at(w);
  s.tree.frontier.erase(w);
  for (const auto& e : t.edge_types) {
    if (e.w_type != type) continue;
    for (int j = 0; j < e.w_mult; ++j) {
      if (e.id == in && j == 0) continue;
      auto v = child_v_name(w, e.id, j);
      s.tree.v_nodes.push_back(v);
      s.tree.edges.emplace_back(v, w);
      s.injection[{v, w}] = e.map;
      s.constituent[v] = t.v_types.at(e.v_type);
      s.node_type[v] = e.v_type;
      s.entered_via[v] = e.id;
      add_w_children(s, t, v);
    }
  }
}

}  // namespace

TreeSystem unfold_template(const TreeTemplate& t, int depth, const std::string& base) {
  if (depth < 0) throw ArgumentError("unfold_template: negative depth");
  {
    std::vector<Diagnostic> d;
    validate_template(t, d);
    if (!d.empty()) throw SystemError(std::move(d));
  }
  TreeSystem s;
  s.templ = t;
  s.templ->depth = depth;
  s.tree.base = base;
  s.tree.v_nodes.push_back(base);
  s.constituent[base] = t.v_types.at(t.base_type);
  s.node_type[base] = t.base_type;
  add_w_children(s, t, base);
  for (int level = 0; level < depth; ++level) {
    std::vector<std::string> current(s.tree.frontier.begin(), s.tree.frontier.end());
    for (const auto& w : current) expand_raw(s, t, w);
  }
  return build_tree_system(std::move(s));
}

void expand_frontier(TreeSystem& s, const std::string& w) {
  if (!s.templ) throw ArgumentError("expand_frontier: instance has no template");
  expand_raw(s, *s.templ, w);
  normalize(s);
}

}  // namespace bforge
