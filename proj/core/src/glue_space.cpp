#include "bforge/glue_space.hpp"

#include "bforge/errors.hpp"
#include "bforge/parallel.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace bforge {

std::size_t GluedSpace::cls(const std::string& vertex, const std::string& point) const {
  auto it = class_of.find({vertex, point});
  if (it == class_of.end())
    throw ArgumentError("no glued class for (" + vertex + "," + point + ")");
  return it->second;
}

std::size_t GluedSpace::find(const std::string& name) const {
  auto it = std::lower_bound(classes.begin(), classes.end(), name,
                             [](const GluedClass& c, const std::string& n) { return c.name < n; });
  if (it == classes.end() || it->name != name) throw ArgumentError("no class named '" + name + "'");
  return static_cast<std::size_t>(it - classes.begin());
}

std::vector<std::size_t> GluedSpace::vertex_classes(const std::string& u) const {
  std::vector<std::size_t> out;
  if (system->tree.is_v(u)) {
    for (const auto& p : system->constituent.at(u).points) out.push_back(cls(u, p));
  } else {
    for (const auto& p : system->cut_pair.at(u)) out.push_back(cls(u, p));
  }
  return out;
}

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

// Integer view of the tree used by the all-pairs program.
struct Link {
  int to;
  int a, b;  // local indices in the V-end's space of the two images
};

struct IndexedTree {
  std::vector<std::string> ids;
  std::vector<bool> is_v;
  std::vector<const FiniteMetricSpace*> space;  // V only
  std::vector<std::vector<Link>> adj;
  std::map<std::string, int> index;
};

IndexedTree index_tree(const TreeSystem& s, const MetricAssignment& m) {
  IndexedTree t;
  for (const auto& v : s.tree.v_nodes) {
    t.index[v] = static_cast<int>(t.ids.size());
    t.ids.push_back(v);
    t.is_v.push_back(true);
    t.space.push_back(&m.spaces.at(v));
  }
  for (const auto& w : s.tree.w_nodes) {
    t.index[w] = static_cast<int>(t.ids.size());
    t.ids.push_back(w);
    t.is_v.push_back(false);
    t.space.push_back(nullptr);
  }
  t.adj.resize(t.ids.size());
  for (const auto& e : s.tree.edges) {
    int vi = t.index.at(e.first), wi = t.index.at(e.second);
    const auto& sp = *t.space[vi];
    const auto& img = s.injection.at(e);
    int a = static_cast<int>(sp.index(img[0])), b = static_cast<int>(sp.index(img[1]));
    t.adj[vi].push_back({wi, a, b});
    t.adj[wi].push_back({vi, a, b});
  }
  return t;
}

}  // namespace

GluedSpace glue(const TreeSystem& system, const MetricAssignment& metrics) {
  auto bad = compatibility_violations(system, metrics);
  if (!bad.empty()) throw ArgumentError("glue: incompatible metrics at " + bad.front());

  GluedSpace g;
  g.system = std::make_shared<TreeSystem>(system);
  g.metrics = std::make_shared<MetricAssignment>(metrics);

  std::vector<PointRef> refs;
  std::map<PointRef, std::size_t> ref_index;
  auto add_ref = [&](const std::string& u, const std::string& p) {
    ref_index.emplace(PointRef{u, p}, refs.size());
    refs.emplace_back(u, p);
  };
  for (const auto& v : system.tree.v_nodes)
    for (const auto& p : system.constituent.at(v).points) add_ref(v, p);
  for (const auto& w : system.tree.w_nodes)
    for (const auto& p : system.cut_pair.at(w)) add_ref(w, p);
  UnionFind uf(refs.size());
  for (const auto& e : system.tree.edges) {
    const auto& pts = system.cut_pair.at(e.second);
    const auto& img = system.injection.at(e);
    for (int i = 0; i < 2; ++i)
      uf.unite(ref_index.at({e.second, pts[i]}), ref_index.at({e.first, img[i]}));
  }
  std::map<std::size_t, std::vector<PointRef>> groups;
  for (std::size_t i = 0; i < refs.size(); ++i) groups[uf.find(i)].push_back(refs[i]);
  for (auto& [_, members] : groups) {
    std::sort(members.begin(), members.end());
    g.classes.push_back({members.front().first + ":" + members.front().second, members});
  }
  std::sort(g.classes.begin(), g.classes.end(),
            [](const GluedClass& a, const GluedClass& b) { return a.name < b.name; });
  for (std::size_t c = 0; c < g.classes.size(); ++c)
    for (const auto& m : g.classes[c].members) g.class_of[m] = c;

  const auto T = index_tree(system, metrics);
  const std::size_t n = g.classes.size();
  // Local points of every V-node as class indices.
  std::vector<std::vector<std::size_t>> local_class(T.ids.size());
  for (std::size_t u = 0; u < T.ids.size(); ++u)
    if (T.is_v[u])
      for (const auto& p : T.space[u]->points) local_class[u].push_back(g.class_of.at({T.ids[u], p}));

  g.dist.assign(n, std::vector<Rational>(n));
  parallel_for(n, [&](std::size_t src) {
    // Source: the first V-member of the class.
    int root = -1;
    std::size_t root_pt = 0;
    for (const auto& m : g.classes[src].members) {
      auto it = T.index.find(m.first);
      if (T.is_v[it->second]) {
        root = it->second;
        root_pt = T.space[root]->index(m.second);
        break;
      }
    }
    std::vector<std::vector<Rational>> val(T.ids.size());
    std::vector<std::array<Rational, 2>> wval(T.ids.size());
    std::vector<int> parent(T.ids.size(), -2);
    {
      const auto& sp = *T.space[root];
      val[root].resize(sp.size());
      for (std::size_t z = 0; z < sp.size(); ++z) val[root][z] = sp.d(root_pt, z);
    }
    std::deque<int> queue{root};
    parent[root] = -1;
    std::vector<bool> seen(n, false);
    auto& row = g.dist[src];
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      if (T.is_v[u]) {
        for (std::size_t z = 0; z < val[u].size(); ++z) {
          std::size_t c = local_class[u][z];
          if (!seen[c] || val[u][z] < row[c]) row[c] = val[u][z];
          seen[c] = true;
        }
        for (const auto& l : T.adj[u]) {
          if (l.to == parent[u]) continue;
          parent[l.to] = u;
          wval[l.to] = {val[u][l.a], val[u][l.b]};
          queue.push_back(l.to);
        }
      } else {
        for (const auto& l : T.adj[u]) {
          if (l.to == parent[u]) continue;
          parent[l.to] = u;
          const auto& sp = *T.space[l.to];
          auto& out = val[l.to];
          out.resize(sp.size());
          for (std::size_t z = 0; z < sp.size(); ++z) {
            Rational r0 = wval[u][0] + sp.d(l.a, z);
            Rational r1 = wval[u][1] + sp.d(l.b, z);
            out[z] = r0 < r1 ? r0 : r1;
          }
          queue.push_back(l.to);
        }
        val[u].clear();
      }
    }
    row[src] = 0;
  });
  return g;
}

std::vector<std::string> isometry_violations(const GluedSpace& g) {
  std::vector<std::string> out;
  for (const auto& v : g.system->tree.v_nodes) {
    const auto& sp = g.metrics->spaces.at(v);
    auto cl = g.vertex_classes(v);
    for (std::size_t i = 0; i < sp.size(); ++i)
      for (std::size_t j = 0; j < sp.size(); ++j)
        if (g.dist[cl[i]][cl[j]] != sp.d(i, j)) {
          out.push_back(v + ": glued d(" + sp.points[i] + "," + sp.points[j] + ") = " +
                        to_string(g.dist[cl[i]][cl[j]]) + " but d_v = " + to_string(sp.d(i, j)));
          i = j = sp.size();
        }
  }
  return out;
}

std::vector<std::string> shrinking_violations(const GluedSpace& g) {
  std::vector<std::string> out;
  auto dist = tree_distances(g.system->tree, g.system->tree.base);
  for (const auto& v : g.system->tree.v_nodes) {
    int k = dist.at(v) / 2;
    Rational bound = pow2(-k), diam(0);
    auto cl = g.vertex_classes(v);
    for (auto a : cl)
      for (auto b : cl)
        if (g.dist[a][b] > diam) diam = g.dist[a][b];
    if (diam > bound)
      out.push_back(v + ": diameter " + to_string(diam) + " exceeds " + to_string(bound));
  }
  return out;
}

std::vector<std::vector<std::size_t>> class_adjacency(const GluedSpace& g) {
  std::vector<std::set<std::size_t>> adj(g.size());
  for (const auto& v : g.system->tree.v_nodes) {
    auto cl = g.vertex_classes(v);
    for (auto a : cl)
      for (auto b : cl)
        if (a != b) adj[a].insert(b);
  }
  std::vector<std::vector<std::size_t>> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i].assign(adj[i].begin(), adj[i].end());
  return out;
}

// ---------------------------------------------------------------- ends

std::string EndDescriptor::id() const {
  std::string s = ray.empty() ? std::string("?") : ray.back();
  if (!period.empty()) {
    s += "~";
    for (std::size_t i = 0; i < period.size(); ++i)
      s += (i ? "," : "") + period[i].via + "." + period[i].port;
  }
  return s;
}

std::string kind_name(EndDescriptor::Kind k) {
  switch (k) {
    case EndDescriptor::Kind::Redundant: return "redundant";
    case EndDescriptor::Kind::NonRedundant: return "non_redundant";
    default: return "undecided_at_depth";
  }
}

namespace {

// Steps available at a W-node of type `w_type` entered through `in`.
std::vector<TemplateStep> steps_from(const TreeTemplate& t, const std::string& w_type,
                                     const std::string& in) {
  std::vector<TemplateStep> out;
  for (const auto& down : t.edge_types) {
    if (down.w_type != w_type) continue;
    if (down.id == in && down.w_mult < 2) continue;
    for (const auto& up : t.edge_types)
      if (up.v_type == down.v_type && up.id != down.id) out.push_back({down.id, up.id});
  }
  return out;
}

bool is_primitive(const std::vector<TemplateStep>& p) {
  const std::size_t n = p.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d) continue;
    bool repeats = true;
    for (std::size_t i = d; i < n && repeats; ++i) repeats = p[i] == p[i - d];
    if (repeats) return false;
  }
  return true;
}

void collect_cycles(const TreeTemplate& t, const std::string& start_type,
                    const std::string& start_in, const std::string& type, const std::string& in,
                    int max_len, std::vector<TemplateStep>& cur,
                    std::vector<std::vector<TemplateStep>>& out) {
  if (!cur.empty() && type == start_type && in == start_in && is_primitive(cur)) out.push_back(cur);
  if (static_cast<int>(cur.size()) == max_len) return;
  for (const auto& s : steps_from(t, type, in)) {
    const auto& up = t.edge_type(s.port);
    cur.push_back(s);
    collect_cycles(t, start_type, start_in, up.w_type, up.id, max_len, cur, out);
    cur.pop_back();
  }
}

}  // namespace

EndDescriptor::Kind classify_period(const TreeTemplate& t, const std::string& w_type,
                                    const std::vector<TemplateStep>& period,
                                    std::string* witness) {
  // phi[i]: where the i-th point of the starting pair sits after one period.
  std::array<int, 2> phi{0, 1};
  for (const auto& s : period) {
    const auto& down = t.edge_type(s.via);
    const auto& up = t.edge_type(s.port);
    for (auto& x : phi) {
      if (x < 0) continue;
      const auto& vpt = down.map[x];
      x = up.map[0] == vpt ? 0 : (up.map[1] == vpt ? 1 : -1);
    }
  }
  for (int i = 0; i < 2; ++i) {
    int j = phi[i];
    bool periodic = j == i || (j >= 0 && phi[j] == i);
    if (periodic) {
      if (witness) *witness = w_type + "." + t.w_types.at(w_type)[i];
      return EndDescriptor::Kind::Redundant;
    }
  }
  return EndDescriptor::Kind::NonRedundant;
}

std::vector<EndDescriptor> enumerate_ends(const TreeSystem& system, int k, int max_period) {
  TreeSystem S;
  int have = 0;
  for (const auto& [_, d] : tree_distances(system.tree, system.tree.base)) have = std::max(have, d);
  if (system.templ && have < 2 * k + 1)
    S = unfold_template(*system.templ, k, system.tree.base);
  else
    S = truncate(system, k);
  auto dist = tree_distances(S.tree, S.tree.base);
  std::vector<EndDescriptor> out;
  for (const auto& f : S.tree.frontier) {
    if (dist.at(f) != 2 * k + 1) continue;
    EndDescriptor base;
    base.ray = tree_path(S.tree, S.tree.base, f);
    base.depth = k;
    if (!S.templ) {
      out.push_back(base);
      continue;
    }
    const auto& type = S.node_type.at(f);
    const auto& in = S.entered_via.at(f);
    std::vector<std::vector<TemplateStep>> cycles;
    std::vector<TemplateStep> cur;
    collect_cycles(*S.templ, type, in, type, in, max_period, cur, cycles);
    std::sort(cycles.begin(), cycles.end());
    for (auto& c : cycles) {
      EndDescriptor e = base;
      e.period = c;
      e.kind = classify_period(*S.templ, type, c, &e.witness);
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<std::string> continue_ray(const TreeSystem& system, const EndDescriptor& end,
                                      int steps) {
  if (end.period.empty()) throw ArgumentError("continue_ray: end has no periodic continuation");
  std::vector<std::string> out;
  std::string w = end.ray.back();
  std::string in = system.entered_via.at(w);
  for (int i = 0; i < steps; ++i) {
    const auto& s = end.period[i % end.period.size()];
    int copy = s.via == in ? 1 : 0;
    auto v = child_v_name(w, s.via, copy);
    w = child_w_name(v, s.port);
    in = s.port;
    out.push_back(v);
    out.push_back(w);
  }
  return out;
}

std::vector<std::string> extend_along(TreeSystem& system, const EndDescriptor& end, int steps) {
  auto next = continue_ray(system, end, steps);
  std::vector<std::string> ray = end.ray;
  for (std::size_t i = 0; i < next.size(); i += 2) {
    const auto& w = ray.back();
    if (system.tree.frontier.count(w)) expand_frontier(system, w);
    ray.push_back(next[i]);
    ray.push_back(next[i + 1]);
  }
  return ray;
}

// ---------------------------------------------------------------- completion

Rational minimal_completion_eps(int k) { return pow2(-k + 2); }

CompletionApprox approximate_completion(std::shared_ptr<const GluedSpace> glued, int k,
                                        const Rational& eps) {
  auto ends = enumerate_ends(*glued->system, k);
  return approximate_completion(std::move(glued), k, eps, ends);
}

CompletionApprox approximate_completion(std::shared_ptr<const GluedSpace> glued, int k,
                                        const Rational& eps,
                                        const std::vector<EndDescriptor>& ends) {
  if (eps <= minimal_completion_eps(k))
    throw DepthError("approximate_completion: eps must exceed 2^(-k+2) = " +
                     to_string(minimal_completion_eps(k)) + " at depth " + std::to_string(k));
  const auto& g = *glued;
  CompletionApprox c;
  c.base = glued;
  c.depth = k;
  c.eps = eps;
  c.error_bound = pow2(-k + 1);
  c.end_error_bound = pow2(-k + 2);
  for (const auto& e : ends) {
    if (e.kind == EndDescriptor::Kind::Redundant) continue;
    const auto& f = e.ray.back();
    if (!g.system->tree.is_w(f))
      throw DepthError("approximate_completion: glued space does not reach " + f);
    c.end_points.push_back(e);
    c.approx_class.push_back(g.cls(f, g.system->cut_pair.at(f)[0]));
  }
  std::map<std::string, std::size_t> group_of;
  for (std::size_t i = 0; i < c.end_points.size(); ++i) {
    const auto& f = c.end_points[i].ray.back();
    auto it = group_of.find(f);
    if (it == group_of.end()) {
      it = group_of.emplace(f, c.group_frontier.size()).first;
      c.group_frontier.push_back(f);
      c.group_class.push_back(c.approx_class[i]);
    }
    c.end_group.push_back(it->second);
  }
  std::vector<std::vector<std::string>> group_ray(c.group_frontier.size());
  for (std::size_t i = 0; i < c.end_points.size(); ++i)
    if (group_ray[c.end_group[i]].empty()) group_ray[c.end_group[i]] = c.end_points[i].ray;

  const std::size_t m = c.group_frontier.size();
  c.dist_to_ends.assign(g.size(), std::vector<Rational>(m));
  for (std::size_t x = 0; x < g.size(); ++x)
    for (std::size_t j = 0; j < m; ++j) c.dist_to_ends[x][j] = g.dist[x][c.group_class[j]];
  c.end_distance.assign(m, std::vector<Rational>(m));
  c.end_lower_bound.assign(m, std::vector<Rational>(m));
  std::map<std::string, std::vector<std::size_t>> classes_at;
  auto classes = [&](const std::string& u) -> const std::vector<std::size_t>& {
    auto it = classes_at.find(u);
    if (it == classes_at.end()) it = classes_at.emplace(u, g.vertex_classes(u)).first;
    return it->second;
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      c.end_distance[i][j] = g.dist[c.group_class[i]][c.group_class[j]];
      if (i == j) continue;
      const auto& r1 = group_ray[i];
      const auto& r2 = group_ray[j];
      std::size_t common = 0;
      while (common < r1.size() && common < r2.size() && r1[common] == r2[common]) ++common;
      Rational best(0);
      // W-nodes sit at odd ray positions; only those past the branch point count.
      for (std::size_t p = common | 1; p < r1.size() && p < r2.size(); p += 2) {
        const auto& a = classes(r1[p]);
        const auto& b = classes(r2[p]);
        Rational lo = g.dist[a[0]][b[0]];
        for (auto x : a)
          for (auto y : b)
            if (g.dist[x][y] < lo) lo = g.dist[x][y];
        if (lo > best) best = lo;
      }
      c.end_lower_bound[i][j] = best;
    }
  // Greedy net at radius eps - 2^(-k+1); each end is within the tail bound of
  // its approximating class, so it ends up within eps of the net.
  Rational r = eps - c.error_bound;
  for (std::size_t x = 0; x < g.size(); ++x) {
    bool covered = false;
    for (auto y : c.net)
      if (g.dist[x][y] <= r) {
        covered = true;
        break;
      }
    if (!covered) c.net.push_back(x);
  }
  return c;
}

// ---------------------------------------------------------------- splits

namespace {

std::vector<int> component_labels(const std::vector<std::vector<std::size_t>>& adj,
                                  const std::set<std::size_t>& removed, int* count) {
  std::vector<int> label(adj.size(), -1);
  int next = 0;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (removed.count(s) || label[s] >= 0) continue;
    std::deque<std::size_t> queue{s};
    label[s] = next;
    while (!queue.empty()) {
      auto x = queue.front();
      queue.pop_front();
      for (auto y : adj[x])
        if (!removed.count(y) && label[y] < 0) {
          label[y] = next;
          queue.push_back(y);
        }
    }
    ++next;
  }
  *count = next;
  return label;
}

void require_interior(const GluedSpace& g, const std::string& w) {
  if (!g.system->tree.is_w(w)) throw ArgumentError("split_at_pair: '" + w + "' is not a W-node");
  if (g.system->tree.frontier.count(w))
    throw DepthError("split_at_pair: '" + w +
                     "' is a frontier W-node; its component structure is not determined");
}

}  // namespace

SplitResult split_at_pair(const GluedSpace& g, const std::string& w) {
  require_interior(g, w);
  auto adj = class_adjacency(g);
  auto pair = g.vertex_classes(w);
  std::set<std::size_t> removed(pair.begin(), pair.end());
  int count = 0;
  auto label = component_labels(adj, removed, &count);
  SplitResult r;
  r.components.resize(count);
  for (std::size_t x = 0; x < g.size(); ++x)
    if (label[x] >= 0) r.components[label[x]].push_back(x);
  r.end_components.resize(count);
  return r;
}

SplitResult split_at_pair(const CompletionApprox& c, const std::string& w) {
  const auto& g = *c.base;
  auto r = split_at_pair(g, w);
  auto pair = g.vertex_classes(w);
  std::vector<int> where(g.size(), -1);
  for (std::size_t i = 0; i < r.components.size(); ++i)
    for (auto x : r.components[i]) where[x] = static_cast<int>(i);
  for (std::size_t j = 0; j < c.end_points.size(); ++j) {
    const auto& f = c.end_points[j].ray.back();
    auto fc = g.vertex_classes(f);
    std::size_t rep = where[fc[0]] >= 0 ? fc[0] : fc[1];
    r.end_components[where[rep]].push_back(j);
  }
  return r;
}

std::vector<std::string> split_side_violations(const GluedSpace& g, const std::string& w) {
  auto r = split_at_pair(g, w);
  std::vector<int> where(g.size(), -1);
  for (std::size_t i = 0; i < r.components.size(); ++i)
    for (auto x : r.components[i]) where[x] = static_cast<int>(i);
  const auto& T = g.system->tree;
  auto adj = adjacency(T);
  auto pair = g.vertex_classes(w);
  auto unshared = [&](const std::string& u) {
    std::vector<std::size_t> out;
    for (auto x : g.vertex_classes(u))
      if (x != pair[0] && x != pair[1]) out.push_back(x);
    return out;
  };
  // Component of each branch, read off from the neighbouring V-node.
  std::map<std::string, int> branch_component;
  std::vector<std::string> out;
  for (const auto& v : adj[w]) {
    auto pts = unshared(v);
    branch_component[v] = pts.empty() ? -1 : where[pts.front()];
  }
  for (const auto& [a, ca] : branch_component)
    for (const auto& [b, cb] : branch_component)
      if (a < b && ca >= 0 && ca == cb)
        out.push_back("branches through " + a + " and " + b + " share a component");
  for (const auto& w2 : T.w_nodes) {
    if (w2 == w || T.frontier.count(w2)) continue;
    auto path = tree_path(T, w, w2);
    int expect = branch_component.at(path[1]);
    for (auto x : unshared(w2))
      if (where[x] != expect)
        out.push_back(w2 + ": point " + g.classes[x].name + " lies outside the component of its side");
  }
  return out;
}

}  // namespace bforge
