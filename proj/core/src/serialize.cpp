#include "bforge/serialize.hpp"

#include "bforge/errors.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace bforge {

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& what) {
  throw StructuralError(where + ": " + what);
}

const Json& field(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) schema(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema(where, "missing field '" + key + "'");
  return *it;
}

std::string str(const Json& j, const std::string& where) {
  if (!j.is_string()) schema(where, "expected a string");
  return j.get<std::string>();
}

int integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) schema(where, "expected an integer");
  return j.get<int>();
}

std::vector<std::string> str_list(const Json& j, const std::string& where) {
  if (!j.is_array()) schema(where, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(str(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::array<std::string, 2> str_pair(const Json& j, const std::string& where) {
  auto l = str_list(j, where);
  if (l.size() != 2) schema(where, "expected exactly two entries");
  return {l[0], l[1]};
}

const Json& object(const Json& j, const std::string& where) {
  if (!j.is_object()) schema(where, "expected an object");
  return j;
}

}  // namespace

Json rational_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number_float()) schema(where, "binary floats are not accepted; write \"p/q\"");
  if (!j.is_string()) schema(where, "expected a rational \"p/q\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const StructuralError& e) {
    schema(where, e.what());
  }
}

// ---------------------------------------------------------------- metrics

Json to_json(const FiniteMetricSpace& m) {
  Json j;
  j["points"] = m.points;
  Json rows = Json::array();
  for (const auto& row : m.dist) {
    Json r = Json::array();
    for (const auto& d : row) r.push_back(rational_json(d));
    rows.push_back(r);
  }
  j["dist"] = rows;
  if (!m.marked_pairs.empty()) {
    Json p = Json::array();
    for (const auto& [a, b] : m.marked_pairs) p.push_back({a, b});
    j["marked_pairs"] = p;
  }
  return j;
}

FiniteMetricSpace metric_from_json(const Json& j, const std::string& where) {
  FiniteMetricSpace m;
  m.points = str_list(field(j, "points", where), where + ".points");
  const auto& rows = field(j, "dist", where);
  if (!rows.is_array()) schema(where + ".dist", "expected an array of rows");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::string rw = where + ".dist[" + std::to_string(i) + "]";
    if (!rows[i].is_array()) schema(rw, "expected a row");
    std::vector<Rational> row;
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      std::string at = rw + "[" + std::to_string(k) + "]";
      auto d = rational_from_json(rows[i][k], at);
      if (d < 0) schema(at, "negative distance " + to_string(d));
      row.push_back(d);
    }
    m.dist.push_back(std::move(row));
  }
  if (j.contains("marked_pairs")) {
    const auto& p = j["marked_pairs"];
    for (std::size_t i = 0; i < p.size(); ++i) {
      std::string at = where + ".marked_pairs[" + std::to_string(i) + "]";
      if (!p[i].is_array() || p[i].size() != 2) schema(at, "expected [i, j]");
      m.marked_pairs.push_back({static_cast<std::size_t>(integer(p[i][0], at)),
                                static_cast<std::size_t>(integer(p[i][1], at))});
    }
  }
  return m;
}

// ---------------------------------------------------------------- templates

Json to_json(const TreeTemplate& t) {
  Json j;
  for (const auto& [id, m] : t.v_types) j["v_types"][id] = to_json(m);
  for (const auto& [id, p] : t.w_types) j["w_types"][id] = p;
  j["edge_types"] = Json::array();
  for (const auto& e : t.edge_types)
    j["edge_types"].push_back(
        {{"id", e.id}, {"v_type", e.v_type}, {"w_type", e.w_type}, {"map", e.map}, {"w_mult", e.w_mult}});
  j["base_type"] = t.base_type;
  j["depth"] = t.depth;
  return j;
}

TreeTemplate template_from_json(const Json& j, const std::string& where) {
  TreeTemplate t;
  for (const auto& [id, m] : object(field(j, "v_types", where), where + ".v_types").items())
    t.v_types[id] = metric_from_json(m, where + ".v_types." + id);
  for (const auto& [id, p] : object(field(j, "w_types", where), where + ".w_types").items())
    t.w_types[id] = str_pair(p, where + ".w_types." + id);
  const auto& et = field(j, "edge_types", where);
  if (!et.is_array()) schema(where + ".edge_types", "expected an array");
  for (std::size_t i = 0; i < et.size(); ++i) {
    std::string at = where + ".edge_types[" + std::to_string(i) + "]";
    TemplateEdgeType e;
    e.id = str(field(et[i], "id", at), at + ".id");
    e.v_type = str(field(et[i], "v_type", at), at + ".v_type");
    e.w_type = str(field(et[i], "w_type", at), at + ".w_type");
    e.map = str_pair(field(et[i], "map", at), at + ".map");
    e.w_mult = et[i].contains("w_mult") ? integer(et[i]["w_mult"], at + ".w_mult") : 1;
    t.edge_types.push_back(e);
  }
  std::sort(t.edge_types.begin(), t.edge_types.end(),
            [](const TemplateEdgeType& a, const TemplateEdgeType& b) { return a.id < b.id; });
  t.base_type = str(field(j, "base_type", where), where + ".base_type");
  t.depth = integer(field(j, "depth", where), where + ".depth");
  if (t.depth < 0) schema(where + ".depth", "must be >= 0");
  return t;
}

// ---------------------------------------------------------------- tree systems

Json to_json(const TreeSystem& s) {
  Json j;
  Json tree;
  tree["base"] = s.tree.base;
  tree["v_nodes"] = s.tree.v_nodes;
  tree["w_nodes"] = s.tree.w_nodes;
  tree["frontier"] = std::vector<std::string>(s.tree.frontier.begin(), s.tree.frontier.end());
  tree["edges"] = Json::array();
  for (const auto& [v, w] : s.tree.edges) tree["edges"].push_back({v, w});
  j["tree"] = tree;
  j["spaces"] = Json::object();
  for (const auto& [v, m] : s.constituent) j["spaces"][v] = to_json(m);
  j["cut_pairs"] = Json::object();
  for (const auto& [w, p] : s.cut_pair) j["cut_pairs"][w] = p;
  j["injections"] = Json::object();
  for (const auto& [e, img] : s.injection) j["injections"][e.first][e.second] = img;
  if (s.templ) {
    j["template"] = to_json(*s.templ);
    j["node_type"] = s.node_type;
    j["entered_via"] = s.entered_via;
  }
  return j;
}

TreeSystem tree_system_from_json(const Json& j) {
  object(j, "instance");
  if (!j.contains("tree")) {
    if (!j.contains("template")) schema("instance", "needs \"tree\" or \"template\"");
    auto t = template_from_json(j["template"], "template");
    std::string base = j.contains("base") ? str(j["base"], "base") : std::string("v0");
    return unfold_template(t, t.depth, base);
  }
  TreeSystem s;
  const auto& tree = j["tree"];
  s.tree.base = str(field(tree, "base", "tree"), "tree.base");
  s.tree.v_nodes = str_list(field(tree, "v_nodes", "tree"), "tree.v_nodes");
  s.tree.w_nodes = str_list(field(tree, "w_nodes", "tree"), "tree.w_nodes");
  if (tree.contains("frontier")) {
    auto f = str_list(tree["frontier"], "tree.frontier");
    s.tree.frontier.insert(f.begin(), f.end());
  }
  const auto& edges = field(tree, "edges", "tree");
  if (!edges.is_array()) schema("tree.edges", "expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto p = str_pair(edges[i], "tree.edges[" + std::to_string(i) + "]");
    s.tree.edges.emplace_back(p[0], p[1]);
  }
  for (const auto& [v, m] : object(field(j, "spaces", "instance"), "spaces").items())
    s.constituent[v] = metric_from_json(m, "spaces." + v);
  for (const auto& [w, p] : object(field(j, "cut_pairs", "instance"), "cut_pairs").items())
    s.cut_pair[w] = str_pair(p, "cut_pairs." + w);
  for (const auto& [v, per] : object(field(j, "injections", "instance"), "injections").items())
    for (const auto& [w, img] : object(per, "injections." + v).items())
      s.injection[{v, w}] = str_pair(img, "injections." + v + "." + w);
  if (j.contains("template")) {
    s.templ = template_from_json(j["template"], "template");
    if (j.contains("node_type"))
      for (const auto& [k, v] : object(j["node_type"], "node_type").items())
        s.node_type[k] = str(v, "node_type." + k);
    if (j.contains("entered_via"))
      for (const auto& [k, v] : object(j["entered_via"], "entered_via").items())
        s.entered_via[k] = str(v, "entered_via." + k);
  }
  return build_tree_system(std::move(s));
}

Json to_json(const MetricAssignment& m) {
  Json j = Json::object();
  for (const auto& [id, sp] : m.spaces) j[id] = to_json(sp);
  return j;
}

Json to_json(const GluedSpace& g) {
  Json j;
  j["classes"] = Json::array();
  for (const auto& c : g.classes) {
    Json members = Json::array();
    for (const auto& [v, p] : c.members) members.push_back({v, p});
    j["classes"].push_back({{"name", c.name}, {"members", members}});
  }
  Json rows = Json::array();
  for (const auto& row : g.dist) {
    Json r = Json::array();
    for (const auto& d : row) r.push_back(rational_json(d));
    rows.push_back(r);
  }
  j["dist"] = rows;
  return j;
}

Json to_json(const EndDescriptor& e) {
  Json j;
  j["id"] = e.id();
  j["kind"] = kind_name(e.kind);
  j["depth"] = e.depth;
  j["ray"] = e.ray;
  j["period"] = Json::array();
  for (const auto& s : e.period) j["period"].push_back({s.via, s.port});
  if (!e.witness.empty()) j["witness"] = e.witness;
  return j;
}

Json to_json(const CompletionApprox& c) {
  const auto& g = *c.base;
  auto matrix = [](const std::vector<std::vector<Rational>>& m) {
    Json rows = Json::array();
    for (const auto& row : m) {
      Json r = Json::array();
      for (const auto& d : row) r.push_back(rational_json(d));
      rows.push_back(r);
    }
    return rows;
  };
  Json j;
  j["depth"] = c.depth;
  j["eps"] = rational_json(c.eps);
  j["error_bound"] = rational_json(c.error_bound);
  j["end_error_bound"] = rational_json(c.end_error_bound);
  j["ends"] = Json::array();
  for (std::size_t i = 0; i < c.end_points.size(); ++i) {
    auto e = to_json(c.end_points[i]);
    e["approx_class"] = g.classes[c.approx_class[i]].name;
    e["group"] = c.end_group[i];
    j["ends"].push_back(e);
  }
  j["groups"] = Json::array();
  for (std::size_t i = 0; i < c.group_frontier.size(); ++i)
    j["groups"].push_back({{"frontier", c.group_frontier[i]},
                           {"approx_class", g.classes[c.group_class[i]].name}});
  j["dist_to_ends"] = matrix(c.dist_to_ends);
  j["end_distance"] = matrix(c.end_distance);
  j["end_lower_bound"] = matrix(c.end_lower_bound);
  j["net"] = Json::array();
  for (auto x : c.net) j["net"].push_back(g.classes[x].name);
  j["classes"] = Json::array();
  for (const auto& cl : g.classes) j["classes"].push_back(cl.name);
  return j;
}

Json to_json(const LimitReport& r) {
  Json j;
  j["checks"] = Json::array();
  for (const auto& [name, n] : r.checks) j["checks"].push_back({{"name", name}, {"count", n}});
  j["failures"] = r.failures;
  j["max_interval_length_per_n"] = Json::array();
  for (const auto& q : r.max_interval_length_per_n)
    j["max_interval_length_per_n"].push_back(rational_json(q));
  return j;
}

Json to_json(const std::vector<Diagnostic>& d) {
  Json j = Json::array();
  for (const auto& x : d) j.push_back({{"code", x.code}, {"message", x.message}});
  return j;
}

// ---------------------------------------------------------------- splittings

Json to_json(const SplittingSpec& s) {
  Json j;
  for (const auto& [id, g] : s.groups) j["groups"][id] = g.table;
  Json q;
  q["base"] = s.base;
  q["v"] = Json::array();
  q["w"] = Json::array();
  for (const auto& [id, _] : s.v_orbits) q["v"].push_back(id);
  for (const auto& [id, _] : s.w_orbits) q["w"].push_back(id);
  q["edges"] = Json::array();
  for (const auto& e : s.edges) q["edges"].push_back({{"id", e.id}, {"v", e.v}, {"w", e.w}});
  j["quotient"] = q;
  for (const auto& [id, v] : s.v_orbits) {
    j["lambda"][id] = {{"group", v.group}, {"points", v.lambda}, {"action", v.action}};
    Json r = Json::array();
    for (const auto& [a, b] : v.reservoir) r.push_back({a, b});
    j["reservoirs"][id] = r;
  }
  for (const auto& [id, w] : s.w_orbits)
    j["lambda"][id] = {{"group", w.group}, {"points", w.lambda}, {"action", w.action}};
  for (const auto& e : s.edges) {
    const auto& wl = s.w_orbits.at(e.w).lambda;
    j["signature"][e.id] = {{wl[0], e.s[0]}, {wl[1], e.s[1]}};
  }
  if (!s.installed_necks.empty()) j["installed_necks"] = s.installed_necks;
  return j;
}

SplittingSpec splitting_from_json(const Json& j) {
  SplittingSpec s;
  for (const auto& [id, t] : object(field(j, "groups", "instance"), "groups").items()) {
    std::string at = "groups." + id;
    if (!t.is_array()) schema(at, "expected a multiplication table");
    FiniteGroup g;
    for (std::size_t r = 0; r < t.size(); ++r) {
      std::string rw = at + "[" + std::to_string(r) + "]";
      if (!t[r].is_array()) schema(rw, "expected a row");
      std::vector<int> row;
      for (std::size_t c = 0; c < t[r].size(); ++c)
        row.push_back(integer(t[r][c], rw + "[" + std::to_string(c) + "]"));
      g.table.push_back(row);
    }
    s.groups[id] = g;
  }
  const auto& q = field(j, "quotient", "instance");
  s.base = str(field(q, "base", "quotient"), "quotient.base");
  auto vs = str_list(field(q, "v", "quotient"), "quotient.v");
  auto ws = str_list(field(q, "w", "quotient"), "quotient.w");
  const auto& lambda = field(j, "lambda", "instance");
  auto action_rows = [&](const Json& l, const std::string& at, const std::string& group,
                         std::size_t n) {
    std::vector<std::vector<int>> rows;
    if (l.contains("action")) {
      const auto& a = l["action"];
      if (!a.is_array()) schema(at + ".action", "expected an array");
      for (std::size_t g = 0; g < a.size(); ++g) {
        std::string rw = at + ".action[" + std::to_string(g) + "]";
        if (!a[g].is_array()) schema(rw, "expected a row");
        std::vector<int> row;
        for (std::size_t x = 0; x < a[g].size(); ++x)
          row.push_back(integer(a[g][x], rw + "[" + std::to_string(x) + "]"));
        rows.push_back(row);
      }
    } else if (s.groups.count(group)) {
      std::vector<int> id(n);
      for (std::size_t x = 0; x < n; ++x) id[x] = static_cast<int>(x);
      rows.assign(s.groups[group].order(), id);  // trivial action
    }
    return rows;
  };
  for (const auto& id : vs) {
    std::string at = "lambda." + id;
    const auto& l = field(lambda, id, "lambda");
    VOrbit v;
    v.group = str(field(l, "group", at), at + ".group");
    v.lambda = str_list(field(l, "points", at), at + ".points");
    v.action = action_rows(l, at, v.group, v.lambda.size());
    if (j.contains("reservoirs") && j["reservoirs"].contains(id)) {
      const auto& r = j["reservoirs"][id];
      if (!r.is_array()) schema("reservoirs." + id, "expected an edge list");
      for (std::size_t i = 0; i < r.size(); ++i) {
        auto p = str_pair(r[i], "reservoirs." + id + "[" + std::to_string(i) + "]");
        v.reservoir.push_back({p[0], p[1]});
      }
    }
    s.v_orbits[id] = v;
  }
  for (const auto& id : ws) {
    std::string at = "lambda." + id;
    const auto& l = field(lambda, id, "lambda");
    WOrbit w;
    w.group = str(field(l, "group", at), at + ".group");
    w.lambda = str_pair(field(l, "points", at), at + ".points");
    for (const auto& row : action_rows(l, at, w.group, 2)) {
      if (row.size() != 2) schema(at + ".action", "rows must have two entries");
      w.action.push_back({row[0], row[1]});
    }
    s.w_orbits[id] = w;
  }
  const auto& edges = field(q, "edges", "quotient");
  if (!edges.is_array()) schema("quotient.edges", "expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::string at = "quotient.edges[" + std::to_string(i) + "]";
    EdgeOrbit e;
    e.id = str(field(edges[i], "id", at), at + ".id");
    e.v = str(field(edges[i], "v", at), at + ".v");
    e.w = str(field(edges[i], "w", at), at + ".w");
    std::string sat = "signature." + e.id;
    const auto& sig = field(field(j, "signature", "instance"), e.id, "signature");
    auto wit = s.w_orbits.find(e.w);
    if (wit == s.w_orbits.end()) schema(at + ".w", "unknown W-orbit '" + e.w + "'");
    for (int k = 0; k < 2; ++k) {
      const auto& p = wit->second.lambda[k];
      e.s[k] = str(field(sig, p, sat), sat + "." + p);
    }
    s.edges.push_back(e);
  }
  std::vector<std::array<std::string, 3>> earlier;
  if (j.contains("installed_necks")) {
    const auto& n = j["installed_necks"];
    for (std::size_t i = 0; i < n.size(); ++i) {
      auto l = str_list(n[i], "installed_necks[" + std::to_string(i) + "]");
      if (l.size() != 3) schema("installed_necks[" + std::to_string(i) + "]", "expected [orbit, x, y]");
      earlier.push_back({l[0], l[1], l[2]});
    }
  }
  auto out = build_splitting(s);
  out.installed_necks.insert(out.installed_necks.end(), earlier.begin(), earlier.end());
  std::sort(out.installed_necks.begin(), out.installed_necks.end());
  out.installed_necks.erase(std::unique(out.installed_necks.begin(), out.installed_necks.end()),
                            out.installed_necks.end());
  return out;
}

// ---------------------------------------------------------------- files

Instance parse_instance_text(const std::string& text, const std::string& source) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1 + std::count(text.begin(),
                                      text.begin() + std::min(e.byte, text.size()), '\n');
    throw StructuralError(source + ":" + std::to_string(line) + ": " + e.what());
  }
  try {
    if (j.is_object() && j.contains("groups")) return splitting_from_json(j);
    return tree_system_from_json(j);
  } catch (const StructuralError& e) {
    throw StructuralError(source + ": " + e.what());
  }
}

Instance parse_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open instance '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance_text(ss.str(), path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- DOT

namespace {

const char* colour(std::size_t i) {
  static const char* palette[] = {"black", "red3", "blue3", "green4", "orange3",
                                  "purple3", "cyan4", "magenta3", "brown", "gold3"};
  return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string dot_graph(const Graph& g, const std::string& name, const std::vector<std::size_t>& group) {
  std::ostringstream os;
  os << "graph " << quoted(name) << " {\n  node [shape=circle, fontsize=9];\n";
  for (std::size_t v = 0; v < g.size(); ++v) {
    os << "  n" << v << " [label=" << quoted(g.names[v]);
    if (v < group.size()) os << ", color=" << colour(group[v]);
    os << "];\n";
  }
  for (const auto& [a, b] : g.edges()) os << "  n" << a << " -- n" << b << ";\n";
  os << "}\n";
  return os.str();
}

std::string dot_tree(const BipartiteTree& t, const std::string& name) {
  std::ostringstream os;
  os << "graph " << quoted(name) << " {\n";
  for (const auto& v : t.v_nodes)
    os << "  " << quoted(v) << " [shape=box" << (v == t.base ? ", penwidth=2" : "") << "];\n";
  for (const auto& w : t.w_nodes)
    os << "  " << quoted(w) << " [shape=ellipse" << (t.frontier.count(w) ? ", style=dashed" : "")
       << "];\n";
  for (const auto& [v, w] : t.edges) os << "  " << quoted(v) << " -- " << quoted(w) << ";\n";
  os << "}\n";
  return os.str();
}

std::string dot_dual_tree(const DualCutPairTree& d, const Graph& g) {
  std::ostringstream os;
  os << "graph \"dual_tree\" {\n";
  for (std::size_t s = 0; s < d.stars.size(); ++s)
    os << "  " << DualCutPairTree::star_name(s) << " [shape=box, label=\"star " << s << "\"];\n";
  for (std::size_t p = 0; p < d.pairs.size(); ++p) {
    std::string label = "{" + g.names[d.pairs[p][0]] + ", " + g.names[d.pairs[p][1]] + "}";
    os << "  " << DualCutPairTree::pair_name(p) << " [shape=ellipse, label=" << quoted(label)
       << "];\n";
  }
  for (const auto& [v, w] : d.tree.edges) os << "  " << v << " -- " << w << ";\n";
  os << "}\n";
  return os.str();
}

std::string dot_split(const GluedSpace& g, const SplitResult& split, const std::string& w) {
  auto cg = class_graph(g);
  std::vector<std::size_t> group(g.size(), 0);
  for (std::size_t c = 0; c < split.components.size(); ++c)
    for (auto x : split.components[c]) group[x] = c + 1;
  return dot_graph(cg, "split at " + w, group);
}

}  // namespace bforge
