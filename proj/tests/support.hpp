#pragma once

#include "bforge/serialize.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace bforge::testing {

inline std::string data_path(const std::string& name) {
  return std::string(BFORGE_DATA_DIR) + "/" + name;
}

inline TreeSystem load_tree(const std::string& name) {
  return std::get<TreeSystem>(parse_instance(data_path(name)));
}

inline SplittingSpec load_splitting(const std::string& name) {
  return std::get<SplittingSpec>(parse_instance(data_path(name)));
}

inline const std::vector<std::string>& tree_instances() {
  static const std::vector<std::string> names{"path2.json",       "small_star.json",
                                              "chain5.json",      "three_level.json",
                                              "k4_template.json", "abc_theta.json"};
  return names;
}

// Shortest-path closure of random positive weights on a complete graph:
// always a metric, usually with plenty of tight triangles.
inline FiniteMetricSpace random_metric(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<int> num(1, 12), den(1, 4);
  std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Rational w(num(rng), den(rng));
      w.canonicalize();
      d[i][j] = d[j][i] = w;
    }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  std::vector<std::string> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back("x" + std::to_string(i));
  return make_space(pts, d);
}

// Pairs meeting in at most one point, anchor first.
inline PairCollection random_collection(std::mt19937& rng, std::size_t n, std::size_t want) {
  PairCollection c;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int tries = 0; tries < 200 && c.size() < want; ++tries) {
    std::size_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    bool ok = true;
    for (const auto& p : c) {
      int common = (p.first == a || p.first == b) + (p.second == a || p.second == b);
      if (common > 1) ok = false;
    }
    if (ok) c.push_back({a, b});
  }
  return c;
}

inline Graph make_graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  Graph g;
  for (std::size_t i = 0; i < n; ++i) g.add_vertex("n" + std::to_string(i));
  for (auto [a, b] : edges) g.add_edge(a, b);
  return g;
}

// Every routing choice along the tree path, tried one by one.
inline Rational chain_oracle(const TreeSystem& s, const MetricAssignment& m, const PointRef& x,
                             const PointRef& y) {
  auto path = tree_path(s.tree, x.first, y.first);
  std::vector<std::string> ws, vs{path[0]};
  for (std::size_t i = 1; i < path.size(); i += 2) {
    ws.push_back(path[i]);
    vs.push_back(path[i + 1]);
  }
  auto d = [&](const std::string& v, const std::string& a, const std::string& b) {
    const auto& sp = m.spaces.at(v);
    return sp.d(sp.index(a), sp.index(b));
  };
  std::optional<Rational> best;
  for (std::size_t mask = 0; mask < (std::size_t(1) << ws.size()); ++mask) {
    Rational len(0);
    std::string at = x.second;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      int c = (mask >> i) & 1;
      const auto& out = s.injection.at({vs[i], ws[i]})[c];
      len += d(vs[i], at, out);
      at = s.injection.at({vs[i + 1], ws[i]})[c];
    }
    len += d(vs.back(), at, y.second);
    if (!best || len < *best) best = len;
  }
  return *best;
}

inline Rational class_oracle(const GluedSpace& g, std::size_t a, std::size_t b) {
  const auto& s = *g.system;
  std::optional<Rational> best;
  for (const auto& x : g.classes[a].members)
    for (const auto& y : g.classes[b].members) {
      if (!s.tree.is_v(x.first) || !s.tree.is_v(y.first)) continue;
      auto d = chain_oracle(s, *g.metrics, x, y);
      if (!best || d < *best) best = d;
    }
  return *best;
}

}  // namespace bforge::testing
