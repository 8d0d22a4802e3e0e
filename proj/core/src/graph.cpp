#include "bforge/graph.hpp"

#include "bforge/errors.hpp"
#include "bforge/parallel.hpp"

#include <algorithm>
#include <deque>

namespace bforge {

std::size_t Graph::add_vertex(const std::string& name) {
  auto it = lookup_.find(name);
  if (it != lookup_.end()) return it->second;
  names.push_back(name);
  adj.emplace_back();
  lookup_[name] = names.size() - 1;
  return names.size() - 1;
}

bool Graph::add_edge(std::size_t a, std::size_t b) {
  if (a == b || has_edge(a, b)) return false;
  adj[a].insert(std::lower_bound(adj[a].begin(), adj[a].end(), b), b);
  adj[b].insert(std::lower_bound(adj[b].begin(), adj[b].end(), a), a);
  return true;
}

bool Graph::has_edge(std::size_t a, std::size_t b) const {
  return std::binary_search(adj[a].begin(), adj[a].end(), b);
}

std::size_t Graph::edge_count() const {
  std::size_t n = 0;
  for (const auto& a : adj) n += a.size();
  return n / 2;
}

std::size_t Graph::index(const std::string& name) const {
  auto it = lookup_.find(name);
  if (it == lookup_.end()) throw ArgumentError("unknown graph vertex '" + name + "'");
  return it->second;
}

std::vector<std::pair<std::size_t, std::size_t>> Graph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < size(); ++a)
    for (auto b : adj[a])
      if (a < b) out.emplace_back(a, b);
  return out;
}

Graph Graph::induced(const std::vector<std::size_t>& keep) const {
  Graph h;
  std::vector<std::size_t> pos(size(), size());
  for (auto v : keep) pos[v] = h.add_vertex(names[v]);
  for (auto v : keep)
    for (auto u : adj[v])
      if (pos[u] != size()) h.add_edge(pos[v], pos[u]);
  return h;
}

std::vector<int> bfs_distances(const Graph& g, std::size_t from) {
  std::vector<int> d(g.size(), kUnreached);
  std::deque<std::size_t> q{from};
  d[from] = 0;
  while (!q.empty()) {
    auto x = q.front();
    q.pop_front();
    for (auto y : g.adj[x])
      if (d[y] == kUnreached) {
        d[y] = d[x] + 1;
        q.push_back(y);
      }
  }
  return d;
}

std::vector<std::vector<int>> all_pairs_distances(const Graph& g) {
  std::vector<std::vector<int>> d(g.size());
  parallel_for(g.size(), [&](std::size_t i) { d[i] = bfs_distances(g, i); });
  return d;
}

bool is_connected(const Graph& g) {
  if (g.size() == 0) return true;
  auto d = bfs_distances(g, 0);
  return std::find(d.begin(), d.end(), kUnreached) == d.end();
}

}  // namespace bforge
