#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace bforge {

// Simple undirected graph with named vertices and sorted adjacency lists.
struct Graph {
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> adj;

  std::size_t size() const { return names.size(); }
  std::size_t add_vertex(const std::string& name);
  // False (and no change) for a loop or an existing edge.
  bool add_edge(std::size_t a, std::size_t b);
  bool has_edge(std::size_t a, std::size_t b) const;
  std::size_t edge_count() const;
  std::size_t index(const std::string& name) const;  // ArgumentError if absent
  bool contains(const std::string& name) const { return lookup_.count(name) > 0; }

  std::vector<std::pair<std::size_t, std::size_t>> edges() const;  // a < b, sorted
  Graph induced(const std::vector<std::size_t>& keep) const;      // keeps the given order

  bool operator==(const Graph& o) const { return names == o.names && adj == o.adj; }

 private:
  std::map<std::string, std::size_t> lookup_;
};

constexpr int kUnreached = -1;

std::vector<int> bfs_distances(const Graph& g, std::size_t from);
// Hop distance matrix; kUnreached between components.
std::vector<std::vector<int>> all_pairs_distances(const Graph& g);
bool is_connected(const Graph& g);

}  // namespace bforge
