#pragma once

#include "bforge/glue_space.hpp"
#include "bforge/graph.hpp"

#include <array>
#include <functional>

namespace bforge {

struct CircuitReport {
  std::vector<std::size_t> count_by_length;  // index = circuit length, 0..n
  std::size_t total = 0;
  std::vector<std::vector<std::size_t>> circuits;  // a, b, ..., back to a implied
  bool list_truncated = false;
  std::string note;
};

// Simple circuits of length <= n through the edge {a, b}. Each circuit is
// found once, as a path from b back to a that avoids the edge itself.
CircuitReport circuits_through_edge(const Graph& g, std::size_t a, std::size_t b, int n,
                                    std::size_t list_limit = 0);

struct DeltaReport {
  Rational delta;                    // max four-point defect found
  std::array<std::size_t, 4> witness{};
  bool exhaustive = true;            // false: deterministic subset, still a lower bound
  std::size_t quadruples = 0;
};

DeltaReport delta_estimate(const Graph& g, const std::vector<std::size_t>& interior,
                           std::size_t max_quadruples = 20000000);

// Components of g with the vertices of S removed, each sorted, ordered by
// smallest vertex.
std::vector<std::vector<std::size_t>> separation_components(const Graph& g,
                                                            const std::vector<std::size_t>& S);

struct ConvexityReport {
  bool convex = true;
  std::vector<std::size_t> witness;  // a geodesic leaving S
};

ConvexityReport convexity_check(const Graph& g, const std::vector<std::size_t>& S);

using CutPair = std::array<std::size_t, 2>;  // sorted

std::vector<std::size_t> cut_vertices(const Graph& g);
std::vector<CutPair> cut_pairs(const Graph& g);
// ArgumentError when g is disconnected or has a cut vertex (named).
std::vector<CutPair> inseparable_cut_pairs(const Graph& g);

// between(w, a, b): pair w separates a point of pair a from a point of pair b.
using BetweenOracle = std::function<bool(std::size_t, std::size_t, std::size_t)>;
BetweenOracle separation_oracle(const Graph& g, const std::vector<CutPair>& W);

struct DualCutPairTree {
  std::vector<CutPair> pairs;
  std::vector<std::vector<std::size_t>> stars;  // sorted pair indices, stars sorted
  BipartiteTree tree;  // V-nodes "star<i>", W-nodes "pair<i>"
  std::vector<std::vector<std::size_t>> B;  // per star, graph vertices (graph overload only)
  std::vector<std::string> problems;        // tree shape, mu_w, betweenness mismatches

  static std::string star_name(std::size_t i) { return "star" + std::to_string(i); }
  static std::string pair_name(std::size_t i) { return "pair" + std::to_string(i); }
};

// Stars are the maximal sets of pairs with no pair between two members.
// ArgumentError if the oracle is not symmetric in its last two arguments.
DualCutPairTree dual_tree(std::size_t n_pairs, const BetweenOracle& between);
// Adds B_v, the mu_w bijection check and tree-path betweenness agreement.
DualCutPairTree dual_tree(const Graph& g, const std::vector<CutPair>& W);

// Classes of a glued space, linked iff they share a constituent.
Graph class_graph(const GluedSpace& g);

// Interior W-node -> class names of its two points.
std::map<std::string, std::array<std::string, 2>> pair_correspondence(const GluedSpace& g);

struct IsoReport {
  bool ok = true;
  std::map<std::string, std::string> mapping;  // tree vertex -> dual vertex
  std::string mismatch;                        // first failure, naming the vertex
};

// Interior only: W-nodes off the frontier, V-nodes with >= 2 of them;
// on the dual side, all pairs and the stars with >= 2 members.
IsoReport iso_check(const BipartiteTree& T, const Graph& g, const DualCutPairTree& dual,
                    const std::map<std::string, std::array<std::string, 2>>& correspondence);

}  // namespace bforge
