#pragma once

#include "bforge/exact_metric.hpp"
#include "bforge/graph.hpp"
#include "bforge/tree_system.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace bforge {

// Elements are 0..order-1 with 0 the identity.
struct FiniteGroup {
  std::vector<std::vector<int>> table;

  int order() const { return static_cast<int>(table.size()); }
  int mul(int a, int b) const { return table[a][b]; }
  int inv(int a) const;
  bool operator==(const FiniteGroup&) const = default;
};

// Empty when the table is a group; otherwise the first failure.
std::string group_table_error(const FiniteGroup& g);

struct VOrbit {
  std::string group;
  std::vector<std::string> lambda;
  std::vector<std::vector<int>> action;  // action[g][x], indices into lambda
  std::vector<std::pair<std::string, std::string>> reservoir;  // edges of K_v on lambda
  bool operator==(const VOrbit&) const = default;
};

struct WOrbit {
  std::string group;
  std::array<std::string, 2> lambda;
  std::vector<std::array<int, 2>> action;
  bool operator==(const WOrbit&) const = default;
};

struct EdgeOrbit {
  std::string id, v, w;
  std::array<std::string, 2> s;  // s_e of lambda_w[0], lambda_w[1]
  bool operator==(const EdgeOrbit&) const = default;
};

// Graph of finite groups over a quotient tree with trivial edge groups.
struct SplittingSpec {
  std::map<std::string, FiniteGroup> groups;
  std::map<std::string, VOrbit> v_orbits;
  std::map<std::string, WOrbit> w_orbits;
  std::vector<EdgeOrbit> edges;  // sorted by id
  std::string base;              // V-orbit at the root of the unfolding
  // Filled by validation: neck edges that were missing from a reservoir.
  std::vector<std::array<std::string, 3>> installed_necks;  // (orbit, x, y)

  const EdgeOrbit& edge(const std::string& id) const;
  const FiniteGroup& group_of(const std::string& orbit) const;
  bool operator==(const SplittingSpec&) const = default;
};

struct SplittingReport {
  std::vector<Diagnostic> diagnostics;
  SplittingSpec spec;  // input with neck edges installed
  bool ok() const { return diagnostics.empty(); }
};

// StructuralError for malformed group tables; every other failure becomes a
// diagnostic with witnesses.
SplittingReport validate_splitting(const SplittingSpec& spec);
// Validates and throws SystemError on any diagnostic.
SplittingSpec build_splitting(const SplittingSpec& raw);

// Reduced words in the free product of the orbit groups; syllables are
// (orbit, non-identity element), adjacent syllables from different orbits.
using Syllable = std::pair<std::string, int>;
using Word = std::vector<Syllable>;

Word word_mul(const SplittingSpec& spec, const Word& a, const Word& b);
Word word_inv(const SplittingSpec& spec, const Word& a);
std::string word_name(const Word& w);
std::string vertex_name(const std::string& orbit, const Word& rep);
// Coset representative of r G_u, and the stripped syllable (0 if none).
Word coset_rep(const Word& r, const std::string& orbit, int* stripped = nullptr);

struct UnfoldedTree {
  BipartiteTree tree;
  std::map<std::string, std::string> orbit;  // vertex -> orbit id
  std::map<std::string, Word> rep;
  std::map<Edge, std::string> edge_orbit;
  std::map<Edge, std::array<std::string, 2>> signature;  // lambda_w labels -> lambda_v labels
  int depth = 0;
};

// Ball of tree radius 2D about center*v_base (frontier W-nodes at 2D+1).
UnfoldedTree unfold_tree(const SplittingSpec& spec, int D, const Word& center = {});

// g * (vertex u, label x), returned as (vertex, label).
std::pair<std::string, std::string> translate(const SplittingSpec& spec, const Word& g,
                                              const std::string& orbit, const Word& rep,
                                              const std::string& label);

// Set of (V-orbit, W-orbit) pairs realised by the edges of the unfolding.
std::vector<std::pair<std::string, std::string>> quotient_edges(const UnfoldedTree& t);

int reservoir_diameter(const SplittingSpec& spec);

enum class KEdgeKind { Reservoir, Neck, Pipe, Junction };

struct FineGraphBall {
  UnfoldedTree tree;
  // K: one vertex "u|x" per tree vertex u and x in lambda_u.
  Graph K;
  std::vector<std::pair<std::size_t, std::size_t>> k_edges;
  std::vector<KEdgeKind> k_kind;
  std::vector<std::size_t> rho;  // K vertex -> class index (into class_names)
  std::vector<std::string> class_names;
  std::vector<std::vector<std::size_t>> class_members;  // K vertices per class
  Graph barK;          // whole K-bar of the unfolding, classes as vertices
  std::size_t base_class = 0;
  int radius = 0;
  Graph ball;          // induced on classes within `radius` of the base class
  std::vector<std::size_t> ball_classes;  // ball vertex -> class index
  std::vector<std::size_t> ball_pos;      // class index -> ball vertex, or size() of classes
  std::map<std::string, std::vector<std::size_t>> k_vertices;  // tree vertex -> K vertices
  std::map<std::string, std::array<std::size_t, 2>> junction;  // W vertex -> ball vertices
  std::vector<std::string> interior_w;
  std::size_t duplicate_edges = 0;

  // Ball vertices of lambda_u for a tree vertex u, or empty if any is missing.
  std::vector<std::size_t> image_of(const std::string& u) const;
};

// Refuses (DepthError, naming the depth needed) when D < R + reservoir diameter.
FineGraphBall build_barK(const SplittingSpec& spec, int D, int R, const Word& center = {});

struct ParabolicForest {
  Graph forest;  // vertices "u|x"
  std::vector<std::vector<std::size_t>> components;  // sorted, by smallest member
  std::vector<std::size_t> component_of;
  bool acyclic = true;
};

ParabolicForest parabolic_forest(const SplittingSpec& spec, int D, const Word& center = {});

// Tree system with M_v = lambda_v under the reservoir path metric and
// M_w = lambda_w, over the depth-D unfolding.
TreeSystem theta_system(const SplittingSpec& spec, int D);

}  // namespace bforge
