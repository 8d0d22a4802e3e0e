#pragma once

#include "bforge/exact_metric.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bforge {

using Edge = std::pair<std::string, std::string>;  // (V-id, W-id)
using PointRef = std::pair<std::string, std::string>;  // (vertex-id, local point)

struct BipartiteTree {
  std::vector<std::string> v_nodes;  // kept sorted
  std::vector<std::string> w_nodes;  // kept sorted
  std::vector<Edge> edges;           // kept sorted
  std::string base;
  std::set<std::string> frontier;

  bool is_v(const std::string& id) const;
  bool is_w(const std::string& id) const;
  bool has(const std::string& id) const { return is_v(id) || is_w(id); }
  bool operator==(const BipartiteTree&) const = default;
};

// Eventually periodic instances: a finite pattern unfolded without
// backtracking from a base V-type.
struct TemplateEdgeType {
  std::string id;
  std::string v_type;
  std::string w_type;
  std::array<std::string, 2> map;  // images of the W-type's two points
  int w_mult = 1;                  // copies of this edge type at each W
  bool operator==(const TemplateEdgeType&) const = default;
};

struct TreeTemplate {
  std::map<std::string, FiniteMetricSpace> v_types;
  std::map<std::string, std::array<std::string, 2>> w_types;
  std::vector<TemplateEdgeType> edge_types;  // sorted by id
  std::string base_type;
  int depth = 0;

  const TemplateEdgeType& edge_type(const std::string& id) const;
  bool operator==(const TreeTemplate&) const = default;
};

struct TreeSystem {
  BipartiteTree tree;
  std::map<std::string, FiniteMetricSpace> constituent;           // V-id -> M_v
  std::map<std::string, std::array<std::string, 2>> cut_pair;     // W-id -> M_w
  std::map<Edge, std::array<std::string, 2>> injection;           // i_e on M_w's points
  std::optional<TreeTemplate> templ;
  std::map<std::string, std::string> node_type;    // template instances only
  std::map<std::string, std::string> entered_via;  // edge type used from the parent

  std::vector<std::string> neighbors(const std::string& id) const;
  // Local point of M_v that is the image of M_w's point number `which`.
  const std::string& image(const Edge& e, int which) const { return injection.at(e)[which]; }

  bool operator==(const TreeSystem&) const = default;
};

// Distances (V, W and frontier alike) on the tree in the build.
using Adjacency = std::map<std::string, std::vector<std::string>>;
Adjacency adjacency(const BipartiteTree& tree);
std::map<std::string, int> tree_distances(const BipartiteTree& tree, const std::string& from);
std::vector<std::string> tree_path(const BipartiteTree& tree, const std::string& from,
                                   const std::string& to);

struct Diagnostic {
  std::string code;     // e.g. "image_overlap", "non_injective", "interior_valence"
  std::string message;  // includes the witnesses
};

struct SystemError : std::runtime_error {
  std::vector<Diagnostic> diagnostics;
  explicit SystemError(std::vector<Diagnostic> d);
};

std::vector<Diagnostic> validate_tree_system(const TreeSystem& system);

// Sorts the containers, validates, throws SystemError on any diagnostic.
TreeSystem build_tree_system(TreeSystem raw);

TreeSystem truncate(const TreeSystem& system, int k);
// truncate(), or a fresh unfolding when a template instance is too shallow.
TreeSystem system_at_depth(const TreeSystem& system, int k);

struct MetricAssignment {
  std::map<std::string, FiniteMetricSpace> spaces;  // V-ids and W-ids
  bool operator==(const MetricAssignment&) const = default;
};

// C_v in local indices, in sorted edge order.
PairCollection peripheral_collection(const TreeSystem& system, const std::string& v,
                                     std::vector<Edge>* edges = nullptr);

MetricAssignment assign_shrinking(const TreeSystem& system);

// Edges whose injection is not an isometry under the assignment.
std::vector<std::string> compatibility_violations(const TreeSystem& system,
                                                  const MetricAssignment& metrics);

struct FrontierData {
  std::vector<Edge> edges;                     // N_S in sorted order
  std::vector<std::array<PointRef, 2>> pairs;  // C_e, aligned with edges
  std::vector<std::vector<std::string>> branches;  // component of T \ S behind each edge
};

FrontierData frontier_data(const TreeSystem& system, const std::set<std::string>& subtree);

bool is_connected_subtree(const BipartiteTree& tree, const std::set<std::string>& nodes);

// Template unfolding.
TreeSystem unfold_template(const TreeTemplate& t, int depth, const std::string& base = "v0");
// Turns a frontier W-node of a template instance into an interior one: its
// V-children are added together with their own W-children as new frontier.
void expand_frontier(TreeSystem& system, const std::string& w);
// Name of the V-child of w reached through (edge type, copy).
std::string child_v_name(const std::string& w, const std::string& edge_type, int copy);
std::string child_w_name(const std::string& v, const std::string& edge_type);

}  // namespace bforge
