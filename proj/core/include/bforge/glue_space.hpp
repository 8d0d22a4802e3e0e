#pragma once

#include "bforge/tree_system.hpp"

#include <memory>

namespace bforge {

struct GluedClass {
  std::string name;               // "vertex:point" of the smallest member
  std::vector<PointRef> members;  // sorted
};

struct GluedSpace {
  std::vector<GluedClass> classes;  // sorted by name
  std::vector<std::vector<Rational>> dist;
  std::map<PointRef, std::size_t> class_of;
  std::shared_ptr<const TreeSystem> system;
  std::shared_ptr<const MetricAssignment> metrics;

  std::size_t size() const { return classes.size(); }
  std::size_t cls(const std::string& vertex, const std::string& point) const;
  std::size_t find(const std::string& name) const;  // by class name
  // Classes of M_u in local point order (V) or cut-pair order (W).
  std::vector<std::size_t> vertex_classes(const std::string& u) const;
};

// Quotient metric through efficient linking chains: a dynamic program over
// the two routing choices at every W-node on the tree path.
GluedSpace glue(const TreeSystem& system, const MetricAssignment& metrics);

// Restriction of the glued table to each M_v must be d_v.
std::vector<std::string> isometry_violations(const GluedSpace& g);

// V-nodes at tree distance 2k whose glued diameter exceeds 2^-k.
std::vector<std::string> shrinking_violations(const GluedSpace& g);

// Two classes are linked iff some constituent contains both.
std::vector<std::vector<std::size_t>> class_adjacency(const GluedSpace& g);

struct TemplateStep {
  std::string via;   // edge type from the W-node down to the next V-node
  std::string port;  // edge type from that V-node to the next W-node
  bool operator==(const TemplateStep&) const = default;
  auto operator<=>(const TemplateStep&) const = default;
};

struct EndDescriptor {
  enum class Kind { Redundant, NonRedundant, Undecided };
  std::vector<std::string> ray;       // base, w, v, w, ..., frontier W
  std::vector<TemplateStep> period;   // repeated forever after the ray (templates)
  Kind kind = Kind::Undecided;
  std::string witness;                // persisting point, "<w-type>.<point>"
  int depth = 0;

  std::string id() const;
};

std::string kind_name(EndDescriptor::Kind k);

// One descriptor per frontier W-node at depth k; for template instances one
// per (frontier W-node, primitive period <= max_period), classified exactly.
std::vector<EndDescriptor> enumerate_ends(const TreeSystem& system, int k, int max_period = 3);

// Classification of a periodic continuation starting at W-type/entry state.
EndDescriptor::Kind classify_period(const TreeTemplate& t, const std::string& w_type,
                                    const std::vector<TemplateStep>& period,
                                    std::string* witness = nullptr);

// Names of the next 2*steps vertices of the end beyond its ray.
std::vector<std::string> continue_ray(const TreeSystem& system, const EndDescriptor& end,
                                      int steps);
// Unfolds the template along the end so that its ray reaches `steps` further
// V-nodes; returns the extended ray.
std::vector<std::string> extend_along(TreeSystem& system, const EndDescriptor& end, int steps);

struct CompletionApprox {
  std::shared_ptr<const GluedSpace> base;
  int depth = 0;
  std::vector<EndDescriptor> end_points;
  std::vector<std::size_t> approx_class;             // p_k per end
  // Ends through the same frontier W-node share p_k; the tables below are
  // indexed by these groups.
  std::vector<std::size_t> end_group;                // per end
  std::vector<std::string> group_frontier;
  std::vector<std::size_t> group_class;
  std::vector<std::vector<Rational>> dist_to_ends;   // [class][group] = d(x, p_k)
  Rational error_bound;                              // per entry, 2^(-k+1)
  std::vector<std::vector<Rational>> end_distance;   // [group][group] d(p_k, p'_k)
  Rational end_error_bound;                          // 2^(-k+2)
  std::vector<std::vector<Rational>> end_lower_bound;  // certified, [group][group]
  Rational eps;
  std::vector<std::size_t> net;
};

Rational minimal_completion_eps(int k);  // eps must exceed this

CompletionApprox approximate_completion(std::shared_ptr<const GluedSpace> glued, int k,
                                        const Rational& eps);
CompletionApprox approximate_completion(std::shared_ptr<const GluedSpace> glued, int k,
                                        const Rational& eps,
                                        const std::vector<EndDescriptor>& ends);

struct SplitResult {
  std::vector<std::vector<std::size_t>> components;  // class indices
  std::vector<std::vector<std::size_t>> end_components;  // end indices, aligned
};

SplitResult split_at_pair(const GluedSpace& g, const std::string& w);
SplitResult split_at_pair(const CompletionApprox& c, const std::string& w);

// Other interior W-nodes whose unshared points fall outside the component
// predicted by their side of w in the tree.
std::vector<std::string> split_side_violations(const GluedSpace& g, const std::string& w);

}  // namespace bforge
