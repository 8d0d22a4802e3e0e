#pragma once

#include "bforge/graph_analysis.hpp"
#include "bforge/kettlebell.hpp"
#include "bforge/splitting_engine.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <variant>

namespace bforge {

using Json = nlohmann::json;

// Rationals travel as "p/q" strings; integers are accepted on input.
Json rational_json(const Rational& q);
Rational rational_from_json(const Json& j, const std::string& where);

Json to_json(const FiniteMetricSpace& m);
FiniteMetricSpace metric_from_json(const Json& j, const std::string& where);

Json to_json(const TreeTemplate& t);
TreeTemplate template_from_json(const Json& j, const std::string& where);

// Explicit tree, spaces and injections, plus the template block if any.
Json to_json(const TreeSystem& s);
// Unfolds "template" when "tree" is absent. Validates (SystemError).
TreeSystem tree_system_from_json(const Json& j);

Json to_json(const MetricAssignment& m);
Json to_json(const GluedSpace& g);
Json to_json(const EndDescriptor& e);
Json to_json(const CompletionApprox& c);
Json to_json(const LimitReport& r);
Json to_json(const std::vector<Diagnostic>& d);

Json to_json(const SplittingSpec& s);
// Validates and installs neck edges (SystemError on diagnostics).
SplittingSpec splitting_from_json(const Json& j);

using Instance = std::variant<TreeSystem, SplittingSpec>;

// StructuralError carries the line for syntax errors and the field path for
// schema errors.
Instance parse_instance_text(const std::string& text, const std::string& source = "<input>");
Instance parse_instance(const std::string& path);

// Two-space indentation, sorted keys, trailing newline.
std::string dump(const Json& j);

// DOT exports. Vertex groups are drawn with distinct colours.
std::string dot_graph(const Graph& g, const std::string& name,
                      const std::vector<std::size_t>& group = {});
std::string dot_tree(const BipartiteTree& t, const std::string& name);
std::string dot_dual_tree(const DualCutPairTree& d, const Graph& g);
std::string dot_split(const GluedSpace& g, const SplitResult& split, const std::string& w);

}  // namespace bforge
