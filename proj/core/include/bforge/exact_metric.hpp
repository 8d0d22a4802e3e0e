#pragma once

#include "bforge/rational.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace bforge {

using PointPair = std::pair<std::size_t, std::size_t>;
using PairCollection = std::vector<PointPair>;

struct FiniteMetricSpace {
  std::vector<std::string> points;
  std::vector<std::vector<Rational>> dist;
  PairCollection marked_pairs;

  std::size_t size() const { return points.size(); }
  const Rational& d(std::size_t i, std::size_t j) const { return dist[i][j]; }
  // Throws ArgumentError for an unknown id.
  std::size_t index(const std::string& id) const;
  bool contains(const std::string& id) const;

  bool operator==(const FiniteMetricSpace&) const = default;
};

struct Violation {
  std::string axiom;  // "identity", "positivity", "symmetry", "triangle"
  std::vector<std::string> witness;
};

struct ValidationReport {
  std::vector<std::string> structural;
  std::vector<Violation> violations;
  bool ok() const { return structural.empty() && violations.empty(); }
};

// Triangle witnesses are reported as (x, z, y) with d(x,z) > d(x,y) + d(y,z),
// once per unordered {x,z}.
ValidationReport validate_metric(const FiniteMetricSpace& space);

FiniteMetricSpace make_space(std::vector<std::string> points,
                             std::vector<std::vector<Rational>> dist);

Rational diameter(const FiniteMetricSpace& space);
Rational pair_diameter(const FiniteMetricSpace& space, const PointPair& c);

// u(x) = d(x,p) d(p,q) / (d(x,p) + d(x,q)), indexed like space.points.
std::vector<Rational> urysohn_map(const FiniteMetricSpace& space,
                                  std::size_t p, std::size_t q);

// Rescaled metric on the same points: diameter K attained at the anchor,
// every other pair of the collection at most K/2.
FiniteMetricSpace halver_rescale(const FiniteMetricSpace& space,
                                 const PairCollection& collection,
                                 const PointPair& anchor, const Rational& K);

PairCollection null_check(const FiniteMetricSpace& space,
                          const PairCollection& collection, const Rational& eps);

// Checks that pairs have two distinct in-range points and meet in <= 1 point.
std::vector<std::string> validate_collection(const FiniteMetricSpace& space,
                                             const PairCollection& collection);

bool same_pair(const PointPair& a, const PointPair& b);

}  // namespace bforge
