#pragma once

#include "bforge/glue_space.hpp"

namespace bforge {

// A point of some M_F^*: a glued class, or parameter t on the arc of a
// frontier edge. Arc endpoints are always stored as base points.
struct KPoint {
  bool on_arc = false;
  std::size_t cls = 0;
  Edge arc;
  Rational t;

  static KPoint base(std::size_t c) { return KPoint{false, c, {}, Rational(0)}; }
  bool operator==(const KPoint&) const = default;
};

// Closed sub-interval [lo, hi] of the arc of `arc`.
struct ArcInterval {
  Edge arc;
  Rational lo, hi;
  Rational length() const { return hi - lo; }
  bool operator==(const ArcInterval&) const = default;
};

struct ArcInfo {
  Edge edge;
  std::size_t a = 0, b = 0;  // classes of the W-node's first and second point
  Rational length;
};

enum class ChainOrder { Lexicographic, ReverseLexicographic };

// Shared context for every kettlebell over one glued truncation.
class KettlebellSystem {
 public:
  explicit KettlebellSystem(std::shared_ptr<const GluedSpace> glued);

  const GluedSpace& glued() const { return *g_; }
  std::shared_ptr<const GluedSpace> glued_ptr() const { return g_; }

  ArcInfo arc(const Edge& e) const;
  KPoint normalize(KPoint p) const;
  Rational distance(const KPoint& x, const KPoint& y) const;
  bool contains(const std::set<std::string>& F, const KPoint& p) const;

  // Vertices of F' \ F in the order they are added (distance from F, then id).
  std::vector<std::string> augmenting_chain(const std::set<std::string>& F,
                                            const std::set<std::string>& Fbig,
                                            ChainOrder order) const;

  KPoint bond(const std::set<std::string>& Fbig, const std::set<std::string>& F, KPoint x,
              ChainOrder order = ChainOrder::Lexicographic) const;
  ArcInterval bond(const std::set<std::string>& Fbig, const std::set<std::string>& F,
                   ArcInterval I, ChainOrder order = ChainOrder::Lexicographic) const;

  // gamma_F(x) through the smallest subtree containing F and a member of x.
  KPoint gamma(const std::set<std::string>& F, std::size_t x) const;
  KPoint gamma(const std::set<std::string>& F, std::size_t x,
               const std::set<std::string>& Fbig) const;
  std::set<std::string> hull(const std::set<std::string>& F, std::size_t x) const;

  // A_1 ⊇ ... ⊇ A_n for the end whose ray (from inside F) is given.
  std::vector<ArcInterval> boundary_gamma(const std::set<std::string>& F,
                                          const std::vector<std::string>& ray, int n) const;
  // Refuses redundant ends; the ray must already be long enough for n.
  std::vector<ArcInterval> boundary_gamma(const std::set<std::string>& F, const EndDescriptor& end,
                                          int n) const;

  std::set<std::string> ball(int j) const;  // vertices within 2j of the base

 private:
  KPoint remove_leaf(const std::set<std::string>& G, const std::string& z, KPoint x) const;
  ArcInterval remove_leaf(const std::set<std::string>& G, const std::string& z,
                          ArcInterval I) const;
  std::string inner_neighbor(const std::set<std::string>& G, const std::string& z) const;
  Rational urysohn_value(const KPoint& p, const ArcInfo& target) const;

  std::shared_ptr<const GluedSpace> g_;
  Adjacency adj_;
  std::map<std::string, int> depth_;
  std::map<std::string, std::vector<std::size_t>> classes_;
};

struct KettlebellComplex {
  std::set<std::string> subtree;
  std::vector<std::size_t> base;  // classes of M_F
  std::vector<ArcInfo> arcs;      // one per edge of N_F
};

KettlebellComplex build_kettlebell(const KettlebellSystem& ks, const std::set<std::string>& F);

// T_0 ⊂ T_0 ∪ W_1 ⊂ T_1 ⊂ ... ⊂ T_k.
std::vector<std::set<std::string>> filtration(const KettlebellSystem& ks, int k);

struct LimitSamples {
  std::vector<PointRef> base;
  std::vector<EndDescriptor> ends;
};

struct LimitReport {
  std::map<std::string, std::size_t> checks;
  std::vector<std::string> failures;
  std::vector<Rational> max_interval_length_per_n;  // index n-1
  bool ok() const { return failures.empty(); }
};

// Deterministic spread of base points and non-redundant ends.
LimitSamples default_samples(const TreeSystem& system, int k, std::size_t n_base,
                             std::size_t n_ends);

LimitReport compare_limits(const TreeSystem& system, int k, const LimitSamples& samples);

}  // namespace bforge
