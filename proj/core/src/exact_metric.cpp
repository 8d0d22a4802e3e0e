#include "bforge/exact_metric.hpp"

#include "bforge/errors.hpp"

#include <algorithm>
#include <set>

namespace bforge {

std::size_t FiniteMetricSpace::index(const std::string& id) const {
  auto it = std::find(points.begin(), points.end(), id);
  if (it == points.end()) throw ArgumentError("unknown point '" + id + "'");
  return static_cast<std::size_t>(it - points.begin());
}

bool FiniteMetricSpace::contains(const std::string& id) const {
  return std::find(points.begin(), points.end(), id) != points.end();
}

FiniteMetricSpace make_space(std::vector<std::string> points,
                             std::vector<std::vector<Rational>> dist) {
  FiniteMetricSpace s;
  s.points = std::move(points);
  s.dist = std::move(dist);
  return s;
}

ValidationReport validate_metric(const FiniteMetricSpace& space) {
  ValidationReport r;
  const std::size_t n = space.points.size();
  if (space.dist.size() != n)
    r.structural.push_back("distance table has " + std::to_string(space.dist.size()) +
                           " rows for " + std::to_string(n) + " points");
  for (std::size_t i = 0; i < space.dist.size(); ++i)
    if (space.dist[i].size() != n)
      r.structural.push_back("row " + std::to_string(i) + " has " +
                             std::to_string(space.dist[i].size()) + " entries");
  std::set<std::string> seen;
  for (const auto& p : space.points)
    if (!seen.insert(p).second) r.structural.push_back("duplicate point '" + p + "'");
  if (!r.structural.empty()) return r;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (space.dist[i][j] < 0)
        r.structural.push_back("negative entry at (" + space.points[i] + "," +
                               space.points[j] + ")");
  if (!r.structural.empty()) return r;

  const auto& P = space.points;
  for (std::size_t i = 0; i < n; ++i) {
    if (space.dist[i][i] != 0) r.violations.push_back({"identity", {P[i]}});
    for (std::size_t j = i + 1; j < n; ++j) {
      if (space.dist[i][j] != space.dist[j][i])
        r.violations.push_back({"symmetry", {P[i], P[j]}});
      if (space.dist[i][j] == 0 || space.dist[j][i] == 0)
        r.violations.push_back({"positivity", {P[i], P[j]}});
    }
  }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t z = x + 1; z < n; ++z)
      for (std::size_t y = 0; y < n; ++y) {
        if (y == x || y == z) continue;
        if (space.dist[x][z] > space.dist[x][y] + space.dist[y][z])
          r.violations.push_back({"triangle", {P[x], P[z], P[y]}});
      }
  return r;
}

Rational diameter(const FiniteMetricSpace& space) {
  Rational best(0);
  for (const auto& row : space.dist)
    for (const auto& v : row)
      if (v > best) best = v;
  return best;
}

Rational pair_diameter(const FiniteMetricSpace& space, const PointPair& c) {
  return space.dist[c.first][c.second];
}

bool same_pair(const PointPair& a, const PointPair& b) {
  return (a.first == b.first && a.second == b.second) ||
         (a.first == b.second && a.second == b.first);
}

std::vector<std::string> validate_collection(const FiniteMetricSpace& space,
                                             const PairCollection& collection) {
  std::vector<std::string> out;
  const std::size_t n = space.size();
  for (std::size_t i = 0; i < collection.size(); ++i) {
    const auto& c = collection[i];
    if (c.first >= n || c.second >= n)
      out.push_back("pair " + std::to_string(i) + " has a point outside the space");
    else if (c.first == c.second)
      out.push_back("pair " + std::to_string(i) + " is degenerate");
  }
  if (!out.empty()) return out;
  for (std::size_t i = 0; i < collection.size(); ++i)
    for (std::size_t j = i + 1; j < collection.size(); ++j) {
      std::set<std::size_t> a{collection[i].first, collection[i].second};
      int common = static_cast<int>(a.count(collection[j].first) + a.count(collection[j].second));
      if (common > 1)
        out.push_back("pairs " + std::to_string(i) + " and " + std::to_string(j) +
                      " overlap in 2 points");
    }
  return out;
}

std::vector<Rational> urysohn_map(const FiniteMetricSpace& space, std::size_t p,
                                  std::size_t q) {
  if (p >= space.size() || q >= space.size())
    throw ArgumentError("urysohn_map: point index out of range");
  if (p == q) throw DomainError("urysohn_map: p = q");
  const Rational& dpq = space.d(p, q);
  std::vector<Rational> u(space.size());
  for (std::size_t x = 0; x < space.size(); ++x) {
    if (x == p) {
      u[x] = 0;
    } else if (x == q) {
      u[x] = dpq;
    } else {
      u[x] = space.d(x, p) * dpq / (space.d(x, p) + space.d(x, q));
    }
  }
  return u;
}

FiniteMetricSpace halver_rescale(const FiniteMetricSpace& space,
                                 const PairCollection& collection,
                                 const PointPair& anchor, const Rational& K) {
  if (anchor.first == anchor.second) throw DomainError("halver_rescale: a = b");
  if (K <= 0) throw ArgumentError("halver_rescale: K must be positive");
  auto in_collection = std::any_of(collection.begin(), collection.end(),
                                   [&](const PointPair& c) { return same_pair(c, anchor); });
  if (!in_collection) throw ArgumentError("halver_rescale: anchor pair not in collection");
  if (!validate_metric(space).ok())
    throw ArgumentError("halver_rescale: input is not a metric space");

  const std::size_t n = space.size();
  const std::size_t a = anchor.first, b = anchor.second;
  const Rational scale = space.d(a, b);

  // d' = d / d(a,b), so d'(a,b) = 1.
  std::vector<std::vector<Rational>> dp(n, std::vector<Rational>(n));
  Rational diam_p(0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      dp[i][j] = space.d(i, j) / scale;
      if (dp[i][j] > diam_p) diam_p = dp[i][j];
    }

  std::vector<Rational> u(n);
  for (std::size_t x = 0; x < n; ++x) u[x] = dp[x][a] / (dp[x][a] + dp[x][b]);

  // Points of the large non-anchor pairs, minus the anchor itself.
  const Rational half(1, 2);
  Rational l1 = half, l2 = half;
  for (const auto& c : collection) {
    if (same_pair(c, anchor) || dp[c.first][c.second] <= half) continue;
    for (std::size_t x : {c.first, c.second}) {
      if (x == a || x == b) continue;
      if (u[x] < l1) l1 = u[x];
      if (u[x] > l2) l2 = u[x];
    }
  }

  auto f1 = [&](const Rational& t) -> Rational {
    if (t <= l1) return t / (2 * l1);
    if (t <= l2) return half;
    return half + (t - l2) / (2 * (1 - l2));
  };
  std::vector<Rational> f(n);
  for (std::size_t x = 0; x < n; ++x) f[x] = f1(u[x]);

  FiniteMetricSpace out;
  out.points = space.points;
  out.marked_pairs = space.marked_pairs;
  out.dist.assign(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      Rational first = dp[i][j] / (2 * diam_p);
      Rational second = abs_diff(f[i], f[j]);
      out.dist[i][j] = K * (first > second ? first : second);
    }
  return out;
}

PairCollection null_check(const FiniteMetricSpace& space, const PairCollection& collection,
                          const Rational& eps) {
  PairCollection out;
  for (const auto& c : collection)
    if (space.d(c.first, c.second) > eps) out.push_back(c);
  return out;
}

}  // namespace bforge
