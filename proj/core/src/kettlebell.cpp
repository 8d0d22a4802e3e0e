#include "bforge/kettlebell.hpp"

#include "bforge/errors.hpp"

#include <algorithm>
#include <deque>

namespace bforge {

KettlebellSystem::KettlebellSystem(std::shared_ptr<const GluedSpace> glued)
    : g_(std::move(glued)),
      adj_(adjacency(g_->system->tree)),
      depth_(tree_distances(g_->system->tree, g_->system->tree.base)) {
  for (const auto& [id, _] : adj_) classes_[id] = g_->vertex_classes(id);
}

ArcInfo KettlebellSystem::arc(const Edge& e) const {
  const auto& s = *g_->system;
  if (!std::binary_search(s.tree.edges.begin(), s.tree.edges.end(), e))
    throw ArgumentError("(" + e.first + "," + e.second + ") is not an edge");
  const auto& pts = s.cut_pair.at(e.second);
  ArcInfo a;
  a.edge = e;
  a.a = g_->cls(e.second, pts[0]);
  a.b = g_->cls(e.second, pts[1]);
  a.length = g_->dist[a.a][a.b];
  if (a.length == 0)
    throw DomainError("degenerate peripheral arc at (" + e.first + "," + e.second + ")");
  return a;
}

KPoint KettlebellSystem::normalize(KPoint p) const {
  if (!p.on_arc) {
    p.arc = {};
    p.t = 0;
    return p;
  }
  auto info = arc(p.arc);
  if (p.t < 0 || p.t > info.length)
    throw ArgumentError("arc parameter " + to_string(p.t) + " outside [0, " +
                        to_string(info.length) + "]");
  if (p.t == 0) return KPoint::base(info.a);
  if (p.t == info.length) return KPoint::base(info.b);
  return p;
}

Rational KettlebellSystem::distance(const KPoint& x0, const KPoint& y0) const {
  KPoint x = normalize(x0), y = normalize(y0);
  const auto& D = g_->dist;
  if (!x.on_arc && !y.on_arc) return D[x.cls][y.cls];
  if (x.on_arc && !y.on_arc) std::swap(x, y);
  // Now y is on an arc.
  auto ay = arc(y.arc);
  auto to_base = [&](std::size_t c) {
    Rational r0 = y.t + D[ay.a][c];
    Rational r1 = ay.length - y.t + D[ay.b][c];
    return r0 < r1 ? r0 : r1;
  };
  if (!x.on_arc) return to_base(x.cls);
  if (x.arc == y.arc) return abs_diff(x.t, y.t);
  auto ax = arc(x.arc);
  Rational best;
  bool first = true;
  for (int i = 0; i < 2; ++i) {
    std::size_t end_x = i == 0 ? ax.a : ax.b;
    Rational leg = i == 0 ? Rational(x.t) : Rational(ax.length - x.t);
    Rational r = leg + to_base(end_x);
    if (first || r < best) best = r;
    first = false;
  }
  return best;
}

bool KettlebellSystem::contains(const std::set<std::string>& F, const KPoint& p) const {
  if (p.on_arc) {
    bool vin = F.count(p.arc.first) > 0, win = F.count(p.arc.second) > 0;
    return vin != win;
  }
  for (const auto& m : g_->classes[p.cls].members)
    if (F.count(m.first)) return true;
  return false;
}

std::vector<std::string> KettlebellSystem::augmenting_chain(const std::set<std::string>& F,
                                                            const std::set<std::string>& Fbig,
                                                            ChainOrder order) const {
  if (!std::includes(Fbig.begin(), Fbig.end(), F.begin(), F.end()))
    throw ArgumentError("bond: F is not contained in F'");
  const auto& T = g_->system->tree;
  if (!is_connected_subtree(T, F) || !is_connected_subtree(T, Fbig))
    throw ArgumentError("bond: subtrees must be connected");
  std::map<std::string, int> dist;
  std::deque<std::string> queue;
  for (const auto& x : F) {
    dist[x] = 0;
    queue.push_back(x);
  }
  while (!queue.empty()) {
    auto x = queue.front();
    queue.pop_front();
    for (const auto& y : adj_.at(x))
      if (Fbig.count(y) && !dist.count(y)) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
  }
  std::vector<std::string> chain;
  for (const auto& x : Fbig)
    if (!F.count(x)) chain.push_back(x);
  std::sort(chain.begin(), chain.end(), [&](const std::string& a, const std::string& b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return order == ChainOrder::Lexicographic ? a < b : a > b;
  });
  return chain;
}

std::string KettlebellSystem::inner_neighbor(const std::set<std::string>& G,
                                             const std::string& z) const {
  std::string found;
  int count = 0;
  for (const auto& y : adj_.at(z))
    if (G.count(y) && y != z) {
      found = y;
      ++count;
    }
  if (count != 1) throw ArgumentError("bond: '" + z + "' is not a leaf of the current subtree");
  return found;
}

Rational KettlebellSystem::urysohn_value(const KPoint& p, const ArcInfo& target) const {
  Rational da = distance(p, KPoint::base(target.a));
  Rational db = distance(p, KPoint::base(target.b));
  return target.length * da / (da + db);
}

KPoint KettlebellSystem::remove_leaf(const std::set<std::string>& G, const std::string& z,
                                     KPoint x) const {
  const auto& T = g_->system->tree;
  if (T.is_w(z)) {
    auto v = inner_neighbor(G, z);
    if (x.on_arc && x.arc.second == z && x.arc.first != v) x.arc.first = v;
    return x;
  }
  auto w = inner_neighbor(G, z);
  auto target = arc({z, w});
  bool affected = false;
  if (x.on_arc) {
    affected = x.arc.first == z;
  } else {
    const auto& zc = classes_.at(z);
    affected = std::find(zc.begin(), zc.end(), x.cls) != zc.end() && x.cls != target.a &&
               x.cls != target.b;
  }
  if (!affected) return x;
  KPoint y;
  y.on_arc = true;
  y.arc = target.edge;
  y.t = urysohn_value(x, target);
  return normalize(y);
}

ArcInterval KettlebellSystem::remove_leaf(const std::set<std::string>& G, const std::string& z,
                                          ArcInterval I) const {
  const auto& T = g_->system->tree;
  if (T.is_w(z)) {
    auto v = inner_neighbor(G, z);
    if (I.arc.second == z && I.arc.first != v) I.arc.first = v;
    return I;
  }
  if (I.arc.first != z) return I;
  auto w = inner_neighbor(G, z);
  auto target = arc({z, w});
  auto src = arc(I.arc);
  const auto& D = g_->dist;
  // On each piece between breakpoints both distances to the target's ends
  // are affine in t, so u is monotone there and extremes sit at candidates.
  std::vector<Rational> cand{I.lo, I.hi};
  for (std::size_t c : {target.a, target.b}) {
    Rational tc = (src.length + D[src.b][c] - D[src.a][c]) / 2;
    if (tc > I.lo && tc < I.hi) cand.push_back(tc);
  }
  ArcInterval out{target.edge, Rational(0), Rational(0)};
  bool first = true;
  for (const auto& t : cand) {
    KPoint p{true, 0, I.arc, t};
    Rational u = urysohn_value(normalize(p), target);
    if (first || u < out.lo) out.lo = u;
    if (first || u > out.hi) out.hi = u;
    first = false;
  }
  return out;
}

KPoint KettlebellSystem::bond(const std::set<std::string>& Fbig, const std::set<std::string>& F,
                              KPoint x, ChainOrder order) const {
  x = normalize(x);
  if (!contains(Fbig, x)) throw ArgumentError("bond: point is not in M*_{F'}");
  auto chain = augmenting_chain(F, Fbig, order);
  std::set<std::string> G = Fbig;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    x = remove_leaf(G, *it, x);
    G.erase(*it);
  }
  return x;
}

ArcInterval KettlebellSystem::bond(const std::set<std::string>& Fbig,
                                   const std::set<std::string>& F, ArcInterval I,
                                   ChainOrder order) const {
  KPoint probe{true, 0, I.arc, I.lo};
  if (!contains(Fbig, probe)) throw ArgumentError("bond: interval is not on an arc of M*_{F'}");
  auto chain = augmenting_chain(F, Fbig, order);
  std::set<std::string> G = Fbig;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    I = remove_leaf(G, *it, I);
    G.erase(*it);
  }
  return I;
}

std::set<std::string> KettlebellSystem::hull(const std::set<std::string>& F, std::size_t x) const {
  std::map<std::string, std::string> parent;
  std::deque<std::string> queue;
  for (const auto& f : F) {
    parent[f] = f;
    queue.push_back(f);
  }
  std::set<std::string> members;
  for (const auto& m : g_->classes.at(x).members) members.insert(m.first);
  std::string hit;
  for (const auto& f : F)
    if (members.count(f)) return F;
  while (!queue.empty() && hit.empty()) {
    auto u = queue.front();
    queue.pop_front();
    for (const auto& y : adj_.at(u)) {
      if (parent.count(y)) continue;
      parent[y] = u;
      if (members.count(y)) {
        hit = y;
        break;
      }
      queue.push_back(y);
    }
  }
  if (hit.empty()) throw DepthError("gamma: class is not reachable in the truncation");
  std::set<std::string> out = F;
  for (std::string u = hit; !F.count(u); u = parent[u]) out.insert(u);
  return out;
}

KPoint KettlebellSystem::gamma(const std::set<std::string>& F, std::size_t x) const {
  return bond(hull(F, x), F, KPoint::base(x));
}

KPoint KettlebellSystem::gamma(const std::set<std::string>& F, std::size_t x,
                               const std::set<std::string>& Fbig) const {
  if (!contains(Fbig, KPoint::base(x))) {
    auto need = hull(F, x);
    std::string far;
    for (const auto& u : need)
      if (!Fbig.count(u)) far = u;
    throw DepthError("gamma: filtration member does not contain the point; it needs '" + far + "'");
  }
  return bond(Fbig, F, KPoint::base(x));
}

std::vector<ArcInterval> KettlebellSystem::boundary_gamma(const std::set<std::string>& F,
                                                          const EndDescriptor& end, int n) const {
  if (end.kind == EndDescriptor::Kind::Redundant)
    throw ArgumentError("boundary_gamma: end " + end.id() +
                        " is redundant; its limit is the base point " + end.witness);
  return boundary_gamma(F, end.ray, n);
}

std::vector<ArcInterval> KettlebellSystem::boundary_gamma(const std::set<std::string>& F,
                                                          const std::vector<std::string>& ray,
                                                          int n) const {
  if (ray.empty() || !F.count(ray.front()))
    throw ArgumentError("boundary_gamma: ray must start inside F");
  for (std::size_t i = 0; i + 1 < ray.size(); ++i) {
    const auto& nb = adj_.at(ray[i]);
    if (!std::binary_search(nb.begin(), nb.end(), ray[i + 1]))
      throw ArgumentError("boundary_gamma: ray vertices " + ray[i] + ", " + ray[i + 1] +
                          " are not adjacent");
  }
  std::size_t exit = 0;
  while (exit < ray.size() && F.count(ray[exit])) ++exit;
  if (exit == ray.size()) throw ArgumentError("boundary_gamma: ray never leaves F");
  if (n < 1) return {};
  if (exit + 2 * static_cast<std::size_t>(n - 1) >= ray.size())
    throw DepthError("boundary_gamma: ray too short for depth " + std::to_string(n));
  const auto& T = g_->system->tree;
  std::vector<ArcInterval> out;
  std::set<std::string> Fj = F;
  for (int j = 1; j <= n; ++j) {
    std::size_t e = exit + 2 * static_cast<std::size_t>(j - 1);
    if (j > 1) {
      Fj.insert(ray[e - 2]);
      Fj.insert(ray[e - 1]);
    }
    Edge edge = T.is_v(ray[e]) ? Edge{ray[e], ray[e - 1]} : Edge{ray[e - 1], ray[e]};
    auto info = arc(edge);
    out.push_back(bond(Fj, F, ArcInterval{edge, Rational(0), info.length}));
  }
  return out;
}

std::set<std::string> KettlebellSystem::ball(int j) const {
  std::set<std::string> out;
  for (const auto& [id, d] : depth_)
    if (d <= 2 * j) out.insert(id);
  return out;
}

KettlebellComplex build_kettlebell(const KettlebellSystem& ks, const std::set<std::string>& F) {
  const auto& g = ks.glued();
  KettlebellComplex k;
  k.subtree = F;
  auto fd = frontier_data(*g.system, F);
  for (std::size_t c = 0; c < g.size(); ++c)
    if (ks.contains(F, KPoint::base(c))) k.base.push_back(c);
  for (const auto& e : fd.edges) k.arcs.push_back(ks.arc(e));
  return k;
}

std::vector<std::set<std::string>> filtration(const KettlebellSystem& ks, int k) {
  std::vector<std::set<std::string>> out;
  const auto& T = ks.glued().system->tree;
  auto depth = tree_distances(T, T.base);
  for (int j = 0; j <= k; ++j) {
    auto b = ks.ball(j);
    out.push_back(b);
    if (j == k) break;
    bool grew = false;
    for (const auto& [id, d] : depth)
      if (d == 2 * j + 1) {
        b.insert(id);
        grew = true;
      }
    if (grew) out.push_back(b);
  }
  return out;
}

// ---------------------------------------------------------------- comparison

namespace {

int extension_steps(int k) { return std::max(k + 4, 8); }

bool interior(const ArcInterval& I, const Rational& L) { return I.lo > 0 && I.hi < L; }

}  // namespace

LimitSamples default_samples(const TreeSystem& system, int k, std::size_t n_base,
                             std::size_t n_ends) {
  LimitSamples s;
  auto S = system_at_depth(system, k);
  const auto& V = S.tree.v_nodes;
  for (std::size_t i = 0; i < n_base && !V.empty(); ++i) {
    const auto& v = V[i * V.size() / n_base];
    const auto& pts = S.constituent.at(v).points;
    PointRef r{v, pts[i % pts.size()]};
    if (std::find(s.base.begin(), s.base.end(), r) == s.base.end()) s.base.push_back(r);
  }
  std::vector<EndDescriptor> nr;
  for (auto& e : enumerate_ends(system, k))
    if (e.kind == EndDescriptor::Kind::NonRedundant) nr.push_back(std::move(e));
  for (std::size_t i = 0; i < n_ends && !nr.empty(); ++i) {
    const auto& e = nr[i * nr.size() / n_ends];
    if (s.ends.empty() || s.ends.back().id() != e.id()) s.ends.push_back(e);
  }
  return s;
}

LimitReport compare_limits(const TreeSystem& system, int k, const LimitSamples& samples) {
  LimitReport rep;
  auto fail = [&](std::string msg) { rep.failures.push_back(std::move(msg)); };
  TreeSystem S = system_at_depth(system, k);
  const int N = extension_steps(k);
  std::vector<std::vector<std::string>> rays;
  for (const auto& e : samples.ends) {
    if (e.kind == EndDescriptor::Kind::Redundant) {
      fail("end " + e.id() + " is redundant; its limit is a base point");
      rays.push_back({});
      continue;
    }
    rays.push_back(e.period.empty() ? e.ray : extend_along(S, e, N));
  }
  auto metrics = assign_shrinking(S);
  auto glued = std::make_shared<const GluedSpace>(glue(S, metrics));
  KettlebellSystem ks(glued);
  std::vector<std::set<std::string>> T;
  for (int j = 0; j <= k; ++j) T.push_back(ks.ball(j));

  std::vector<std::size_t> xs;
  for (const auto& r : samples.base) xs.push_back(glued->cls(r.first, r.second));
  auto member_level = [&](std::size_t x) {
    for (int j = 0; j <= k; ++j)
      if (ks.contains(T[j], KPoint::base(x))) return j;
    return k + 1;
  };

  // (i) threads of base points
  for (auto x : xs) {
    const auto& name = glued->classes[x].name;
    std::vector<KPoint> thread;
    for (int j = 0; j <= k; ++j) thread.push_back(ks.gamma(T[j], x));
    for (int j = 0; j <= k; ++j) {
      if (ks.contains(T[j], KPoint::base(x))) {
        ++rep.checks["base_image_is_base"];
        if (thread[j] != KPoint::base(x)) fail(name + ": gamma is not the identity on M_F");
      }
      for (int jj = j + 1; jj <= k; ++jj) {
        ++rep.checks["thread_consistency"];
        if (ks.bond(T[jj], T[j], thread[jj]) != thread[j])
          fail(name + ": bond(T" + std::to_string(jj) + "->T" + std::to_string(j) +
               ") disagrees with gamma");
        ++rep.checks["chain_independence"];
        if (ks.bond(T[jj], T[j], thread[jj], ChainOrder::ReverseLexicographic) != thread[j])
          fail(name + ": second augmenting chain disagrees");
      }
    }
    ++rep.checks["eventually_constant"];
    if (member_level(x) <= k && thread[k] != KPoint::base(x)) fail(name + ": thread not constant");
  }

  // (iii) nested arcs, per end and per truncation level
  std::vector<std::vector<std::vector<ArcInterval>>> arcs(samples.ends.size());
  for (std::size_t i = 0; i < samples.ends.size(); ++i) {
    const auto& ray = rays[i];
    if (ray.empty()) continue;
    const auto id = samples.ends[i].id();
    arcs[i].resize(k + 1);
    for (int j = 0; j <= k; ++j) {
      int exit = 2 * j + 1;
      int n = (static_cast<int>(ray.size()) - 1 - exit) / 2 + 1;
      if (n < 1) continue;
      auto A = ks.boundary_gamma(T[j], ray, n);
      arcs[i][j] = A;
      auto L = ks.arc(A.front().arc).length;
      bool any_interior = false;
      for (int m = 0; m < n; ++m) {
        ++rep.checks["nested_arc_length"];
        if (A[m].length() > pow2(-m))  // n = m+1, bound 2^(-n+1)
          fail(id + ": |A_" + std::to_string(m + 1) + "| = " + to_string(A[m].length()) +
               " at T" + std::to_string(j));
        if (static_cast<std::size_t>(m) >= rep.max_interval_length_per_n.size())
          rep.max_interval_length_per_n.push_back(A[m].length());
        else if (A[m].length() > rep.max_interval_length_per_n[m])
          rep.max_interval_length_per_n[m] = A[m].length();
        if (m > 0) {
          ++rep.checks["nested_arc_inclusion"];
          if (A[m].arc != A[m - 1].arc || A[m].lo < A[m - 1].lo || A[m].hi > A[m - 1].hi)
            fail(id + ": A_" + std::to_string(m + 1) + " not inside A_" + std::to_string(m));
        }
        if (interior(A[m], L)) any_interior = true;
      }
      ++rep.checks["end_image_interior"];
      if (!any_interior)
        fail(id + ": image at T" + std::to_string(j) + " not certified arc-interior");
    }
    // threads of ends: bond(T_j' -> T_j) A^(j')_m = A^(j)_(m + j' - j)
    for (int j = 0; j <= k; ++j)
      for (int jj = j + 1; jj <= k; ++jj)
        for (std::size_t m = 0; m < arcs[i][jj].size(); ++m) {
          std::size_t mm = m + static_cast<std::size_t>(jj - j);
          if (mm >= arcs[i][j].size()) break;
          ++rep.checks["end_thread_consistency"];
          if (ks.bond(T[jj], T[j], arcs[i][jj][m]) != arcs[i][j][mm])
            fail(id + ": nested arc " + std::to_string(m + 1) + " at T" + std::to_string(jj) +
                 " does not bond onto level T" + std::to_string(j));
        }
  }

  // (ii) injectivity witnesses
  for (std::size_t a = 0; a < xs.size(); ++a)
    for (std::size_t b = a + 1; b < xs.size(); ++b) {
      if (xs[a] == xs[b]) continue;
      ++rep.checks["separation_base_base"];
      int j = std::max(member_level(xs[a]), member_level(xs[b]));
      if (j > k || ks.distance(ks.gamma(T[j], xs[a]), ks.gamma(T[j], xs[b])) <= 0)
        fail(glued->classes[xs[a]].name + " / " + glued->classes[xs[b]].name + ": not separated");
    }
  for (auto x : xs)
    for (std::size_t i = 0; i < samples.ends.size(); ++i) {
      if (arcs[i].empty()) continue;
      ++rep.checks["separation_end_base"];
      int j = member_level(x);
      bool ok = false;
      if (j <= k && !arcs[i][j].empty()) {
        auto L = ks.arc(arcs[i][j].front().arc).length;
        for (const auto& I : arcs[i][j]) ok = ok || interior(I, L);
        ok = ok && !ks.gamma(T[j], x).on_arc;
      }
      if (!ok) fail(samples.ends[i].id() + " / " + glued->classes[x].name + ": not separated");
    }
  for (std::size_t a = 0; a < samples.ends.size(); ++a)
    for (std::size_t b = a + 1; b < samples.ends.size(); ++b) {
      if (arcs[a].empty() || arcs[b].empty()) continue;
      ++rep.checks["separation_end_end"];
      bool ok = false;
      for (int j = 0; j <= k && !ok; ++j) {
        const auto& A = arcs[a][j];
        const auto& B = arcs[b][j];
        if (A.empty() || B.empty()) continue;
        if (A.front().arc != B.front().arc) {
          auto La = ks.arc(A.front().arc).length, Lb = ks.arc(B.front().arc).length;
          bool ia = false, ib = false;
          for (const auto& I : A) ia = ia || interior(I, La);
          for (const auto& I : B) ib = ib || interior(I, Lb);
          ok = ia && ib;
        } else {
          for (std::size_t m = 0; m < A.size() && m < B.size() && !ok; ++m)
            ok = A[m].hi < B[m].lo || B[m].hi < A[m].lo;
        }
      }
      if (!ok) fail(samples.ends[a].id() + " / " + samples.ends[b].id() + ": not separated");
    }
  return rep;
}

}  // namespace bforge
