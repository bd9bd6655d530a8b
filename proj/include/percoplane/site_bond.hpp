#pragma once

// Site configurations on Ĝ1 turned into bond configurations (an edge is open
// iff both ends are open), their planar duals (complementary states on dual
// edges), cluster statistics, and the exact correspondence between the faces
// of Ĝ1(ω), the open clusters of the dual, and the 0-clusters of Ĝ2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "percoplane/matching.hpp"
#include "percoplane/planar_map.hpp"
#include "percoplane/rng.hpp"
#include "percoplane/union_find.hpp"

namespace percoplane {

struct SiteConfig {
  std::vector<std::uint8_t> state;  // one entry per vertex of the graph (sites included)

  std::size_t size() const { return state.size(); }
  bool open(std::size_t v) const { return state[v] != 0; }
};

/// Full configuration on g from states on the base vertices; facial sites
/// take their forced state.
inline SiteConfig extend(const AugmentedGraph& g, const std::vector<std::uint8_t>& base_states) {
  if (base_states.size() != g.base_vertex_count())
    throw Error("site configuration has the wrong length");
  SiteConfig c;
  c.state.resize(g.vertex_count());
  std::copy(base_states.begin(), base_states.end(), c.state.begin());
  for (std::size_t v = g.base_vertex_count(); v < g.vertex_count(); ++v)
    c.state[v] = static_cast<std::uint8_t>(g.forced(v));
  return c;
}

inline void check_forced(const AugmentedGraph& g, const SiteConfig& c) {
  if (c.size() != g.vertex_count()) throw Error("site configuration has the wrong length");
  for (std::size_t v = g.base_vertex_count(); v < g.vertex_count(); ++v)
    if (c.state[v] != g.forced(v))
      throw ForcedStateViolated("facial site " + std::to_string(v) + " has state " +
                                std::to_string(c.state[v]) + " but is forced to " +
                                std::to_string(g.forced(v)));
}

/// 0/1 state per edge of `graph`. When `dual` is set, edge e of `graph` and
/// edge e of `dual` are a dual pair.
struct BondConfig {
  std::vector<std::uint8_t> state;
  std::shared_ptr<const CombinatorialMap> graph;
  std::shared_ptr<const CombinatorialMap> dual;

  std::size_t size() const { return state.size(); }
};

/// Ĝ1 together with everything the duality checks derive from it.
class DualityContext {
 public:
  DualityContext(std::shared_ptr<const CombinatorialMap> m, const FacePartition& p) : base_(m) {
    auto [h1, h2] = hatted_graphs(m, p);
    g1_ = std::move(h1);
    g2_ = std::move(h2);
    sited_ = std::make_shared<const CombinatorialMap>(g1_.planar()->map);
    dual_ = std::make_shared<const CombinatorialMap>(dual(*sited_));
  }
  DualityContext(const CombinatorialMap& m, const FacePartition& p)
      : DualityContext(std::make_shared<const CombinatorialMap>(m), p) {}

  const CombinatorialMap& base() const { return *base_; }
  const AugmentedGraph& g1hat() const { return g1_; }
  const AugmentedGraph& g2hat() const { return g2_; }
  /// Planar map of Ĝ1 (edge ids agree with g1hat()).
  const CombinatorialMap& sited() const { return *sited_; }
  std::shared_ptr<const CombinatorialMap> sited_ptr() const { return sited_; }
  const CombinatorialMap& dual_map() const { return *dual_; }
  std::shared_ptr<const CombinatorialMap> dual_ptr() const { return dual_; }

 private:
  std::shared_ptr<const CombinatorialMap> base_;
  AugmentedGraph g1_, g2_;
  std::shared_ptr<const CombinatorialMap> sited_, dual_;
};

/// β_ω on the edges of Ĝ1: open iff both endpoints are open.
inline BondConfig bond_from_sites(const DualityContext& ctx, const SiteConfig& omega) {
  check_forced(ctx.g1hat(), omega);
  const auto& g = ctx.g1hat();
  BondConfig b;
  b.graph = ctx.sited_ptr();
  b.dual = ctx.dual_ptr();
  b.state.resize(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    b.state[e] = omega.state[g.edge(e).u] & omega.state[g.edge(e).v];
  return b;
}

/// Same rule on any augmented graph; no dual link.
inline BondConfig bond_from_sites(const AugmentedGraph& g, const SiteConfig& omega) {
  check_forced(g, omega);
  BondConfig b;
  b.state.resize(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    b.state[e] = omega.state[g.edge(e).u] & omega.state[g.edge(e).v];
  if (g.planar()) b.graph = std::make_shared<const CombinatorialMap>(g.planar()->map);
  return b;
}

/// β⁺(e⁺) = 1 − β(e). The result links back to the primal graph, so applying
/// this twice returns the original configuration.
inline BondConfig dual_bond_config(const BondConfig& b) {
  if (!b.dual) throw MissingDualLink("bond configuration has no dual link");
  BondConfig out;
  out.graph = b.dual;
  out.dual = b.graph;
  out.state.resize(b.state.size());
  for (std::size_t e = 0; e < b.state.size(); ++e) out.state[e] = 1 - b.state[e];
  return out;
}

struct Cluster {
  std::vector<std::size_t> vertices;
  bool touches_boundary = false;
  bool wraps = false;

  bool unbounded() const { return touches_boundary || wraps; }
};

struct ClusterStats {
  std::vector<Cluster> open;    // 1-clusters
  std::vector<Cluster> closed;  // 0-clusters (site configurations only)

  std::size_t n_open() const { return open.size(); }
  std::size_t n_closed() const { return closed.size(); }
  std::size_t unbounded_open() const {
    return std::count_if(open.begin(), open.end(), [](const Cluster& c) { return c.unbounded(); });
  }
  std::size_t unbounded_closed() const {
    return std::count_if(closed.begin(), closed.end(), [](const Cluster& c) { return c.unbounded(); });
  }
};

namespace detail {

inline std::vector<Cluster> collect(DisjointSets& ds, const std::vector<char>& member,
                                    const std::vector<char>& boundary) {
  std::vector<std::size_t> slot(member.size(), npos);
  std::vector<Cluster> out;
  for (std::size_t v = 0; v < member.size(); ++v) {
    if (!member[v]) continue;
    auto r = ds.find(v);
    if (slot[r] == npos) {
      slot[r] = out.size();
      out.emplace_back();
      out.back().wraps = ds.wraps(r);
    }
    auto& c = out[slot[r]];
    c.vertices.push_back(v);
    if (!boundary.empty() && boundary[v]) c.touches_boundary = true;
  }
  return out;
}

}  // namespace detail

/// Open and closed clusters of a site configuration (sites included).
inline ClusterStats cluster_stats(const AugmentedGraph& g, const SiteConfig& c) {
  if (c.size() != g.vertex_count()) throw Error("site configuration has the wrong length");
  const std::size_t n = g.vertex_count();
  DisjointSets ds(n);
  for (const auto& e : g.edges())
    if (c.state[e.u] == c.state[e.v]) ds.unite(e.u, e.v, e.shift);
  std::vector<char> open(n), closed(n), boundary(n);
  for (std::size_t v = 0; v < n; ++v) {
    open[v] = c.state[v] != 0;
    closed[v] = !open[v];
    boundary[v] = g.is_boundary(v);
  }
  return {detail::collect(ds, open, boundary), detail::collect(ds, closed, boundary)};
}

/// Open clusters of a bond configuration on b.graph. With `vertex_mask`, only
/// the marked vertices take part (an isolated marked vertex is a singleton
/// cluster); without it every vertex does.
inline ClusterStats cluster_stats(const BondConfig& b,
                                  const std::vector<std::uint8_t>* vertex_mask = nullptr) {
  if (!b.graph) throw Error("bond configuration is not attached to a graph");
  const auto& m = *b.graph;
  if (b.state.size() != m.edge_count()) throw Error("bond configuration has the wrong length");
  DisjointSets ds(m.vertex_count());
  for (std::size_t e = 0; e < m.edge_count(); ++e)
    if (b.state[e]) {
      auto d = m.edge_dart(e);
      ds.unite(m.origin(d), m.target(d), m.shift(d));
    }
  std::vector<char> member(m.vertex_count(), 1), boundary(m.vertex_count(), 0);
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    if (vertex_mask) member[v] = (*vertex_mask)[v] != 0;
    boundary[v] = m.is_boundary(v);
  }
  return {detail::collect(ds, member, boundary), {}};
}

struct CorrespondenceReport {
  std::size_t violations = 0;
  std::vector<std::string> witnesses;  // first few violations, human readable
  std::size_t regions = 0;             // faces of Ĝ1(ω) (outer region excluded)
  std::size_t empty_regions = 0;       // regions without closed vertices
  std::size_t n_site = 0;              // open clusters of Ĝ1(ω)
  std::size_t n_bond = 0;              // open clusters of β_ω, singleton convention
  std::size_t n_closed = 0;            // 0-clusters of Ĝ2(ω̄) (outer region excluded)
  std::size_t n_dual = 0;              // open clusters of β⁺ (outer region excluded)
  std::size_t wrapping_closed = 0;
  std::size_t wrapping_dual = 0;

  bool ok() const { return violations == 0; }

  void fail(std::string what) {
    ++violations;
    if (witnesses.size() < 16) witnesses.push_back(std::move(what));
  }
};

/// Checks, for ω on the base vertices, that every face F of Ĝ1(ω)
///  (i)   contains exactly one open cluster C1(F) of the dual configuration β⁺,
///  (ii)  contains exactly one 0-cluster C2(F) of Ĝ2(ω̄), or none when F is an
///        all-open triangle,
///  (iii) F -> C1(F) and F -> C2(F) are bijections,
///  (iv)  N(Ĝ1(ω)) = N(β_ω) and N̄(Ĝ2(ω̄)) = N(β⁺) − #empty faces, with
///        wrapping preserved on a torus.
/// On a free patch the face of Ĝ1(ω) containing the outer face is left out.
inline CorrespondenceReport correspondence_check(const DualityContext& ctx,
                                                 const std::vector<std::uint8_t>& omega) {
  CorrespondenceReport rep;
  const auto& s1 = ctx.sited();
  const auto& dm = ctx.dual_map();
  const auto& g1 = ctx.g1hat();
  const auto& g2 = ctx.g2hat();
  const std::size_t nv = ctx.base().vertex_count();

  const SiteConfig w1 = extend(g1, omega);
  const BondConfig beta = bond_from_sites(ctx, w1);
  const BondConfig plus = dual_bond_config(beta);

  // Faces of Ĝ1(ω), built cell by cell: faces of the sited map glued across
  // closed edges and around closed vertices.
  DisjointSets regions(s1.face_count());
  for (std::size_t d = 0; d < s1.dart_count(); ++d)
    if (!beta.state[s1.edge_of(d)]) regions.unite(s1.face_of(d), s1.face_of(s1.twin(d)));
  for (std::size_t v = 0; v < s1.vertex_count(); ++v)
    if (!w1.open(v))
      for (auto d : s1.vertex_darts(v)) regions.unite(s1.face_of(s1.first_dart(v)), s1.face_of(d));
  const std::size_t outer_region =
      s1.outer_face() ? regions.find(*s1.outer_face()) : npos;

  // Open clusters of β⁺ on the dual map.
  DisjointSets comps(dm.vertex_count());
  for (std::size_t e = 0; e < dm.edge_count(); ++e)
    if (plus.state[e]) {
      auto d = dm.edge_dart(e);
      comps.unite(dm.origin(d), dm.target(d), dm.shift(d));
    }

  // (i) and the C1 half of (iii): the two partitions of the face set agree.
  std::vector<std::size_t> comp_of_region(s1.face_count(), npos), region_of_comp(s1.face_count(), npos);
  for (std::size_t f = 0; f < s1.face_count(); ++f) {
    auto r = regions.find(f), c = comps.find(f);
    if (comp_of_region[r] == npos) comp_of_region[r] = c;
    if (region_of_comp[c] == npos) region_of_comp[c] = r;
    if (comp_of_region[r] != c)
      rep.fail("(i) face region " + std::to_string(r) + " meets two dual clusters");
    if (region_of_comp[c] != r)
      rep.fail("(iii) dual cluster " + std::to_string(c) + " spans two face regions");
  }

  // 0-clusters of Ĝ2(ω̄): closed base vertices and the (closed) Φ2 sites.
  const SiteConfig w2 = extend(g2, omega);
  DisjointSets zero(g2.vertex_count());
  for (const auto& e : g2.edges())
    if (!w2.state[e.u] && !w2.state[e.v]) zero.unite(e.u, e.v, e.shift);

  auto region_of_g2_vertex = [&](std::size_t x) {
    if (x < nv) return regions.find(s1.face_of(s1.first_dart(x)));
    // a Φ2 site sits in a face of M that carries no Φ1 site, hence is a face of the sited map
    auto f = g2.site(x).face;
    return regions.find(s1.face_of(ctx.base().face_darts(f)[0]));
  };

  std::vector<std::size_t> cluster_of_region(s1.face_count(), npos);
  std::vector<std::size_t> region_of_cluster(g2.vertex_count(), npos);
  for (std::size_t x = 0; x < g2.vertex_count(); ++x) {
    if (w2.state[x]) continue;
    auto r = region_of_g2_vertex(x);
    auto k = zero.find(x);
    if (cluster_of_region[r] == npos) cluster_of_region[r] = k;
    if (region_of_cluster[k] == npos) region_of_cluster[k] = r;
    if (r == outer_region) continue;
    if (cluster_of_region[r] != k)
      rep.fail("(ii) face region " + std::to_string(r) + " holds two 0-clusters");
    if (region_of_cluster[k] != r)
      rep.fail("(iii) 0-cluster of vertex " + std::to_string(x) + " spans two face regions");
  }

  // Empty regions must be single all-open triangles of the sited map.
  std::vector<std::size_t> faces_in_region(s1.face_count(), 0);
  for (std::size_t f = 0; f < s1.face_count(); ++f) ++faces_in_region[regions.find(f)];
  for (std::size_t f = 0; f < s1.face_count(); ++f) {
    auto r = regions.find(f);
    if (r != f || r == outer_region) continue;
    ++rep.regions;
    if (comps.wraps(comp_of_region[r])) ++rep.wrapping_dual;
    if (cluster_of_region[r] == npos) {
      ++rep.empty_regions;
      bool all_open = true;
      for (auto d : s1.face_darts(f)) all_open = all_open && w1.open(s1.origin(d));
      if (faces_in_region[r] != 1 || s1.face_size(f) != 3 || !all_open)
        rep.fail("(ii) face region " + std::to_string(r) + " has no 0-cluster but is not an open triangle");
    } else {
      ++rep.n_closed;
      bool wc = zero.wraps(cluster_of_region[r]);
      if (wc) ++rep.wrapping_closed;
      if (wc != comps.wraps(comp_of_region[r]))
        rep.fail("(iv) wrapping differs between the 0-cluster and dual cluster of region " +
                 std::to_string(r));
    }
  }
  rep.n_dual = rep.regions;

  // (iv) open cluster counts, site view against bond view.
  rep.n_site = cluster_stats(g1, w1).n_open();
  rep.n_bond = cluster_stats(beta, &w1.state).n_open();
  if (rep.n_site != rep.n_bond)
    rep.fail("(iv) N(site) = " + std::to_string(rep.n_site) + " but N(bond) = " + std::to_string(rep.n_bond));

  // (iv) closed clusters against dual clusters, counted independently.
  std::size_t zero_clusters = 0;
  for (std::size_t x = 0; x < g2.vertex_count(); ++x)
    if (!w2.state[x] && zero.find(x) == x && region_of_g2_vertex(x) != outer_region) ++zero_clusters;
  std::size_t dual_clusters = 0;
  for (std::size_t f = 0; f < dm.vertex_count(); ++f)
    if (comps.find(f) == f && region_of_comp[f] != outer_region) ++dual_clusters;
  if (zero_clusters != dual_clusters - rep.empty_regions)
    rep.fail("(iv) N̄ = " + std::to_string(zero_clusters) + " but N(dual) - empty = " +
             std::to_string(dual_clusters) + " - " + std::to_string(rep.empty_regions));
  return rep;
}

/// Empirical one-dependence of β_ω under product measure on the base vertices.
struct DependenceReport {
  double p = 0;
  std::size_t trials = 0;
  double marginal = 0, marginal_expected = 0;        // E[β_e] vs p²
  double adjacent = 0, adjacent_expected = 0;        // E[β_e β_f], e,f sharing one vertex, vs p³
  double disjoint_corr = 0, disjoint_tolerance = 0;  // |corr| < 4/√trials
  double stderr_marginal = 0, stderr_adjacent = 0;

  bool ok() const {
    return std::abs(marginal - marginal_expected) <= 5 * stderr_marginal + 1e-12 &&
           std::abs(adjacent - adjacent_expected) <= 5 * stderr_adjacent + 1e-12 &&
           std::abs(disjoint_corr) < disjoint_tolerance;
  }
};

inline DependenceReport one_dependence_probe(const AugmentedGraph& g1hat, double p,
                                             std::size_t trials, std::uint64_t seed) {
  if (!(p > 0 && p < 1)) throw Error("probe needs 0 < p < 1");
  if (trials < 2) throw Error("probe needs at least two trials");
  const std::size_t nv = g1hat.base_vertex_count();
  // e = (a,b), f = (a,c) share a; g = (x,y) avoids a, b, c and their neighbours
  std::size_t e = npos, f = npos, g = npos;
  for (std::size_t i = 0; i < g1hat.edge_count() && e == npos; ++i)
    if (g1hat.edge(i).u < nv && g1hat.edge(i).v < nv && g1hat.edge(i).u != g1hat.edge(i).v) e = i;
  if (e == npos) throw Error("graph has no edge between base vertices");
  const std::size_t a = g1hat.edge(e).u, b = g1hat.edge(e).v;
  for (const auto& inc : g1hat.neighbours(a))
    if (inc.to < nv && inc.to != b && inc.to != a) {
      f = inc.edge;
      break;
    }
  const std::size_t c = f == npos ? npos : (g1hat.edge(f).u == a ? g1hat.edge(f).v : g1hat.edge(f).u);
  std::vector<char> near(g1hat.vertex_count(), 0);
  for (auto v : {a, b, c}) {
    if (v == npos) continue;
    near[v] = 1;
  }
  for (std::size_t i = 0; i < g1hat.edge_count() && g == npos; ++i) {
    const auto& ed = g1hat.edge(i);
    if (ed.u < nv && ed.v < nv && ed.u != ed.v && !near[ed.u] && !near[ed.v]) g = i;
  }
  if (f == npos || g == npos) throw Error("graph too small for the dependence probe");

  auto open = [&](std::size_t t, std::size_t v) { return element_uniform(seed, t, v) < p; };
  double se = 0, sef = 0, sg = 0, seg = 0, se2 = 0, sg2 = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const double be = open(t, a) && open(t, b);
    const double bf = open(t, a) && open(t, c);
    const double bg = open(t, g1hat.edge(g).u) && open(t, g1hat.edge(g).v);
    se += be;
    sef += be * bf;
    sg += bg;
    seg += be * bg;
    se2 += be * be;
    sg2 += bg * bg;
  }
  const double n = static_cast<double>(trials);
  DependenceReport r;
  r.p = p;
  r.trials = trials;
  r.marginal = se / n;
  r.marginal_expected = p * p;
  r.stderr_marginal = std::sqrt(r.marginal_expected * (1 - r.marginal_expected) / n);
  r.adjacent = sef / n;
  r.adjacent_expected = p * p * p;
  r.stderr_adjacent = std::sqrt(r.adjacent_expected * (1 - r.adjacent_expected) / n);
  const double me = se / n, mg = sg / n;
  const double cov = seg / n - me * mg;
  const double ve = se2 / n - me * me, vg = sg2 / n - mg * mg;
  r.disjoint_corr = (ve > 0 && vg > 0) ? cov / std::sqrt(ve * vg) : 0.0;
  r.disjoint_tolerance = 4.0 / std::sqrt(n);
  return r;
}

}  // namespace percoplane
