#pragma once

// Matching graphs, matching pairs, facial sites and the hatted graphs.
//
// Every graph here is an AugmentedGraph: the base map's vertices and edges
// plus diagonals (tagged with their host face) and/or facial sites (vertex ids
// V, V+1, ... in order of their host face). Graphs carrying facial sites also
// keep the planar embedding obtained by placing each site inside its face.
//
// The outer face of a free patch never receives diagonals or a site.

#include <algorithm>
#include <array>
#include <istream>
#include <memory>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "percoplane/map_io.hpp"
#include "percoplane/planar_map.hpp"

namespace percoplane {

enum class EdgeTag { base, diagonal, facial };
enum class FaceClass : unsigned char { none, f1, f2 };

/// Forced state of the facial sites of a graph: by class (Φ1 open, Φ2
/// closed), or all open / all closed regardless of class.
enum class SiteState { by_class, open, closed };

inline const char* to_string(SiteState s) {
  switch (s) {
    case SiteState::by_class: return "by_class";
    case SiteState::open: return "open";
    case SiteState::closed: return "closed";
  }
  return "?";
}

inline SiteState parse_site_state(const std::string& s) {
  if (s == "by_class") return SiteState::by_class;
  if (s == "open") return SiteState::open;
  if (s == "closed") return SiteState::closed;
  throw Error("unknown site state '" + s + "'");
}

struct AugEdge {
  std::size_t u = 0, v = 0;
  EdgeTag tag = EdgeTag::base;
  std::size_t face = npos;  // host face for diagonals and facial edges
  Shift shift;              // lift(v) - lift(u)
};

struct FacialSite {
  std::size_t vertex = 0;
  std::size_t face = 0;
  FaceClass cls = FaceClass::f1;
};

struct Incidence {
  std::size_t to;
  std::size_t edge;
  Shift shift;  // lift(to) - lift(from)
};

/// Base map with facial sites inserted into a set of its faces. Vertex
/// V + i is site i; the original darts keep their ids.
struct SitedMap {
  CombinatorialMap map;
  std::size_t base_vertices = 0;
  std::vector<std::size_t> site_face;  // site index -> base face
  std::vector<std::size_t> face_site;  // base face -> site vertex or npos
};

class AugmentedGraph {
 public:
  AugmentedGraph() = default;

  AugmentedGraph(std::shared_ptr<const CombinatorialMap> base, std::string kind,
                 std::vector<AugEdge> edges, std::vector<FacialSite> sites,
                 SiteState state = SiteState::by_class,
                 std::shared_ptr<const SitedMap> planar = nullptr)
      : kind_(std::move(kind)),
        base_(std::move(base)),
        edges_(std::move(edges)),
        sites_(std::move(sites)),
        state_(state),
        planar_(std::move(planar)) {
    index();
  }

  const std::string& kind() const { return kind_; }
  const CombinatorialMap& base() const { return *base_; }
  std::shared_ptr<const CombinatorialMap> base_ptr() const { return base_; }
  Surface surface() const { return base_->surface(); }

  std::size_t base_vertex_count() const { return base_->vertex_count(); }
  std::size_t vertex_count() const { return base_->vertex_count() + sites_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<AugEdge>& edges() const { return edges_; }
  const AugEdge& edge(std::size_t e) const { return edges_[e]; }

  std::span<const Incidence> neighbours(std::size_t v) const {
    return {inc_.data() + offset_[v], offset_[v + 1] - offset_[v]};
  }
  std::size_t degree(std::size_t v) const { return offset_[v + 1] - offset_[v]; }

  const std::vector<FacialSite>& sites() const { return sites_; }
  bool is_site(std::size_t v) const { return v >= base_->vertex_count(); }
  const FacialSite& site(std::size_t v) const { return sites_[v - base_->vertex_count()]; }

  SiteState site_state() const { return state_; }
  AugmentedGraph with_site_state(SiteState s) const {
    AugmentedGraph g = *this;
    g.state_ = s;
    return g;
  }

  /// Forced state of v: -1 if free, else 0 or 1.
  int forced(std::size_t v) const {
    if (!is_site(v)) return -1;
    switch (state_) {
      case SiteState::open: return 1;
      case SiteState::closed: return 0;
      case SiteState::by_class: return site(v).cls == FaceClass::f1 ? 1 : 0;
    }
    return -1;
  }

  bool is_boundary(std::size_t v) const { return !is_site(v) && base_->is_boundary(v); }

  /// Planar embedding, present when the graph was built by placing facial sites.
  const SitedMap* planar() const { return planar_.get(); }

 private:
  void index() {
    const std::size_t n = vertex_count();
    offset_.assign(n + 1, 0);
    for (const auto& e : edges_) {
      if (e.u >= n || e.v >= n) throw Error("augmented edge endpoint out of range");
      ++offset_[e.u + 1];
      ++offset_[e.v + 1];
    }
    for (std::size_t v = 0; v < n; ++v) offset_[v + 1] += offset_[v];
    inc_.resize(offset_[n]);
    auto fill = offset_;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const auto& e = edges_[i];
      inc_[fill[e.u]++] = {e.v, i, e.shift};
      inc_[fill[e.v]++] = {e.u, i, -e.shift};
    }
  }

  std::string kind_;
  std::shared_ptr<const CombinatorialMap> base_;
  std::vector<AugEdge> edges_;
  std::vector<FacialSite> sites_;
  SiteState state_ = SiteState::by_class;
  std::shared_ptr<const SitedMap> planar_;
  std::vector<std::size_t> offset_;
  std::vector<Incidence> inc_;
};

// ---------------------------------------------------------------- partitions

enum class PartitionStrategy { all_f1, all_f2, checkerboard, periodic, explicit_list };

inline PartitionStrategy parse_partition_strategy(const std::string& s) {
  if (s == "all_f1" || s == "ALL_F1") return PartitionStrategy::all_f1;
  if (s == "all_f2" || s == "ALL_F2") return PartitionStrategy::all_f2;
  if (s == "checkerboard" || s == "CHECKERBOARD") return PartitionStrategy::checkerboard;
  if (s == "periodic" || s == "PERIODIC") return PartitionStrategy::periodic;
  if (s == "explicit" || s == "EXPLICIT") return PartitionStrategy::explicit_list;
  throw Error("unknown partition strategy '" + s + "'");
}

/// Class of every face of a map. The outer face of a free patch has class
/// none; triangles are in F1 unless `triangles` says otherwise.
struct FacePartition {
  std::vector<FaceClass> cls;
  FaceClass triangles = FaceClass::f1;

  std::size_t count(FaceClass c) const { return std::count(cls.begin(), cls.end(), c); }
};

struct PartitionOptions {
  std::string mask = "100/010/001";    // periodic: rows of a square-lattice cell pattern
  std::vector<FaceClass> explicit_cls;  // explicit: one entry per face
  FaceClass triangles = FaceClass::f1;
};

namespace detail {

inline void require_mosaic(const CombinatorialMap& m) {
  auto family = m.meta("family");
  auto ends = m.meta("ends", "1");
  if (family == "tree" || family == "ladder" || ends != "1")
    throw NotAMosaic("family '" + family + "' is not a one-ended mosaic");
}

inline std::vector<std::size_t> face_cycle(const CombinatorialMap& m, std::size_t f) {
  auto vs = m.face_vertices(f);
  auto sorted = vs;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw NonCycleFace("face " + std::to_string(f) + " repeats a vertex");
  return vs;
}

inline bool interior(const CombinatorialMap& m, std::size_t f) { return !m.is_outer(f); }

inline std::vector<FaceClass> periodic_classes(const CombinatorialMap& m, const std::string& mask) {
  std::vector<std::string> rows;
  std::stringstream ss(mask);
  for (std::string row; std::getline(ss, row, '/');) rows.push_back(row);
  if (rows.empty() || rows[0].empty()) throw Error("empty periodic mask");
  for (const auto& r : rows) {
    if (r.size() != rows[0].size()) throw Error("periodic mask rows differ in length");
    if (r.find_first_not_of("01") != std::string::npos)
      throw Error("periodic mask cells must be 0 (F2) or 1 (F1)");
  }
  if (!m.has_coords() || m.meta("family") != "square")
    throw Error("periodic partition needs a square lattice with coordinates");
  const int lx = std::stoi(m.meta("lx")), ly = std::stoi(m.meta("ly"));
  const int px = static_cast<int>(rows[0].size()), py = static_cast<int>(rows.size());
  const bool torus = m.surface() == Surface::torus;
  if (torus && (lx % px != 0 || ly % py != 0))
    throw Error("torus sides must be multiples of the periodic mask size");
  std::vector<FaceClass> out(m.face_count(), FaceClass::none);
  for (std::size_t f = 0; f < m.face_count(); ++f) {
    if (m.is_outer(f)) continue;
    // The eastward dart of a clockwise square walk runs along the top of the cell.
    for (auto d : m.face_darts(f)) {
      auto a = m.coord(m.origin(d)), b = m.coord(m.target(d));
      if ((b[0] - a[0] + lx) % lx == 1 && b[1] == a[1]) {
        int cx = a[0], cy = (a[1] - 1 + ly) % ly;
        char c = rows[cy % py][cx % px];
        out[f] = (c == '1') ? FaceClass::f1 : FaceClass::f2;
        break;
      }
    }
    if (out[f] == FaceClass::none) throw Error("face " + std::to_string(f) + " has no cell");
  }
  return out;
}

inline std::vector<FaceClass> checkerboard_classes(const CombinatorialMap& m) {
  std::vector<FaceClass> out(m.face_count(), FaceClass::none);
  std::vector<std::size_t> depth(m.face_count(), npos);
  for (std::size_t f0 = 0; f0 < m.face_count(); ++f0) {
    if (m.is_outer(f0) || m.face_size(f0) < 4 || depth[f0] != npos) continue;
    std::deque<std::size_t> queue{f0};
    depth[f0] = 0;
    while (!queue.empty()) {
      auto f = queue.front();
      queue.pop_front();
      for (auto d : m.face_darts(f)) {
        auto g = m.face_of(m.twin(d));
        if (m.is_outer(g) || m.face_size(g) < 4 || depth[g] != npos) continue;
        depth[g] = depth[f] + 1;
        queue.push_back(g);
      }
    }
  }
  for (std::size_t f = 0; f < m.face_count(); ++f)
    if (depth[f] != npos) out[f] = depth[f] % 2 == 0 ? FaceClass::f1 : FaceClass::f2;
  return out;
}

}  // namespace detail

inline FacePartition make_partition(const CombinatorialMap& m, PartitionStrategy strategy,
                                    const PartitionOptions& opt = {}) {
  FacePartition p;
  p.triangles = opt.triangles;
  switch (strategy) {
    case PartitionStrategy::all_f1:
    case PartitionStrategy::all_f2:
      p.cls.assign(m.face_count(),
                   strategy == PartitionStrategy::all_f1 ? FaceClass::f1 : FaceClass::f2);
      break;
    case PartitionStrategy::checkerboard:
      p.cls = detail::checkerboard_classes(m);
      break;
    case PartitionStrategy::periodic:
      p.cls = detail::periodic_classes(m, opt.mask);
      break;
    case PartitionStrategy::explicit_list:
      p.cls = opt.explicit_cls;
      break;
  }
  if (p.cls.size() != m.face_count())
    throw PartitionIncomplete("partition has " + std::to_string(p.cls.size()) +
                              " entries for " + std::to_string(m.face_count()) + " faces");
  for (std::size_t f = 0; f < m.face_count(); ++f) {
    if (m.is_outer(f)) p.cls[f] = FaceClass::none;
    else if (m.face_size(f) == 3) p.cls[f] = p.triangles;
  }
  return p;
}

inline void check_partition(const CombinatorialMap& m, const FacePartition& p) {
  if (p.cls.size() != m.face_count())
    throw PartitionIncomplete("partition size does not match the face count");
  for (std::size_t f = 0; f < m.face_count(); ++f)
    if (!m.is_outer(f) && p.cls[f] == FaceClass::none)
      throw PartitionIncomplete("face " + std::to_string(f) + " has no class");
}

/// Explicit partition file: one `f <face> <1|2>` line per face of size >= 4.
inline FacePartition read_partition(std::istream& is, const CombinatorialMap& m) {
  PartitionOptions opt;
  opt.explicit_cls.assign(m.face_count(), FaceClass::none);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    std::size_t f;
    int c;
    if (tag != "f" || !(ls >> f >> c) || f >= m.face_count() || (c != 1 && c != 2))
      throw ParseError(lineno, "expected 'f <face> <1|2>'");
    opt.explicit_cls[f] = c == 1 ? FaceClass::f1 : FaceClass::f2;
  }
  auto p = make_partition(m, PartitionStrategy::explicit_list, opt);
  check_partition(m, p);
  return p;
}

inline void write_partition(std::ostream& os, const FacePartition& p) {
  for (std::size_t f = 0; f < p.cls.size(); ++f)
    if (p.cls[f] != FaceClass::none) os << "f " << f << ' ' << (p.cls[f] == FaceClass::f1 ? 1 : 2) << '\n';
}

// ------------------------------------------------------------ constructions

namespace detail {

inline std::vector<AugEdge> base_edges(const CombinatorialMap& m) {
  std::vector<AugEdge> out;
  out.reserve(m.edge_count());
  for (std::size_t e = 0; e < m.edge_count(); ++e) {
    auto d = m.edge_dart(e);
    out.push_back({m.origin(d), m.target(d), EdgeTag::base, npos, m.shift(d)});
  }
  return out;
}

using EdgeKey = std::tuple<std::size_t, std::size_t, int, int>;

inline EdgeKey edge_key(std::size_t u, std::size_t v, Shift s) {
  if (u > v || (u == v && (s.dx < 0 || (s.dx == 0 && s.dy < 0)))) {
    std::swap(u, v);
    s = -s;
  }
  return {u, v, s.dx, s.dy};
}

/// Diagonals of face f: every pair of non-consecutive boundary vertices.
inline void add_diagonals(const CombinatorialMap& m, std::size_t f, const std::vector<Shift>& pot,
                          const std::set<EdgeKey>& base_keys, std::vector<AugEdge>& out) {
  auto cyc = face_cycle(m, f);
  auto ds = m.face_darts(f);
  const std::size_t k = ds.size();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 2; j < k; ++j) {
      if (i == 0 && j == k - 1) continue;
      Shift s = pot[ds[j]] - pot[ds[i]];
      if (base_keys.count(edge_key(cyc[i], cyc[j], s))) continue;
      out.push_back({cyc[i], cyc[j], EdgeTag::diagonal, f, s});
    }
}

inline std::set<EdgeKey> keys_of(const std::vector<AugEdge>& edges) {
  std::set<EdgeKey> out;
  for (const auto& e : edges) out.insert(edge_key(e.u, e.v, e.shift));
  return out;
}

inline AugmentedGraph with_diagonals(std::shared_ptr<const CombinatorialMap> m, std::string kind,
                                     const std::vector<char>& faces_with_diagonals) {
  auto edges = base_edges(*m);
  auto keys = keys_of(edges);
  auto pot = face_potentials(*m);
  for (std::size_t f = 0; f < m->face_count(); ++f)
    if (faces_with_diagonals[f] && interior(*m, f) && m->face_size(f) >= 4)
      add_diagonals(*m, f, pot, keys, edges);
  return AugmentedGraph(std::move(m), std::move(kind), std::move(edges), {});
}

}  // namespace detail

/// Places a facial site inside every face in `faces` (interior faces only).
inline SitedMap insert_facial_sites(const CombinatorialMap& m, const std::vector<std::size_t>& faces) {
  const std::size_t nv = m.vertex_count(), nd = m.dart_count();
  SitedMap out;
  out.base_vertices = nv;
  out.face_site.assign(m.face_count(), npos);
  std::vector<std::size_t> origins = m.origins(), rot = m.rotations(), twin = m.twins();
  std::vector<Shift> shifts = m.has_shifts() ? m.shifts() : std::vector<Shift>{};
  auto pot = face_potentials(m);
  std::size_t total = nd;
  for (auto f : faces) total += 2 * m.face_size(f);
  origins.resize(total);
  rot.resize(total);
  twin.resize(total);
  if (!shifts.empty()) shifts.resize(total);

  std::size_t next = nd;
  for (auto f : faces) {
    if (f >= m.face_count()) throw Error("face id out of range");
    if (m.is_outer(f)) throw Error("facial sites are never placed in the outer face");
    if (out.face_site[f] != npos) throw Error("face listed twice");
    detail::face_cycle(m, f);
    const std::size_t s = nv + out.site_face.size();
    out.face_site[f] = s;
    out.site_face.push_back(f);
    auto ds = m.face_darts(f);
    const std::size_t k = ds.size();
    auto a = [&](std::size_t i) { return next + 2 * i; };      // site -> u_i
    auto b = [&](std::size_t i) { return next + 2 * i + 1; };  // u_i -> site
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t d = ds[i], prev = ds[(i + k - 1) % k];
      origins[a(i)] = s;
      origins[b(i)] = m.origin(d);
      twin[a(i)] = b(i);
      twin[b(i)] = a(i);
      // the face walk is clockwise around the face, so the spokes at the site
      // run counter-clockwise in reverse walk order
      rot[a(i)] = a((i + k - 1) % k);
      // the corner of f at u_i lies between twin(prev) and d
      rot[m.twin(prev)] = b(i);
      rot[b(i)] = d;
      if (!shifts.empty()) {
        shifts[a(i)] = pot[d];
        shifts[b(i)] = -pot[d];
      }
    }
    next += 2 * k;
  }
  MapExtras ex;
  ex.shifts = std::move(shifts);
  if (m.surface() == Surface::plane_patch) {
    ex.outer_dart = m.outer_dart();
    ex.boundary_vertices = m.boundary_vertices();
  }
  ex.metadata = m.metadata();
  ex.metadata["sites"] = std::to_string(out.site_face.size());
  out.map = build_map(nv + out.site_face.size(), std::move(origins), std::move(rot),
                      std::move(twin), m.surface(), std::move(ex));
  return out;
}

/// View of a plain map as an augmented graph with base edges only.
inline AugmentedGraph as_graph(std::shared_ptr<const CombinatorialMap> m, std::string kind = "g") {
  auto edges = detail::base_edges(*m);
  return AugmentedGraph(std::move(m), std::move(kind), std::move(edges), {});
}
inline AugmentedGraph as_graph(const CombinatorialMap& m, std::string kind = "g") {
  return as_graph(std::make_shared<const CombinatorialMap>(m), std::move(kind));
}

/// G*: all diagonals of all interior faces.
inline AugmentedGraph matching_graph(std::shared_ptr<const CombinatorialMap> m) {
  std::vector<char> all(m->face_count(), 1);
  return detail::with_diagonals(std::move(m), "star", all);
}
inline AugmentedGraph matching_graph(const CombinatorialMap& m) {
  return matching_graph(std::make_shared<const CombinatorialMap>(m));
}

/// (G1, G2): G_i carries the diagonals of the faces in F_i.
inline std::pair<AugmentedGraph, AugmentedGraph> matching_pair(
    std::shared_ptr<const CombinatorialMap> m, const FacePartition& p) {
  detail::require_mosaic(*m);
  check_partition(*m, p);
  std::vector<char> f1(m->face_count()), f2(m->face_count());
  for (std::size_t f = 0; f < m->face_count(); ++f) {
    f1[f] = p.cls[f] == FaceClass::f1;
    f2[f] = p.cls[f] == FaceClass::f2;
  }
  return {detail::with_diagonals(m, "g1", f1), detail::with_diagonals(m, "g2", f2)};
}
inline std::pair<AugmentedGraph, AugmentedGraph> matching_pair(const CombinatorialMap& m,
                                                               const FacePartition& p) {
  return matching_pair(std::make_shared<const CombinatorialMap>(m), p);
}

namespace detail {

inline AugmentedGraph sited_graph(std::shared_ptr<const CombinatorialMap> m, std::string kind,
                                  const std::vector<std::size_t>& faces,
                                  const std::vector<FaceClass>& cls, SiteState state) {
  auto sited = std::make_shared<SitedMap>(insert_facial_sites(*m, faces));
  const auto& sm = sited->map;
  std::vector<AugEdge> edges;
  edges.reserve(sm.edge_count());
  for (std::size_t e = 0; e < sm.edge_count(); ++e) {
    auto d = sm.edge_dart(e);
    const bool facial = d >= m->dart_count();
    std::size_t host = npos;
    if (facial) {
      auto s = sm.origin(d) >= m->vertex_count() ? sm.origin(d) : sm.target(d);
      host = sited->site_face[s - m->vertex_count()];
    }
    edges.push_back({sm.origin(d), sm.target(d), facial ? EdgeTag::facial : EdgeTag::base, host,
                     sm.shift(d)});
  }
  std::vector<FacialSite> sites;
  for (std::size_t i = 0; i < sited->site_face.size(); ++i)
    sites.push_back({m->vertex_count() + i, sited->site_face[i], cls[sited->site_face[i]]});
  return AugmentedGraph(std::move(m), std::move(kind), std::move(edges), std::move(sites), state,
                        std::move(sited));
}

}  // namespace detail

/// M̂: a facial site in every interior face, triangles included.
inline AugmentedGraph facial_triangulation(std::shared_ptr<const CombinatorialMap> m) {
  detail::require_mosaic(*m);
  std::vector<std::size_t> faces;
  for (std::size_t f = 0; f < m->face_count(); ++f)
    if (!m->is_outer(f)) faces.push_back(f);
  std::vector<FaceClass> cls(m->face_count(), FaceClass::f1);
  return detail::sited_graph(std::move(m), "mhat", faces, cls, SiteState::by_class);
}
inline AugmentedGraph facial_triangulation(const CombinatorialMap& m) {
  return facial_triangulation(std::make_shared<const CombinatorialMap>(m));
}

/// (Ĝ1, Ĝ2): Ĝ_i carries the facial sites of the faces in F_i.
inline std::pair<AugmentedGraph, AugmentedGraph> hatted_graphs(
    std::shared_ptr<const CombinatorialMap> m, const FacePartition& p) {
  detail::require_mosaic(*m);
  check_partition(*m, p);
  std::vector<std::size_t> f1, f2;
  for (std::size_t f = 0; f < m->face_count(); ++f) {
    if (p.cls[f] == FaceClass::f1) f1.push_back(f);
    if (p.cls[f] == FaceClass::f2) f2.push_back(f);
  }
  return {detail::sited_graph(m, "ghat1", f1, p.cls, SiteState::by_class),
          detail::sited_graph(m, "ghat2", f2, p.cls, SiteState::by_class)};
}
inline std::pair<AugmentedGraph, AugmentedGraph> hatted_graphs(const CombinatorialMap& m,
                                                               const FacePartition& p) {
  return hatted_graphs(std::make_shared<const CombinatorialMap>(m), p);
}

/// Vertex-pair adjacency (ignoring lifts), for comparisons of graphs on the same vertex set.
inline std::set<std::pair<std::size_t, std::size_t>> adjacency_pairs(const AugmentedGraph& g) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (const auto& e : g.edges()) out.insert(std::minmax(e.u, e.v));
  return out;
}

/// Edge identities including lifts (distinguishes parallel edges on small tori).
inline std::set<std::tuple<std::size_t, std::size_t, int, int>> edge_keys(const AugmentedGraph& g) {
  return detail::keys_of(g.edges());
}

// ------------------------------------------------------------------------ I/O
//
// Augmented format: the base map in exchange format, then
//   augmented <kind> <site_state>
//   diag <u> <v> <face>          one per diagonal
//   site <id> <face> <1|2>       one per facial site, ids consecutive from V

inline void write_augmented(std::ostream& os, const AugmentedGraph& g) {
  write_map(os, g.base());
  os << "augmented " << g.kind() << ' ' << to_string(g.site_state()) << '\n';
  for (const auto& e : g.edges())
    if (e.tag == EdgeTag::diagonal) os << "diag " << e.u << ' ' << e.v << ' ' << e.face << '\n';
  for (const auto& s : g.sites())
    os << "site " << s.vertex << ' ' << s.face << ' ' << (s.cls == FaceClass::f1 ? 1 : 2) << '\n';
}

inline AugmentedGraph read_augmented(std::istream& is) {
  detail::MapParser parser;
  std::string line, kind = "g";
  SiteState state = SiteState::by_class;
  std::vector<std::array<std::size_t, 3>> diags;
  std::vector<std::array<std::size_t, 3>> sites;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (parser.consume(line, lineno)) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "augmented") {
      std::string st;
      if (!(ls >> kind >> st)) throw ParseError(lineno, "bad augmented line");
      state = parse_site_state(st);
    } else if (tag == "diag") {
      std::size_t u, v, f;
      if (!(ls >> u >> v >> f)) throw ParseError(lineno, "bad diag line");
      diags.push_back({u, v, f});
    } else if (tag == "site") {
      std::size_t id, f, c;
      if (!(ls >> id >> f >> c) || (c != 1 && c != 2)) throw ParseError(lineno, "bad site line");
      sites.push_back({id, f, c});
    } else {
      throw ParseError(lineno, "unexpected line: " + line);
    }
  }
  auto m = std::make_shared<const CombinatorialMap>(parser.finish(lineno));
  if (!sites.empty()) {
    if (!diags.empty()) throw Error("a graph carries either diagonals or facial sites");
    std::vector<std::size_t> faces;
    std::vector<FaceClass> cls(m->face_count(), FaceClass::none);
    for (std::size_t i = 0; i < sites.size(); ++i) {
      if (sites[i][0] != m->vertex_count() + i) throw Error("site ids must be consecutive from V");
      if (sites[i][1] >= m->face_count()) throw Error("site face out of range");
      faces.push_back(sites[i][1]);
      cls[sites[i][1]] = sites[i][2] == 1 ? FaceClass::f1 : FaceClass::f2;
    }
    return detail::sited_graph(m, kind, faces, cls, state);
  }
  auto edges = detail::base_edges(*m);
  auto pot = face_potentials(*m);
  for (auto [u, v, f] : diags) {
    if (f >= m->face_count()) throw Error("diagonal face out of range");
    std::size_t iu = npos, iv = npos;
    for (auto d : m->face_darts(f)) {
      if (m->origin(d) == u) iu = d;
      if (m->origin(d) == v) iv = d;
    }
    if (iu == npos || iv == npos) throw Error("diagonal endpoints not on its face");
    edges.push_back({u, v, EdgeTag::diagonal, f, pot[iv] - pot[iu]});
  }
  return AugmentedGraph(m, kind, std::move(edges), {}, state);
}

inline std::string to_text(const AugmentedGraph& g) {
  std::ostringstream os;
  write_augmented(os, g);
  return os.str();
}

inline AugmentedGraph augmented_from_text(const std::string& s) {
  std::istringstream is(s);
  return read_augmented(is);
}

}  // namespace percoplane
