#pragma once

// Generators for the graph families used by the experiments: Euclidean
// lattices on tori or free patches, hyperbolic {p,q} patches, regular trees
// and ladders. Also ball extraction and the edge-boundary (Cheeger) ratio.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "percoplane/planar_map.hpp"

namespace percoplane {

enum class Family { square, triangular, hexagonal, hyperbolic, tree, ladder };
enum class Boundary { torus, free_patch };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::square: return "square";
    case Family::triangular: return "triangular";
    case Family::hexagonal: return "hexagonal";
    case Family::hyperbolic: return "hyperbolic";
    case Family::tree: return "tree";
    case Family::ladder: return "ladder";
  }
  return "?";
}

inline Family parse_family(const std::string& s) {
  if (s == "square") return Family::square;
  if (s == "triangular") return Family::triangular;
  if (s == "hexagonal") return Family::hexagonal;
  if (s == "hyperbolic") return Family::hyperbolic;
  if (s == "tree") return Family::tree;
  if (s == "ladder") return Family::ladder;
  throw Error("unknown family '" + s + "'");
}

inline Boundary parse_boundary(const std::string& s) {
  if (s == "torus") return Boundary::torus;
  if (s == "free") return Boundary::free_patch;
  throw Error("unknown boundary '" + s + "' (expected torus|free)");
}

/// Declarative description of one member of a graph family.
///
/// `size` is the torus side L (Euclidean), the radius r (hyperbolic), the depth
/// (tree) or the number of rungs (ladder). `size2` is the second torus side and
/// defaults to `size`. `p`,`q` are the Schläfli symbol for hyperbolic patches;
/// `degree` is the tree degree.
struct TilingSpec {
  Family family = Family::square;
  std::size_t size = 0;
  std::size_t size2 = 0;
  int p = 0;
  int q = 0;
  int degree = 3;
  Boundary boundary = Boundary::torus;

  std::size_t width() const { return size; }
  std::size_t height() const { return size2 ? size2 : size; }

  std::string describe() const {
    std::string s = to_string(family);
    if (family == Family::hyperbolic) s += "{" + std::to_string(p) + "," + std::to_string(q) + "}";
    if (family == Family::tree) s += "(" + std::to_string(degree) + ")";
    s += " size=" + std::to_string(size);
    if (size2 && size2 != size) s += "x" + std::to_string(size2);
    s += boundary == Boundary::torus ? " torus" : " free";
    return s;
  }
};

struct BallSpec {
  std::size_t center = 0;
  std::size_t radius = 1;
};

namespace detail {

using Dir = std::array<int, 2>;

inline std::vector<Dir> lattice_dirs(Family f, long x, long y) {
  switch (f) {
    case Family::square:
    case Family::ladder:
      return {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    case Family::triangular:
      // counter-clockwise once the lattice is sheared to 60 degrees
      return {{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}};
    case Family::hexagonal:
      // brick wall: horizontal edges everywhere, vertical rungs on alternate parity
      if ((x + y) % 2 == 0) return {{1, 0}, {0, 1}, {-1, 0}};
      return {{1, 0}, {-1, 0}, {0, -1}};
    default:
      throw Error("not a lattice family");
  }
}

inline long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

inline CombinatorialMap build_lattice(Family family, std::size_t lx, std::size_t ly, bool torus,
                                      std::map<std::string, std::string> metadata) {
  const long w = static_cast<long>(lx), h = static_cast<long>(ly);
  auto in_box = [&](long x, long y) { return x >= 0 && x < w && y >= 0 && y < h; };

  // vertex set; free patches drop pendant vertices so the patch stays 2-connected
  std::vector<char> keep(lx * ly, 1);
  auto neighbours_kept = [&](long x, long y) {
    std::vector<Dir> out;
    for (auto dir : lattice_dirs(family, x, y)) {
      long nx = x + dir[0], ny = y + dir[1];
      if (torus) {
        out.push_back(dir);
      } else if (in_box(nx, ny) && keep[ny * w + nx]) {
        out.push_back(dir);
      }
    }
    return out;
  };
  if (!torus) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (long y = 0; y < h; ++y)
        for (long x = 0; x < w; ++x)
          if (keep[y * w + x] && neighbours_kept(x, y).size() <= 1) {
            keep[y * w + x] = 0;
            changed = true;
          }
    }
  }
  std::vector<std::size_t> id(lx * ly, npos);
  std::vector<std::array<int, 2>> coords;
  for (long y = 0; y < h; ++y)
    for (long x = 0; x < w; ++x)
      if (keep[y * w + x]) {
        id[y * w + x] = coords.size();
        coords.push_back({static_cast<int>(x), static_cast<int>(y)});
      }
  const std::size_t vcount = coords.size();

  std::vector<std::size_t> origins, rotation;
  std::vector<Dir> dart_dir;
  std::vector<std::size_t> first(vcount);
  for (std::size_t v = 0; v < vcount; ++v) {
    auto dirs = neighbours_kept(coords[v][0], coords[v][1]);
    first[v] = origins.size();
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      origins.push_back(v);
      dart_dir.push_back(dirs[i]);
      rotation.push_back(first[v] + (i + 1) % dirs.size());
    }
  }
  const std::size_t n = origins.size();
  std::vector<std::size_t> twin(n, npos);
  std::vector<Shift> shifts(torus ? n : 0);
  for (std::size_t d = 0; d < n; ++d) {
    auto v = origins[d];
    long x = coords[v][0] + dart_dir[d][0], y = coords[v][1] + dart_dir[d][1];
    long cx = floor_div(x, w), cy = floor_div(y, h);
    auto u = id[(y - cy * h) * w + (x - cx * w)];
    if (torus) shifts[d] = {static_cast<int>(cx), static_cast<int>(cy)};
    for (std::size_t e = first[u]; e < n && origins[e] == u; ++e)
      if (dart_dir[e][0] == -dart_dir[d][0] && dart_dir[e][1] == -dart_dir[d][1]) twin[d] = e;
    if (twin[d] == npos) throw Error("lattice construction failed to pair a dart");
  }

  MapExtras ex;
  ex.coords = std::move(coords);
  ex.shifts = std::move(shifts);
  ex.metadata = std::move(metadata);
  if (!torus) {
    // The face to the right of the eastward dart out of the lowest-left vertex is the exterior.
    for (std::size_t d = first[0]; d < n && origins[d] == 0; ++d)
      if (dart_dir[d] == Dir{1, 0}) ex.outer_dart = d;
  }
  return build_map(vcount, std::move(origins), std::move(rotation), std::move(twin),
                   torus ? Surface::torus : Surface::plane_patch, std::move(ex));
}

/// Growth state for {p,q} patches: a disk whose outer boundary is a simple
/// cycle, stored as counter-clockwise neighbour lists plus boundary links.
class HyperbolicGrower {
 public:
  HyperbolicGrower(int p, int q) : p_(p), q_(q) {
    for (int i = 0; i < p; ++i) add_vertex();
    for (int i = 0; i < p; ++i) {
      std::size_t a = (i + p - 1) % p, b = (i + 1) % p;
      nbr_[i] = {static_cast<std::size_t>(b), a};
      next_[i] = b;
      prev_[i] = a;
      faces_[i] = 1;
    }
  }

  void grow(std::size_t radius) {
    for (std::size_t layer = 0; layer < radius; ++layer) {
      auto dist = distances();
      std::vector<std::size_t> targets;
      std::size_t start = npos;
      for (std::size_t v = 0; v < nbr_.size(); ++v)
        if (on_boundary_[v]) {
          start = v;
          break;
        }
      std::size_t v = start;
      do {
        if (dist[v] <= layer) targets.push_back(v);
        v = next_[v];
      } while (v != start);
      for (auto t : targets)
        while (on_boundary_[t] && faces_[t] < static_cast<std::size_t>(q_)) add_face_at(t);
    }
  }

  CombinatorialMap to_map(std::map<std::string, std::string> metadata) const {
    MapExtras ex;
    ex.boundary_vertices = std::vector<std::size_t>{};
    for (std::size_t v = 0; v < nbr_.size(); ++v)
      if (on_boundary_[v]) ex.boundary_vertices->push_back(v);
    const std::size_t b0 = ex.boundary_vertices->front();
    ex.outer_dart_between = std::pair{b0, next_[b0]};
    ex.metadata = std::move(metadata);
    return from_neighbour_lists(nbr_, Surface::plane_patch, std::move(ex));
  }

 private:
  std::size_t add_vertex() {
    nbr_.emplace_back();
    next_.push_back(npos);
    prev_.push_back(npos);
    faces_.push_back(0);
    on_boundary_.push_back(1);
    return nbr_.size() - 1;
  }

  static void insert_before(std::vector<std::size_t>& list, std::size_t anchor, std::size_t x) {
    auto it = std::find(list.begin(), list.end(), anchor);
    if (it == list.end()) throw Error("hyperbolic growth: broken boundary");
    list.insert(it, x);
  }
  static void insert_after(std::vector<std::size_t>& list, std::size_t anchor, std::size_t x) {
    auto it = std::find(list.begin(), list.end(), anchor);
    if (it == list.end()) throw Error("hyperbolic growth: broken boundary");
    list.insert(it + 1, x);
  }

  bool saturates(std::size_t v) const { return faces_[v] + 1 == static_cast<std::size_t>(q_); }

  // Adds the tile lying outside boundary edge (v, next(v)). The tile also
  // absorbs every adjacent boundary vertex it completes.
  void add_face_at(std::size_t v) {
    std::deque<std::size_t> chain{v, next_[v]};
    std::size_t limit = 0;
    for (std::size_t b = next_[v]; saturates(b) && b != v; b = next_[b]) {
      chain.push_back(next_[b]);
      if (++limit > nbr_.size()) throw Error("hyperbolic growth: boundary closed up");
    }
    if (saturates(v))
      for (std::size_t a = v;; a = prev_[a]) {
        chain.push_front(prev_[a]);
        if (!saturates(prev_[a])) break;
        if (++limit > nbr_.size()) throw Error("hyperbolic growth: boundary closed up");
      }
    const long fresh = static_cast<long>(p_) - static_cast<long>(chain.size());
    if (fresh < 0) throw Error("hyperbolic growth: tile would need more than p vertices");
    const std::size_t first = chain.front(), last = chain.back();
    const std::size_t second = chain[1], penultimate = chain[chain.size() - 2];

    std::vector<std::size_t> path;  // last -> x1 -> ... -> xk -> first
    for (long i = 0; i < fresh; ++i) path.push_back(add_vertex());
    if (fresh == 0 && std::find(nbr_[last].begin(), nbr_[last].end(), first) != nbr_[last].end())
      throw Error("hyperbolic growth: closing edge already present");

    const std::size_t to_last = path.empty() ? first : path.front();
    const std::size_t to_first = path.empty() ? last : path.back();
    insert_after(nbr_[last], penultimate, to_last);
    insert_before(nbr_[first], second, to_first);
    for (std::size_t i = 0; i < path.size(); ++i) {
      std::size_t a = i == 0 ? last : path[i - 1];
      std::size_t b = i + 1 == path.size() ? first : path[i + 1];
      nbr_[path[i]] = {a, b};
      faces_[path[i]] = 1;
    }
    for (auto c : chain) ++faces_[c];
    for (std::size_t i = 1; i + 1 < chain.size(); ++i) on_boundary_[chain[i]] = 0;

    // boundary now runs first -> xk -> ... -> x1 -> last
    std::size_t cur = first;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      next_[cur] = *it;
      prev_[*it] = cur;
      cur = *it;
    }
    next_[cur] = last;
    prev_[last] = cur;
  }

  std::vector<std::size_t> distances() const {
    std::vector<std::size_t> dist(nbr_.size(), npos);
    std::deque<std::size_t> queue{0};
    dist[0] = 0;
    while (!queue.empty()) {
      auto v = queue.front();
      queue.pop_front();
      for (auto w : nbr_[v])
        if (dist[w] == npos) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
    }
    return dist;
  }

  int p_, q_;
  std::vector<std::vector<std::size_t>> nbr_;
  std::vector<std::size_t> next_, prev_, faces_;
  std::vector<char> on_boundary_;
};

inline std::size_t nearest_boundary_distance(const CombinatorialMap& m, std::size_t root) {
  auto dist = bfs_distances(m, root);
  std::size_t best = npos;
  for (auto b : m.boundary_vertices()) best = std::min(best, dist[b]);
  return best;
}

}  // namespace detail

/// Builds the map described by `spec`. Identical specs give identical maps.
inline CombinatorialMap generate(const TilingSpec& spec) {
  std::map<std::string, std::string> md;
  md["family"] = to_string(spec.family);
  switch (spec.family) {
    case Family::square:
    case Family::triangular:
    case Family::hexagonal: {
      const bool torus = spec.boundary == Boundary::torus;
      if (spec.width() < 3 || spec.height() < 3)
        throw SizeTooSmall("lattice side must be at least 3");
      if (spec.family == Family::hexagonal && torus &&
          (spec.width() % 2 != 0 || spec.height() % 2 != 0 || spec.width() < 4 ||
           spec.height() < 4))
        throw SizeTooSmall("hexagonal torus needs even sides of at least 4");
      md["ends"] = "1";
      md["amenable"] = "true";
      md["lx"] = std::to_string(spec.width());
      md["ly"] = std::to_string(spec.height());
      auto m = detail::build_lattice(spec.family, spec.width(), spec.height(), torus, md);
      if (!torus) {
        // root: the vertex nearest the middle of the box
        std::size_t root = 0;
        long best = -1;
        for (std::size_t v = 0; v < m.vertex_count(); ++v) {
          long dx = 2L * m.coord(v)[0] - static_cast<long>(spec.width() - 1);
          long dy = 2L * m.coord(v)[1] - static_cast<long>(spec.height() - 1);
          long score = dx * dx + dy * dy;
          if (best < 0 || score < best) {
            best = score;
            root = v;
          }
        }
        md["root"] = std::to_string(root);
        md["radius"] = std::to_string(detail::nearest_boundary_distance(m, root));
        m = m.with_metadata(md);
      }
      return m;
    }
    case Family::hyperbolic: {
      if (spec.p < 3 || spec.q < 3) throw Error("{p,q} needs p,q >= 3");
      const long lhs = 2L * (spec.p + spec.q), rhs = 1L * spec.p * spec.q;  // 1/p+1/q vs 1/2
      if (lhs > rhs) throw SphericalPair("{" + std::to_string(spec.p) + "," +
                                         std::to_string(spec.q) + "} tiles the sphere");
      if (lhs == rhs) {
        // Euclidean pairs map onto the named lattices
        TilingSpec e = spec;
        e.family = spec.p == 4 ? Family::square : spec.p == 3 ? Family::triangular
                                                              : Family::hexagonal;
        return generate(e);
      }
      if (spec.size < 1) throw SizeTooSmall("ball radius must be at least 1");
      if (spec.boundary != Boundary::free_patch)
        throw Error("hyperbolic patches are free patches");
      detail::HyperbolicGrower grower(spec.p, spec.q);
      grower.grow(spec.size);
      md["ends"] = "1";
      md["amenable"] = "false";
      md["p"] = std::to_string(spec.p);
      md["q"] = std::to_string(spec.q);
      md["root"] = "0";
      md["radius"] = std::to_string(spec.size);
      return grower.to_map(md);
    }
    case Family::tree: {
      if (spec.boundary != Boundary::free_patch) throw Error("trees are free patches");
      if (spec.degree < 2) throw Error("tree degree must be at least 2");
      if (spec.size < 1) throw SizeTooSmall("tree depth must be at least 1");
      // BFS order; each vertex lists its parent dart first, then its children
      std::vector<std::size_t> parent{npos}, depth{0};
      for (std::size_t v = 0; v < parent.size(); ++v) {
        if (depth[v] == spec.size) continue;
        int children = v == 0 ? spec.degree : spec.degree - 1;
        for (int c = 0; c < children; ++c) {
          parent.push_back(v);
          depth.push_back(depth[v] + 1);
        }
      }
      const std::size_t vc = parent.size();
      std::vector<std::vector<std::size_t>> nbr(vc);
      for (std::size_t v = 1; v < vc; ++v) nbr[v].push_back(parent[v]);
      for (std::size_t v = 1; v < vc; ++v) nbr[parent[v]].push_back(v);
      MapExtras ex;
      ex.outer_dart = 0;
      ex.boundary_vertices = std::vector<std::size_t>{};
      for (std::size_t v = 0; v < vc; ++v)
        if (depth[v] == spec.size) ex.boundary_vertices->push_back(v);
      md["ends"] = "inf";
      md["amenable"] = "false";
      md["degree"] = std::to_string(spec.degree);
      md["root"] = "0";
      md["radius"] = std::to_string(spec.size);
      ex.metadata = md;
      return from_neighbour_lists(nbr, Surface::plane_patch, std::move(ex));
    }
    case Family::ladder: {
      if (spec.boundary != Boundary::free_patch) throw Error("ladders are free patches");
      if (spec.size < 2) throw SizeTooSmall("ladder needs at least 2 rungs");
      md["ends"] = "2";
      md["amenable"] = "true";
      md["length"] = std::to_string(spec.size);
      return detail::build_lattice(Family::ladder, spec.size, 2, false, md);
    }
  }
  throw Error("unhandled family");
}

struct BallResult {
  CombinatorialMap map;                  // induced patch, FREE_PATCH
  std::vector<std::size_t> boundary;     // vertices at distance exactly n (new ids)
  std::vector<std::size_t> original_id;  // new id -> id in the source map
};

/// Vertices within graph distance n of the centre, with distances. Throws
/// BallClipped when the ball would be distorted by the truncation boundary
/// of a free patch or by wrapping around a torus.
inline std::vector<std::pair<std::size_t, std::size_t>> ball_vertices(const CombinatorialMap& m,
                                                                      const BallSpec& spec) {
  if (spec.center >= m.vertex_count()) throw Error("ball centre out of range");
  if (spec.radius < 1) throw SizeTooSmall("ball radius must be at least 1");
  const bool torus = m.surface() == Surface::torus;
  if (torus && !m.has_shifts()) throw Error("torus map without shifts: cannot lift a ball");
  std::vector<std::size_t> dist(m.vertex_count(), npos);
  std::vector<Shift> lift(m.vertex_count());
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::deque<std::size_t> queue{spec.center};
  dist[spec.center] = 0;
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    out.push_back({v, dist[v]});
    if (!torus && m.is_boundary(v))
      throw BallClipped("ball of radius " + std::to_string(spec.radius) +
                        " reaches the patch boundary");
    if (dist[v] == spec.radius) continue;
    for (auto d : m.vertex_darts(v)) {
      auto w = m.target(d);
      Shift lw = lift[v] + m.shift(d);
      if (dist[w] == npos) {
        dist[w] = dist[v] + 1;
        lift[w] = lw;
        queue.push_back(w);
      } else if (torus && lift[w] != lw) {
        throw BallClipped("ball of radius " + std::to_string(spec.radius) + " wraps the torus");
      }
    }
  }
  if (torus)
    for (auto [v, dv] : out)
      for (auto d : m.vertex_darts(v)) {
        auto w = m.target(d);
        if (dist[w] != npos && lift[w] != lift[v] + m.shift(d))
          throw BallClipped("ball of radius " + std::to_string(spec.radius) +
                            " wraps the torus");
      }
  std::sort(out.begin(), out.end());
  return out;
}

/// Induced sub-map on the ball, with the sphere at distance n as boundary.
inline BallResult ball(const CombinatorialMap& m, const BallSpec& spec) {
  auto members = ball_vertices(m, spec);
  std::vector<std::size_t> new_id(m.vertex_count(), npos), dist(m.vertex_count(), npos);
  BallResult res;
  for (auto [v, dv] : members) {
    new_id[v] = res.original_id.size();
    dist[v] = dv;
    res.original_id.push_back(v);
  }
  std::vector<std::size_t> dart_new(m.dart_count(), npos);
  std::vector<std::size_t> kept;
  for (auto v : res.original_id)
    for (auto d : m.vertex_darts(v))
      if (new_id[m.target(d)] != npos) {
        dart_new[d] = kept.size();
        kept.push_back(d);
      }
  std::vector<std::size_t> origins(kept.size()), rotation(kept.size()), twin(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    auto d = kept[i];
    origins[i] = new_id[m.origin(d)];
    twin[i] = dart_new[m.twin(d)];
    auto r = m.rotation(d);
    while (dart_new[r] == npos) r = m.rotation(r);
    rotation[i] = dart_new[r];
  }
  MapExtras ex;
  for (auto v : res.original_id)
    if (dist[v] == spec.radius) res.boundary.push_back(new_id[v]);
  ex.boundary_vertices = res.boundary;
  ex.metadata["family"] = "ball:" + m.meta("family", "unknown");
  ex.metadata["root"] = std::to_string(new_id[spec.center]);
  ex.metadata["radius"] = std::to_string(spec.radius);
  ex.metadata["ends"] = m.meta("ends", "1");
  ex.metadata["amenable"] = m.meta("amenable", "unknown");
  res.map = build_map(res.original_id.size(), std::move(origins), std::move(rotation),
                      std::move(twin), Surface::plane_patch, std::move(ex));
  return res;
}

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
  }
};

/// |ΔK| / |K|, where ΔK is the set of edges with exactly one endpoint in K.
inline Rational cheeger_ratio(const CombinatorialMap& m, const std::vector<std::size_t>& k) {
  if (k.empty()) throw EmptySet("vertex set is empty");
  std::vector<char> in(m.vertex_count(), 0);
  std::size_t size = 0;
  for (auto v : k) {
    if (v >= m.vertex_count()) throw Error("vertex out of range");
    if (!in[v]) ++size;
    in[v] = 1;
  }
  std::int64_t cut = 0;
  for (std::size_t e = 0; e < m.edge_count(); ++e) {
    auto d = m.edge_dart(e);
    if (in[m.origin(d)] != in[m.target(d)]) ++cut;
  }
  auto g = std::gcd(cut, static_cast<std::int64_t>(size));
  if (g == 0) g = 1;
  return {cut / g, static_cast<std::int64_t>(size) / g};
}

}  // namespace percoplane
