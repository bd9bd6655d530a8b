#pragma once

// Half-edge (dart) representation of a graph cellularly embedded in a
// plane patch or a torus.
//
// Conventions shared by every module:
//   * rotation(d) is the next dart counter-clockwise around origin(d);
//   * twin(d) is the opposite half of the same edge;
//   * face_next(d) = rotation(twin(d)). With counter-clockwise rotation this
//     walks every face with the face on the right-hand side of each dart, so
//     interior faces are traversed clockwise.
//   * ids are dense and start at 0. Faces are numbered in order of their
//     smallest dart, and a face's dart list starts at that smallest dart.
//   * edge e is the pair {d, twin(d)} with d < twin(d); edges are numbered in
//     increasing order of that smaller dart.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "percoplane/errors.hpp"

namespace percoplane {

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

enum class Surface { plane_patch, torus };

inline const char* to_string(Surface s) {
  return s == Surface::torus ? "torus" : "plane";
}

/// Number of times a dart crosses the two period seams of a torus.
struct Shift {
  int dx = 0;
  int dy = 0;

  bool zero() const { return dx == 0 && dy == 0; }
  friend Shift operator+(Shift a, Shift b) { return {a.dx + b.dx, a.dy + b.dy}; }
  friend Shift operator-(Shift a, Shift b) { return {a.dx - b.dx, a.dy - b.dy}; }
  friend Shift operator-(Shift a) { return {-a.dx, -a.dy}; }
  friend bool operator==(Shift a, Shift b) = default;
};

struct Face {
  std::size_t id = 0;
  std::vector<std::size_t> darts;  // boundary walk
  bool is_outer = false;

  std::size_t size() const { return darts.size(); }
};

/// Optional data attached to a map at build time.
struct MapExtras {
  std::optional<std::size_t> outer_dart;
  std::optional<std::pair<std::size_t, std::size_t>> outer_dart_between;  // from_neighbour_lists only
  std::optional<std::vector<std::size_t>> boundary_vertices;
  std::vector<Shift> shifts;              // empty, or one per dart
  std::vector<std::array<int, 2>> coords;  // empty, or one per vertex
  std::map<std::string, std::string> metadata;
};

class CombinatorialMap;

CombinatorialMap build_map(std::size_t vertex_count,
                           std::vector<std::size_t> dart_origins,
                           std::vector<std::size_t> rotation,
                           std::vector<std::size_t> twin, Surface surface,
                           MapExtras extras = {});

/// Immutable, validated combinatorial map. Construct with build_map().
class CombinatorialMap {
 public:
  CombinatorialMap() = default;

  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t dart_count() const { return origin_.size(); }
  std::size_t edge_count() const { return edge_dart_.size(); }
  std::size_t face_count() const { return face_offsets_.empty() ? 0 : face_offsets_.size() - 1; }
  Surface surface() const { return surface_; }

  std::size_t origin(std::size_t d) const { return origin_[d]; }
  std::size_t target(std::size_t d) const { return origin_[twin_[d]]; }
  std::size_t twin(std::size_t d) const { return twin_[d]; }
  std::size_t rotation(std::size_t d) const { return rotation_[d]; }
  std::size_t rotation_inverse(std::size_t d) const { return rotation_inv_[d]; }
  std::size_t face_next(std::size_t d) const { return rotation_[twin_[d]]; }
  std::size_t face_prev(std::size_t d) const { return twin_[rotation_inv_[d]]; }
  std::size_t face_of(std::size_t d) const { return face_of_[d]; }

  std::span<const std::size_t> face_darts(std::size_t f) const {
    return {face_darts_.data() + face_offsets_[f], face_offsets_[f + 1] - face_offsets_[f]};
  }
  std::size_t face_size(std::size_t f) const { return face_offsets_[f + 1] - face_offsets_[f]; }
  std::vector<std::size_t> face_vertices(std::size_t f) const {
    std::vector<std::size_t> out;
    for (auto d : face_darts(f)) out.push_back(origin_[d]);
    return out;
  }

  std::size_t first_dart(std::size_t v) const { return first_dart_[v]; }
  std::size_t degree(std::size_t v) const { return degree_[v]; }
  /// Darts leaving v in counter-clockwise order, starting at first_dart(v).
  std::vector<std::size_t> vertex_darts(std::size_t v) const {
    std::vector<std::size_t> out;
    std::size_t d = first_dart_[v];
    do {
      out.push_back(d);
      d = rotation_[d];
    } while (d != first_dart_[v]);
    return out;
  }

  std::size_t edge_of(std::size_t d) const { return edge_of_[d]; }
  std::size_t edge_dart(std::size_t e) const { return edge_dart_[e]; }

  std::optional<std::size_t> outer_face() const { return outer_face_; }
  bool is_outer(std::size_t f) const { return outer_face_ && *outer_face_ == f; }
  std::optional<std::size_t> outer_dart() const { return outer_dart_; }
  const std::vector<std::size_t>& boundary_vertices() const { return boundary_; }
  bool is_boundary(std::size_t v) const { return !is_boundary_.empty() && is_boundary_[v]; }

  bool has_shifts() const { return !shifts_.empty(); }
  Shift shift(std::size_t d) const { return shifts_.empty() ? Shift{} : shifts_[d]; }
  bool has_coords() const { return !coords_.empty(); }
  std::array<int, 2> coord(std::size_t v) const { return coords_[v]; }

  const std::map<std::string, std::string>& metadata() const { return metadata_; }
  std::string meta(const std::string& key, const std::string& fallback = "") const {
    auto it = metadata_.find(key);
    return it == metadata_.end() ? fallback : it->second;
  }

  std::vector<Face> faces() const {
    std::vector<Face> out(face_count());
    for (std::size_t f = 0; f < out.size(); ++f) {
      out[f].id = f;
      auto ds = face_darts(f);
      out[f].darts.assign(ds.begin(), ds.end());
      out[f].is_outer = is_outer(f);
    }
    return out;
  }

  int euler_characteristic() const {
    return static_cast<int>(vertex_count_) - static_cast<int>(edge_count()) +
           static_cast<int>(face_count());
  }

  /// Raw permutation data, as accepted by build_map().
  const std::vector<std::size_t>& origins() const { return origin_; }
  const std::vector<std::size_t>& rotations() const { return rotation_; }
  const std::vector<std::size_t>& twins() const { return twin_; }
  const std::vector<Shift>& shifts() const { return shifts_; }
  const std::vector<std::array<int, 2>>& coords() const { return coords_; }

  /// Copy with the metadata table replaced; structure is untouched.
  CombinatorialMap with_metadata(std::map<std::string, std::string> md) const {
    CombinatorialMap out = *this;
    out.metadata_ = std::move(md);
    return out;
  }

 private:
  friend CombinatorialMap build_map(std::size_t, std::vector<std::size_t>,
                                    std::vector<std::size_t>, std::vector<std::size_t>,
                                    Surface, MapExtras);

  std::size_t vertex_count_ = 0;
  Surface surface_ = Surface::plane_patch;
  std::vector<std::size_t> origin_, rotation_, rotation_inv_, twin_;
  std::vector<std::size_t> first_dart_, degree_;
  std::vector<std::size_t> face_of_, face_offsets_, face_darts_;
  std::vector<std::size_t> edge_of_, edge_dart_;
  std::optional<std::size_t> outer_face_, outer_dart_;
  std::vector<std::size_t> boundary_;
  std::vector<char> is_boundary_;
  std::vector<Shift> shifts_;
  std::vector<std::array<int, 2>> coords_;
  std::map<std::string, std::string> metadata_;
};

inline CombinatorialMap build_map(std::size_t vertex_count,
                                  std::vector<std::size_t> dart_origins,
                                  std::vector<std::size_t> rotation,
                                  std::vector<std::size_t> twin, Surface surface,
                                  MapExtras extras) {
  const std::size_t n = dart_origins.size();
  if (rotation.size() != n || twin.size() != n)
    throw MalformedPermutation("origin, rotation and twin arrays differ in length");
  if (n % 2 != 0) throw MalformedPermutation("odd number of darts");

  for (std::size_t d = 0; d < n; ++d) {
    if (dart_origins[d] >= vertex_count)
      throw MalformedPermutation("dart " + std::to_string(d) + " has invalid origin");
    if (twin[d] >= n || rotation[d] >= n)
      throw MalformedPermutation("dart " + std::to_string(d) + " maps out of range");
    if (twin[d] == d)
      throw MalformedPermutation("twin has a fixed point at dart " + std::to_string(d));
    if (twin[twin[d]] != d)
      throw MalformedPermutation("twin is not an involution at dart " + std::to_string(d));
    if (dart_origins[rotation[d]] != dart_origins[d])
      throw MalformedPermutation("rotation moves dart " + std::to_string(d) +
                                 " to another vertex");
  }

  CombinatorialMap m;
  m.vertex_count_ = vertex_count;
  m.surface_ = surface;
  m.rotation_inv_.assign(n, npos);
  for (std::size_t d = 0; d < n; ++d) {
    if (m.rotation_inv_[rotation[d]] != npos)
      throw MalformedPermutation("rotation is not a bijection");
    m.rotation_inv_[rotation[d]] = d;
  }

  m.first_dart_.assign(vertex_count, npos);
  m.degree_.assign(vertex_count, 0);
  for (std::size_t d = 0; d < n; ++d) {
    auto v = dart_origins[d];
    if (m.first_dart_[v] == npos) m.first_dart_[v] = d;
    ++m.degree_[v];
  }
  for (std::size_t v = 0; v < vertex_count; ++v) {
    if (m.first_dart_[v] == npos)
      throw MalformedPermutation("vertex " + std::to_string(v) + " has no darts");
    std::size_t len = 0, d = m.first_dart_[v];
    do {
      ++len;
      d = rotation[d];
    } while (d != m.first_dart_[v] && len <= n);
    if (len != m.degree_[v])
      throw MalformedPermutation("rotation at vertex " + std::to_string(v) +
                                 " is not a single cycle");
  }

  m.origin_ = std::move(dart_origins);
  m.rotation_ = std::move(rotation);
  m.twin_ = std::move(twin);

  m.face_of_.assign(n, npos);
  m.face_offsets_.push_back(0);
  for (std::size_t d0 = 0; d0 < n; ++d0) {
    if (m.face_of_[d0] != npos) continue;
    const std::size_t f = m.face_offsets_.size() - 1;
    std::size_t d = d0;
    do {
      m.face_of_[d] = f;
      m.face_darts_.push_back(d);
      d = m.face_next(d);
    } while (d != d0);
    m.face_offsets_.push_back(m.face_darts_.size());
  }

  m.edge_of_.assign(n, npos);
  for (std::size_t d = 0; d < n; ++d) {
    if (d < m.twin_[d]) {
      m.edge_of_[d] = m.edge_of_[m.twin_[d]] = m.edge_dart_.size();
      m.edge_dart_.push_back(d);
    }
  }

  // Connectedness: Euler's formula below presumes a single component.
  {
    std::vector<char> seen(vertex_count, 0);
    std::deque<std::size_t> queue{0};
    seen[0] = 1;
    std::size_t reached = vertex_count ? 1 : 0;
    while (!queue.empty()) {
      auto v = queue.front();
      queue.pop_front();
      for (auto d : m.vertex_darts(v)) {
        auto w = m.target(d);
        if (!seen[w]) {
          seen[w] = 1;
          ++reached;
          queue.push_back(w);
        }
      }
    }
    if (reached != vertex_count) throw EulerMismatch("map is not connected");
  }

  const int expected = surface == Surface::torus ? 0 : 2;
  if (m.euler_characteristic() != expected)
    throw EulerMismatch("Euler characteristic " + std::to_string(m.euler_characteristic()) +
                        " does not match " + to_string(surface) + " (expected " +
                        std::to_string(expected) + ")");

  if (!extras.shifts.empty()) {
    if (extras.shifts.size() != n) throw Error("shift table must have one entry per dart");
    for (std::size_t d = 0; d < n; ++d) {
      if (extras.shifts[m.twin_[d]] != -extras.shifts[d])
        throw Error("shift of twin dart is not negated at dart " + std::to_string(d));
      if (surface != Surface::torus && !extras.shifts[d].zero())
        throw Error("non-zero shift on a plane patch");
    }
    for (std::size_t f = 0; f + 1 < m.face_offsets_.size(); ++f) {
      Shift sum;
      for (auto d : m.face_darts(f)) sum = sum + extras.shifts[d];
      if (!sum.zero())
        throw Error("face " + std::to_string(f) + " has non-contractible boundary");
    }
    m.shifts_ = std::move(extras.shifts);
  }

  if (!extras.coords.empty()) {
    if (extras.coords.size() != vertex_count)
      throw Error("coordinate table must have one entry per vertex");
    m.coords_ = std::move(extras.coords);
  }

  if (surface == Surface::plane_patch) {
    std::size_t outer;
    if (extras.outer_dart) {
      if (*extras.outer_dart >= n) throw Error("outer dart out of range");
      outer = m.face_of_[*extras.outer_dart];
      m.outer_dart_ = extras.outer_dart;
    } else {
      outer = 0;
      for (std::size_t f = 1; f < m.face_count(); ++f)
        if (m.face_size(f) > m.face_size(outer)) outer = f;
      m.outer_dart_ = m.face_darts(outer)[0];
    }
    m.outer_face_ = outer;
    if (extras.boundary_vertices) {
      m.boundary_ = *extras.boundary_vertices;
    } else {
      m.boundary_ = m.face_vertices(outer);
    }
    std::sort(m.boundary_.begin(), m.boundary_.end());
    m.boundary_.erase(std::unique(m.boundary_.begin(), m.boundary_.end()), m.boundary_.end());
    m.is_boundary_.assign(vertex_count, 0);
    for (auto v : m.boundary_) {
      if (v >= vertex_count) throw Error("boundary vertex out of range");
      m.is_boundary_[v] = 1;
    }
  } else {
    if (extras.outer_dart) throw Error("a torus map has no outer face");
    if (extras.boundary_vertices && !extras.boundary_vertices->empty())
      throw Error("a torus map has no boundary vertices");
  }

  m.metadata_ = std::move(extras.metadata);
  return m;
}

/// Builds a simple map from counter-clockwise neighbour lists. Darts are
/// numbered vertex by vertex in list order.
inline CombinatorialMap from_neighbour_lists(const std::vector<std::vector<std::size_t>>& nbr,
                                             Surface surface, MapExtras extras = {}) {
  const std::size_t vc = nbr.size();
  std::vector<std::size_t> origins, rotation;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> dart_of;
  for (std::size_t v = 0; v < vc; ++v) {
    const std::size_t first = origins.size();
    for (std::size_t i = 0; i < nbr[v].size(); ++i) {
      if (!dart_of.emplace(std::pair{v, nbr[v][i]}, origins.size()).second)
        throw MalformedPermutation("repeated neighbour in list of vertex " + std::to_string(v));
      origins.push_back(v);
      rotation.push_back(first + (i + 1) % nbr[v].size());
    }
  }
  std::vector<std::size_t> twin(origins.size());
  for (const auto& [key, d] : dart_of) {
    auto it = dart_of.find({key.second, key.first});
    if (it == dart_of.end())
      throw MalformedPermutation("neighbour lists are not symmetric at " +
                                 std::to_string(key.first) + "-" + std::to_string(key.second));
    twin[d] = it->second;
  }
  if (extras.outer_dart_between) {
    auto [a, b] = *extras.outer_dart_between;
    extras.outer_dart = dart_of.at({a, b});
  }
  return build_map(vc, std::move(origins), std::move(rotation), std::move(twin), surface,
                   std::move(extras));
}

inline std::vector<Face> faces(const CombinatorialMap& m) { return m.faces(); }

inline int euler_characteristic(const CombinatorialMap& m) { return m.euler_characteristic(); }

/// Lift of origin(d) relative to the origin of the first dart of its face,
/// measured in torus periods. All zero on maps without shifts.
inline std::vector<Shift> face_potentials(const CombinatorialMap& m) {
  std::vector<Shift> pot(m.dart_count());
  for (std::size_t f = 0; f < m.face_count(); ++f) {
    Shift acc;
    for (auto d : m.face_darts(f)) {
      pot[d] = acc;
      acc = acc + m.shift(d);
    }
  }
  return pot;
}

/// Graph distances from `source`; npos for unreachable vertices.
inline std::vector<std::size_t> bfs_distances(const CombinatorialMap& m, std::size_t source) {
  std::vector<std::size_t> dist(m.vertex_count(), npos);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (auto d : m.vertex_darts(v)) {
      auto w = m.target(d);
      if (dist[w] == npos) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

/// Planar dual. Dual vertex f is face f; dual dart d crosses primal dart d,
/// so the pairing e <-> e+ is the identity on dart and edge ids.
inline CombinatorialMap dual(const CombinatorialMap& m) {
  const std::size_t n = m.dart_count();
  std::vector<std::size_t> origins(n), rot(n), tw(n);
  for (std::size_t d = 0; d < n; ++d) {
    origins[d] = m.face_of(d);
    rot[d] = m.face_prev(d);
    tw[d] = m.twin(d);
  }
  MapExtras ex;
  if (m.has_shifts()) {
    auto pot = face_potentials(m);
    ex.shifts.resize(n);
    for (std::size_t d = 0; d < n; ++d) ex.shifts[d] = pot[d] - pot[m.rotation(d)];
  }
  ex.metadata["family"] = "dual:" + m.meta("family", "unknown");
  if (m.outer_face()) ex.metadata["outer_dual_vertex"] = std::to_string(*m.outer_face());
  return build_map(m.face_count(), std::move(origins), std::move(rot), std::move(tw),
                   m.surface(), std::move(ex));
}

namespace detail {

inline bool try_isomorphism(const CombinatorialMap& a, const CombinatorialMap& b,
                            std::size_t image_of_zero, bool mirror) {
  const std::size_t n = a.dart_count();
  std::vector<std::size_t> fwd(n, npos), bwd(n, npos);
  std::vector<std::size_t> stack{0};
  fwd[0] = image_of_zero;
  bwd[image_of_zero] = 0;
  auto assign = [&](std::size_t x, std::size_t y) {
    if (fwd[x] == npos && bwd[y] == npos) {
      fwd[x] = y;
      bwd[y] = x;
      stack.push_back(x);
      return true;
    }
    return fwd[x] == y && bwd[y] == x;
  };
  while (!stack.empty()) {
    auto x = stack.back();
    stack.pop_back();
    auto y = fwd[x];
    auto rb = mirror ? b.rotation_inverse(y) : b.rotation(y);
    if (!assign(a.rotation(x), rb)) return false;
    if (!assign(a.twin(x), b.twin(y))) return false;
  }
  return std::find(fwd.begin(), fwd.end(), npos) == fwd.end();
}

}  // namespace detail

/// True iff the two maps are isomorphic as embedded graphs, allowing an
/// orientation reversal.
inline bool isomorphic(const CombinatorialMap& a, const CombinatorialMap& b) {
  if (a.vertex_count() != b.vertex_count() || a.dart_count() != b.dart_count() ||
      a.face_count() != b.face_count() || a.surface() != b.surface())
    return false;
  if (a.dart_count() == 0) return true;
  for (bool mirror : {false, true})
    for (std::size_t y = 0; y < b.dart_count(); ++y) {
      if (b.degree(b.origin(y)) != a.degree(a.origin(0))) continue;
      if (detail::try_isomorphism(a, b, y, mirror)) return true;
    }
  return false;
}

}  // namespace percoplane
