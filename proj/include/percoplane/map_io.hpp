#pragma once

// Plain-text map exchange format.
//
//   map <plane|torus> <V> <D>
//   v <id> <darts leaving v in rotation order, smallest first>   (one per vertex)
//   t <dart> <twin>                                              (one per dart)
//   outer <dart>                    optional, plane patches
//   boundary <v> <v> ...            optional, plane patches
//   w <dart> <dx> <dy>              optional, torus period crossings (all darts)
//   c <v> <x> <y>                   optional, lattice coordinates (all vertices)
//   meta <key> <value>              zero or more, sorted by key
//
// write_map(read_map(s)) == s for every s produced by write_map.

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "percoplane/planar_map.hpp"

namespace percoplane {

inline void write_map(std::ostream& os, const CombinatorialMap& m) {
  os << "map " << to_string(m.surface()) << ' ' << m.vertex_count() << ' ' << m.dart_count()
     << '\n';
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    os << "v " << v;
    for (auto d : m.vertex_darts(v)) os << ' ' << d;
    os << '\n';
  }
  for (std::size_t d = 0; d < m.dart_count(); ++d) os << "t " << d << ' ' << m.twin(d) << '\n';
  if (m.surface() == Surface::plane_patch) {
    if (m.outer_dart()) os << "outer " << *m.outer_dart() << '\n';
    os << "boundary";
    for (auto v : m.boundary_vertices()) os << ' ' << v;
    os << '\n';
  }
  if (m.has_shifts())
    for (std::size_t d = 0; d < m.dart_count(); ++d)
      os << "w " << d << ' ' << m.shift(d).dx << ' ' << m.shift(d).dy << '\n';
  if (m.has_coords())
    for (std::size_t v = 0; v < m.vertex_count(); ++v)
      os << "c " << v << ' ' << m.coord(v)[0] << ' ' << m.coord(v)[1] << '\n';
  for (const auto& [k, val] : m.metadata()) os << "meta " << k << ' ' << val << '\n';
}

inline std::string to_text(const CombinatorialMap& m) {
  std::ostringstream os;
  write_map(os, m);
  return os.str();
}

namespace detail {

/// Incremental parser shared with the augmented-graph reader: consumes map
/// lines and reports lines it does not own back to the caller.
class MapParser {
 public:
  /// Returns false if the line is not a map line.
  bool consume(const std::string& line, std::size_t lineno) {
    std::istringstream is(line);
    std::string tag;
    if (!(is >> tag)) return true;  // blank
    if (tag == "map") {
      std::string surf;
      if (!(is >> surf >> vertex_count_ >> dart_count_)) throw ParseError(lineno, "bad header");
      if (surf == "torus")
        surface_ = Surface::torus;
      else if (surf == "plane")
        surface_ = Surface::plane_patch;
      else
        throw ParseError(lineno, "unknown surface '" + surf + "'");
      origins_.assign(dart_count_, npos);
      rotation_.assign(dart_count_, npos);
      twin_.assign(dart_count_, npos);
      have_header_ = true;
      return true;
    }
    if (tag == "meta") {
      std::string key, value;
      if (!(is >> key)) throw ParseError(lineno, "meta without key");
      std::getline(is >> std::ws, value);
      extras_.metadata[key] = value;
      return true;
    }
    if (tag != "v" && tag != "t" && tag != "outer" && tag != "boundary" && tag != "w" &&
        tag != "c")
      return false;
    if (!have_header_) throw ParseError(lineno, "'" + tag + "' before map header");
    if (tag == "v") {
      std::size_t v, d;
      if (!(is >> v) || v >= vertex_count_) throw ParseError(lineno, "bad vertex id");
      std::vector<std::size_t> ds;
      while (is >> d) {
        if (d >= dart_count_) throw ParseError(lineno, "dart out of range");
        if (origins_[d] != npos) throw ParseError(lineno, "dart listed twice");
        origins_[d] = v;
        ds.push_back(d);
      }
      for (std::size_t i = 0; i < ds.size(); ++i) rotation_[ds[i]] = ds[(i + 1) % ds.size()];
    } else if (tag == "t") {
      std::size_t d, t;
      if (!(is >> d >> t) || d >= dart_count_ || t >= dart_count_)
        throw ParseError(lineno, "bad twin line");
      twin_[d] = t;
    } else if (tag == "outer") {
      std::size_t d;
      if (!(is >> d)) throw ParseError(lineno, "bad outer line");
      extras_.outer_dart = d;
    } else if (tag == "boundary") {
      std::vector<std::size_t> b;
      std::size_t v;
      while (is >> v) b.push_back(v);
      extras_.boundary_vertices = std::move(b);
    } else if (tag == "w") {
      std::size_t d;
      Shift s;
      if (!(is >> d >> s.dx >> s.dy) || d >= dart_count_) throw ParseError(lineno, "bad w line");
      if (extras_.shifts.empty()) extras_.shifts.resize(dart_count_);
      extras_.shifts[d] = s;
    } else if (tag == "c") {
      std::size_t v;
      int x, y;
      if (!(is >> v >> x >> y) || v >= vertex_count_) throw ParseError(lineno, "bad c line");
      if (extras_.coords.empty()) extras_.coords.resize(vertex_count_);
      extras_.coords[v] = {x, y};
    }
    return true;
  }

  CombinatorialMap finish(std::size_t lineno) {
    if (!have_header_) throw ParseError(lineno, "missing map header");
    for (std::size_t d = 0; d < dart_count_; ++d) {
      if (origins_[d] == npos) throw ParseError(lineno, "dart " + std::to_string(d) + " has no vertex");
      if (twin_[d] == npos) throw ParseError(lineno, "dart " + std::to_string(d) + " has no twin");
    }
    return build_map(vertex_count_, std::move(origins_), std::move(rotation_), std::move(twin_),
                     surface_, std::move(extras_));
  }

 private:
  bool have_header_ = false;
  std::size_t vertex_count_ = 0, dart_count_ = 0;
  Surface surface_ = Surface::plane_patch;
  std::vector<std::size_t> origins_, rotation_, twin_;
  MapExtras extras_;
};

}  // namespace detail

inline CombinatorialMap read_map(std::istream& is) {
  detail::MapParser parser;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!parser.consume(line, lineno)) throw ParseError(lineno, "unexpected line: " + line);
  }
  return parser.finish(lineno);
}

inline CombinatorialMap map_from_text(const std::string& text) {
  std::istringstream is(text);
  return read_map(is);
}

}  // namespace percoplane
