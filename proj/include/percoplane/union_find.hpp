#pragma once

// Disjoint sets with per-element displacement (in torus periods) relative to
// the set root. Closing a cycle whose displacements do not cancel marks the
// set as wrapping the torus.

#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "percoplane/planar_map.hpp"

namespace percoplane {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n = 0) { reset(n); }

  void reset(std::size_t n) {
    parent_.resize(n);
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    size_.assign(n, 1);
    offset_.assign(n, Shift{});
    wraps_.assign(n, 0);
    sets_ = n;
  }

  std::size_t element_count() const { return parent_.size(); }
  std::size_t set_count() const { return sets_; }

  std::size_t find(std::size_t v) {
    std::size_t root = v;
    Shift total;
    while (parent_[root] != root) {
      total = total + offset_[root];
      root = parent_[root];
    }
    // second pass: point everything at the root, rewriting offsets
    while (parent_[v] != root) {
      std::size_t next = parent_[v];
      Shift rest = total - offset_[v];
      offset_[v] = total;
      parent_[v] = root;
      total = rest;
      v = next;
    }
    return root;
  }

  /// Lift of v relative to its root.
  Shift offset(std::size_t v) {
    find(v);
    return parent_[v] == v ? Shift{} : offset_[v];
  }

  /// Joins a and b where lift(b) = lift(a) + s. Returns true if two sets merged.
  bool unite(std::size_t a, std::size_t b, Shift s = {}) {
    std::size_t ra = find(a), rb = find(b);
    Shift la = offset(a), lb = offset(b);
    if (ra == rb) {
      if (lb != la + s) wraps_[ra] = 1;
      return false;
    }
    Shift rb_rel = la + s - lb;  // lift(rb) - lift(ra)
    if (size_[ra] < size_[rb]) {
      std::swap(ra, rb);
      rb_rel = -rb_rel;
    }
    parent_[rb] = ra;
    offset_[rb] = rb_rel;
    size_[ra] += size_[rb];
    wraps_[ra] = wraps_[ra] | wraps_[rb];
    --sets_;
    return true;
  }

  bool same(std::size_t a, std::size_t b) { return find(a) == find(b); }
  std::size_t size(std::size_t v) { return size_[find(v)]; }
  bool wraps(std::size_t v) { return wraps_[find(v)] != 0; }

 private:
  std::vector<std::size_t> parent_, size_;
  std::vector<Shift> offset_;
  std::vector<char> wraps_;
  std::size_t sets_ = 0;
};

}  // namespace percoplane
