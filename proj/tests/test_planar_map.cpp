#include <gtest/gtest.h>

#include <set>

#include "percoplane/map_io.hpp"
#include "percoplane/planar_map.hpp"
#include "percoplane/tilings.hpp"

using namespace percoplane;

namespace {

// Tetrahedron drawn as a triangle 0,1,2 with vertex 3 in the middle.
CombinatorialMap k4() {
  return from_neighbour_lists({{1, 3, 2}, {2, 3, 0}, {0, 3, 1}, {0, 1, 2}}, Surface::plane_patch);
}

// 2x2 square torus: darts 4v+k with k = E,N,W,S. Every vertex sees its
// horizontal neighbour twice, so this needs explicit darts.
CombinatorialMap square_2x2() {
  std::vector<std::size_t> origin(16), rot(16), twin(16);
  for (std::size_t v = 0; v < 4; ++v) {
    std::size_t x = v % 2, y = v / 2;
    std::size_t east = y * 2 + (x + 1) % 2, north = ((y + 1) % 2) * 2 + x;
    for (std::size_t k = 0; k < 4; ++k) {
      origin[4 * v + k] = v;
      rot[4 * v + k] = 4 * v + (k + 1) % 4;
    }
    twin[4 * v + 0] = 4 * east + 2;
    twin[4 * east + 2] = 4 * v + 0;
    twin[4 * v + 1] = 4 * north + 3;
    twin[4 * north + 3] = 4 * v + 1;
  }
  return build_map(4, origin, rot, twin, Surface::torus);
}

std::vector<TilingSpec> torus_families() {
  return {{Family::square, 5}, {Family::square, 3, 4}, {Family::triangular, 4},
          {Family::triangular, 5}, {Family::hexagonal, 6}, {Family::hexagonal, 4, 6}};
}

}  // namespace

TEST(BuildMap, TetrahedronCounts) {
  auto m = k4();
  EXPECT_EQ(m.vertex_count(), 4u);
  EXPECT_EQ(m.edge_count(), 6u);
  EXPECT_EQ(m.face_count(), 4u);
  EXPECT_EQ(euler_characteristic(m), 2);
  int outer = 0;
  for (const auto& f : faces(m)) {
    EXPECT_EQ(f.size(), 3u);
    outer += f.is_outer;
  }
  EXPECT_EQ(outer, 1);
}

TEST(BuildMap, TwoByTwoTorus) {
  auto m = square_2x2();
  EXPECT_EQ(m.vertex_count(), 4u);
  EXPECT_EQ(m.edge_count(), 8u);
  EXPECT_EQ(m.face_count(), 4u);
  EXPECT_EQ(euler_characteristic(m), 0);
  EXPECT_FALSE(m.outer_face());
  EXPECT_TRUE(m.boundary_vertices().empty());
}

TEST(BuildMap, SingleSquareFace) {
  auto m = from_neighbour_lists({{1, 3}, {2, 0}, {3, 1}, {0, 2}}, Surface::plane_patch);
  EXPECT_EQ(m.face_count(), 2u);
  EXPECT_EQ(euler_characteristic(m), 2);
}

TEST(BuildMap, RejectsMalformedInput) {
  // twin fixed point
  EXPECT_THROW(build_map(2, {0, 1}, {0, 1}, {0, 1}, Surface::plane_patch), MalformedPermutation);
  // twin not an involution
  EXPECT_THROW(build_map(3, {0, 1, 2, 0}, {3, 1, 2, 0}, {1, 2, 3, 0}, Surface::plane_patch),
               MalformedPermutation);
  // rotation jumps to another vertex
  EXPECT_THROW(build_map(2, {0, 1}, {1, 0}, {1, 0}, Surface::plane_patch), MalformedPermutation);
  // rotation not a bijection
  EXPECT_THROW(build_map(2, {0, 0, 1, 1}, {0, 0, 3, 2}, {2, 3, 0, 1}, Surface::plane_patch),
               MalformedPermutation);
  // two cycles at one vertex
  EXPECT_THROW(build_map(2, {0, 0, 1, 1}, {0, 1, 3, 2}, {2, 3, 0, 1}, Surface::plane_patch),
               MalformedPermutation);
  // odd dart count
  EXPECT_THROW(build_map(1, {0}, {0}, {0}, Surface::plane_patch), MalformedPermutation);
}

TEST(BuildMap, EulerMismatch) {
  auto m = k4();
  EXPECT_THROW(build_map(4, m.origins(), m.rotations(), m.twins(), Surface::torus), EulerMismatch);
  // a non-planar rotation of K4 has genus 1
  auto twisted = m.rotations();
  auto d0 = m.first_dart(3), d1 = m.rotation(d0), d2 = m.rotation(d1);
  twisted[d0] = d2;
  twisted[d2] = d1;
  twisted[d1] = d0;
  EXPECT_THROW(build_map(4, m.origins(), twisted, m.twins(), Surface::plane_patch), EulerMismatch);
  EXPECT_NO_THROW(build_map(4, m.origins(), twisted, m.twins(), Surface::torus));
}

TEST(BuildMap, DisconnectedRejected) {
  EXPECT_THROW(build_map(4, {0, 1, 2, 3}, {0, 1, 2, 3}, {1, 0, 3, 2}, Surface::plane_patch),
               EulerMismatch);
}

TEST(Faces, PartitionDarts) {
  for (const auto& spec : torus_families()) {
    auto m = generate(spec);
    std::vector<int> seen(m.dart_count(), 0);
    for (const auto& f : faces(m))
      for (auto d : f.darts) {
        ++seen[d];
        EXPECT_EQ(m.face_of(d), f.id);
      }
    for (auto c : seen) EXPECT_EQ(c, 1);
    EXPECT_EQ(euler_characteristic(m), 0) << spec.describe();
  }
}

TEST(Faces, NominalSizes) {
  for (auto [fam, size] : {std::pair{Family::triangular, 3u}, {Family::square, 4u},
                           {Family::hexagonal, 6u}}) {
    auto m = generate({fam, 6});
    for (const auto& f : faces(m)) EXPECT_EQ(f.size(), size) << to_string(fam);
  }
}

TEST(Faces, FaceWalkKeepsFaceOnTheRight) {
  // On a free square patch the walk from the lowest-left eastward dart is the exterior.
  auto m = generate({Family::square, 4, 0, 0, 0, 3, Boundary::free_patch});
  ASSERT_TRUE(m.outer_face());
  EXPECT_EQ(m.face_size(*m.outer_face()), 12u);
  for (std::size_t f = 0; f < m.face_count(); ++f)
    if (!m.is_outer(f)) {
      EXPECT_EQ(m.face_size(f), 4u);
    }
}

TEST(Dual, SquareTorusSelfDual) {
  for (std::size_t l : {3u, 4u, 5u}) {
    auto m = generate({Family::square, l});
    auto d = dual(m);
    EXPECT_TRUE(isomorphic(d, m)) << "L=" << l;
  }
}

TEST(Dual, TriangularDualIsHexagonal) {
  auto m = generate({Family::triangular, 6});
  auto d = dual(m);
  for (std::size_t v = 0; v < d.vertex_count(); ++v) EXPECT_EQ(d.degree(v), 3u);
  for (const auto& f : faces(d)) EXPECT_EQ(f.size(), 6u);
  EXPECT_EQ(d.vertex_count(), 2 * m.vertex_count());
}

TEST(Dual, InvolutionOnTori) {
  for (const auto& spec : torus_families()) {
    auto m = generate(spec);
    auto dd = dual(dual(m));
    EXPECT_TRUE(isomorphic(dd, m)) << spec.describe();
    // the stored pairing is the identity on dart ids, so dd has m's structure verbatim
    EXPECT_EQ(dd.twins(), m.twins());
  }
}

TEST(Dual, PlanePatchMarksOuterVertex) {
  auto m = k4();
  auto d = dual(m);
  EXPECT_EQ(d.meta("outer_dual_vertex"), std::to_string(*m.outer_face()));
  EXPECT_EQ(d.vertex_count(), 4u);
  EXPECT_TRUE(isomorphic(d, m));
}

TEST(Dual, ShiftsStayConsistent) {
  // build_map verifies twin antisymmetry and zero face sums; the dual of a
  // torus must pass both.
  for (const auto& spec : torus_families()) {
    auto d = dual(generate(spec));
    EXPECT_TRUE(d.has_shifts());
  }
}

TEST(Isomorphism, DistinguishesFamilies) {
  EXPECT_FALSE(isomorphic(generate({Family::square, 4}), generate({Family::square, 3, 5})));
  EXPECT_FALSE(isomorphic(generate({Family::square, 6}), generate({Family::hexagonal, 6})));
}

TEST(ExchangeFormat, RoundTripIsByteExact) {
  std::vector<TilingSpec> specs = torus_families();
  specs.push_back({Family::square, 5, 0, 0, 0, 3, Boundary::free_patch});
  specs.push_back({Family::hexagonal, 6, 0, 0, 0, 3, Boundary::free_patch});
  specs.push_back({Family::hyperbolic, 3, 0, 3, 7, 3, Boundary::free_patch});
  specs.push_back({Family::tree, 3, 0, 0, 0, 3, Boundary::free_patch});
  for (const auto& spec : specs) {
    auto text = to_text(generate(spec));
    auto back = map_from_text(text);
    EXPECT_EQ(to_text(back), text) << spec.describe();
  }
  auto text = to_text(k4());
  EXPECT_EQ(to_text(map_from_text(text)), text);
}

TEST(ExchangeFormat, ParseErrorsCarryLineNumbers) {
  try {
    map_from_text("map plane 1 2\nv 0 0 1\nt 0 1\nbogus\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  EXPECT_THROW(map_from_text("v 0 0\n"), ParseError);
  EXPECT_THROW(map_from_text("map klein 1 2\n"), ParseError);
  EXPECT_THROW(map_from_text("map plane 2 2\nv 0 0\nv 1 1\nt 0 1\n"), ParseError);
  EXPECT_THROW(map_from_text("map plane 2 2\nv 0 0\nv 1 1\nt 0 0\nt 1 1\n"), MalformedPermutation);
}
