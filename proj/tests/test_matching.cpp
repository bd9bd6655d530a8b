#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "oracles.hpp"
#include "percoplane/matching.hpp"
#include "percoplane/tilings.hpp"

using namespace percoplane;

namespace {

CombinatorialMap single_face(std::size_t k) {
  std::vector<std::vector<std::size_t>> nbr(k);
  for (std::size_t i = 0; i < k; ++i) nbr[i] = {(i + 1) % k, (i + k - 1) % k};
  return from_neighbour_lists(nbr, Surface::plane_patch);
}

TilingSpec free_patch(Family f, std::size_t w, std::size_t h = 0) {
  TilingSpec s{f, w, h};
  s.boundary = Boundary::free_patch;
  return s;
}

oracle::EdgeList edge_list(const AugmentedGraph& g) {
  oracle::EdgeList out;
  for (const auto& e : g.edges()) out.push_back({e.u, e.v});
  return out;
}

std::vector<FacePartition> partitions(const CombinatorialMap& m) {
  std::vector<FacePartition> out{make_partition(m, PartitionStrategy::all_f1),
                                 make_partition(m, PartitionStrategy::all_f2),
                                 make_partition(m, PartitionStrategy::checkerboard)};
  if (m.meta("family") == "square" && m.surface() == Surface::torus &&
      std::stoi(m.meta("lx")) % 3 == 0 && std::stoi(m.meta("ly")) % 3 == 0)
    out.push_back(make_partition(m, PartitionStrategy::periodic));
  return out;
}

}  // namespace

TEST(MatchingGraph, DiagonalCounts) {
  EXPECT_EQ(matching_graph(single_face(4)).edge_count(), 4u + 2u);
  EXPECT_EQ(matching_graph(single_face(6)).edge_count(), 6u + 9u);
  for (const auto& spec : {TilingSpec{Family::square, 5}, TilingSpec{Family::hexagonal, 6},
                           free_patch(Family::hexagonal, 7, 6)}) {
    auto m = generate(spec);
    auto star = matching_graph(m);
    std::vector<std::size_t> per_face(m.face_count(), 0);
    for (const auto& e : star.edges())
      if (e.tag == EdgeTag::diagonal) ++per_face[e.face];
    for (std::size_t f = 0; f < m.face_count(); ++f) {
      std::size_t k = m.face_size(f);
      EXPECT_EQ(per_face[f], m.is_outer(f) ? 0 : k * (k - 3) / 2) << spec.describe();
    }
  }
}

TEST(MatchingGraph, TriangulationIsFixed) {
  for (std::size_t l = 3; l <= 8; ++l) {
    auto m = generate({Family::triangular, l});
    auto g = as_graph(m);
    auto star = matching_graph(m);
    EXPECT_EQ(adjacency_pairs(star), adjacency_pairs(g)) << "L=" << l;
    EXPECT_EQ(edge_keys(star), edge_keys(g));
  }
}

TEST(MatchingGraph, DiagonalsJoinNonAdjacentBoundaryVertices) {
  auto m = generate({Family::hexagonal, 6});
  auto star = matching_graph(m);
  auto base = edge_keys(as_graph(m));
  for (const auto& e : star.edges()) {
    if (e.tag != EdgeTag::diagonal) continue;
    auto vs = m.face_vertices(e.face);
    EXPECT_NE(std::find(vs.begin(), vs.end(), e.u), vs.end());
    EXPECT_NE(std::find(vs.begin(), vs.end(), e.v), vs.end());
    EXPECT_EQ(base.count(detail::edge_key(e.u, e.v, e.shift)), 0u);
  }
}

TEST(MatchingGraph, NonCycleFaceRejected) {
  // a square with a pendant edge hanging into its interior
  MapExtras ex;
  ex.outer_dart_between = std::pair<std::size_t, std::size_t>{3, 0};
  auto m = from_neighbour_lists({{1, 4, 3}, {2, 0}, {3, 1}, {2, 0}, {0}}, Surface::plane_patch, ex);
  EXPECT_EQ(m.face_size(*m.outer_face()), 4u);
  EXPECT_THROW(matching_graph(m), NonCycleFace);
}

TEST(MatchingPair, EdgeSetIdentities) {
  for (const auto& spec : {TilingSpec{Family::square, 6}, TilingSpec{Family::square, 3, 4},
                           TilingSpec{Family::hexagonal, 6}, free_patch(Family::square, 6),
                           free_patch(Family::hexagonal, 8)}) {
    auto m = std::make_shared<const CombinatorialMap>(generate(spec));
    auto base = edge_keys(as_graph(m));
    auto star = edge_keys(matching_graph(m));
    for (const auto& p : partitions(*m)) {
      auto [g1, g2] = matching_pair(m, p);
      auto k1 = edge_keys(g1), k2 = edge_keys(g2);
      decltype(k1) both, either;
      std::set_intersection(k1.begin(), k1.end(), k2.begin(), k2.end(),
                            std::inserter(both, both.end()));
      std::set_union(k1.begin(), k1.end(), k2.begin(), k2.end(), std::inserter(either, either.end()));
      EXPECT_EQ(both, base) << spec.describe();
      EXPECT_EQ(either, star) << spec.describe();
    }
  }
}

TEST(MatchingPair, DegenerateAndTriangulationCases) {
  auto sq = std::make_shared<const CombinatorialMap>(generate({Family::square, 5}));
  auto [g1, g2] = matching_pair(sq, make_partition(*sq, PartitionStrategy::all_f1));
  EXPECT_EQ(edge_keys(g1), edge_keys(matching_graph(sq)));
  EXPECT_EQ(edge_keys(g2), edge_keys(as_graph(sq)));

  auto tri = std::make_shared<const CombinatorialMap>(generate({Family::triangular, 5}));
  for (const auto& p : partitions(*tri)) {
    auto [t1, t2] = matching_pair(tri, p);
    EXPECT_EQ(edge_keys(t1), edge_keys(as_graph(tri)));
    EXPECT_EQ(edge_keys(t2), edge_keys(as_graph(tri)));
  }
}

TEST(MatchingPair, RejectsNonMosaicsAndIncompletePartitions) {
  auto tree = generate(free_patch(Family::tree, 3));
  EXPECT_THROW(matching_pair(tree, make_partition(tree, PartitionStrategy::all_f1)), NotAMosaic);
  auto ladder = generate(free_patch(Family::ladder, 5));
  EXPECT_THROW(hatted_graphs(ladder, make_partition(ladder, PartitionStrategy::all_f1)),
               NotAMosaic);
  auto sq = generate({Family::square, 4});
  PartitionOptions opt;
  opt.explicit_cls.assign(3, FaceClass::f1);
  EXPECT_THROW(make_partition(sq, PartitionStrategy::explicit_list, opt), PartitionIncomplete);
  opt.explicit_cls.assign(sq.face_count(), FaceClass::f1);
  opt.explicit_cls[5] = FaceClass::none;
  auto p = make_partition(sq, PartitionStrategy::explicit_list, opt);
  EXPECT_THROW(matching_pair(sq, p), PartitionIncomplete);
}

TEST(Partition, Strategies) {
  auto sq = generate({Family::square, 6});
  auto cb = make_partition(sq, PartitionStrategy::checkerboard);
  EXPECT_EQ(cb.count(FaceClass::f1), 18u);
  EXPECT_EQ(cb.count(FaceClass::f2), 18u);
  // neighbouring faces alternate on an even torus
  for (std::size_t d = 0; d < sq.dart_count(); ++d)
    EXPECT_NE(cb.cls[sq.face_of(d)], cb.cls[sq.face_of(sq.twin(d))]);

  auto per = make_partition(sq, PartitionStrategy::periodic);
  EXPECT_EQ(per.count(FaceClass::f1), 12u);
  EXPECT_THROW(make_partition(generate({Family::square, 4}), PartitionStrategy::periodic), Error);

  auto free_sq = generate(free_patch(Family::square, 5));
  auto all = make_partition(free_sq, PartitionStrategy::all_f1);
  EXPECT_EQ(all.cls[*free_sq.outer_face()], FaceClass::none);
  EXPECT_EQ(all.count(FaceClass::f1), 16u);

  std::ostringstream os;
  write_partition(os, cb);
  std::istringstream is(os.str());
  EXPECT_EQ(read_partition(is, sq).cls, cb.cls);
}

TEST(FacialTriangulation, SmallCases) {
  auto sq = facial_triangulation(single_face(4));
  EXPECT_EQ(sq.sites().size(), 1u);
  EXPECT_EQ(sq.edge_count(), 8u);
  ASSERT_NE(sq.planar(), nullptr);
  EXPECT_EQ(sq.planar()->map.face_count(), 5u);  // four triangles and the outer face
  auto tri = facial_triangulation(single_face(3));
  EXPECT_EQ(tri.sites().size(), 1u);
  EXPECT_EQ(tri.edge_count(), 6u);

  auto torus = facial_triangulation(generate({Family::square, 3}));
  EXPECT_EQ(torus.vertex_count(), 18u);
}

TEST(FacialTriangulation, IsATriangulation) {
  for (const auto& spec : {TilingSpec{Family::square, 4}, TilingSpec{Family::hexagonal, 6},
                           TilingSpec{Family::triangular, 4}, free_patch(Family::square, 5),
                           free_patch(Family::hexagonal, 6)}) {
    auto mhat = facial_triangulation(generate(spec));
    const auto& pm = mhat.planar()->map;
    for (std::size_t f = 0; f < pm.face_count(); ++f)
      if (!pm.is_outer(f)) {
        EXPECT_EQ(pm.face_size(f), 3u) << spec.describe();
      }
    for (const auto& s : mhat.sites()) {
      EXPECT_EQ(mhat.degree(s.vertex), mhat.base().face_size(s.face));
      for (const auto& inc : mhat.neighbours(s.vertex)) EXPECT_FALSE(mhat.is_site(inc.to));
    }
  }
}

TEST(HattedGraphs, DegenerateAndCheckerboard) {
  auto sq = std::make_shared<const CombinatorialMap>(generate({Family::square, 4}));
  auto [h1, h2] = hatted_graphs(sq, make_partition(*sq, PartitionStrategy::all_f1));
  EXPECT_EQ(to_text(h1.planar()->map), to_text(facial_triangulation(sq).planar()->map));
  EXPECT_EQ(h2.sites().size(), 0u);
  EXPECT_EQ(edge_keys(h2), edge_keys(as_graph(sq)));

  auto [c1, c2] = hatted_graphs(sq, make_partition(*sq, PartitionStrategy::checkerboard));
  EXPECT_EQ(c1.sites().size(), 8u);
  EXPECT_EQ(c2.sites().size(), 8u);
  for (auto v = c1.base_vertex_count(); v < c1.vertex_count(); ++v) EXPECT_EQ(c1.forced(v), 1);
  for (auto v = c2.base_vertex_count(); v < c2.vertex_count(); ++v) EXPECT_EQ(c2.forced(v), 0);
  auto open2 = c2.with_site_state(SiteState::open);
  EXPECT_EQ(open2.forced(c2.base_vertex_count()), 1);
}

// Connectivity in G_i(ω) between base vertices equals connectivity in Ĝ_i
// with the facial sites of F_i held open, for every ω.
TEST(HattedGraphs, EmulateMatchingPairConnectivity) {
  for (const auto& spec : {TilingSpec{Family::square, 3}, TilingSpec{Family::square, 3, 4},
                           free_patch(Family::square, 4, 3), free_patch(Family::hexagonal, 4, 3)}) {
    auto m = std::make_shared<const CombinatorialMap>(generate(spec));
    const std::size_t n = m->vertex_count();
    ASSERT_LE(n, 12u);
    for (const auto& p : partitions(*m)) {
      auto [g1, g2] = matching_pair(m, p);
      auto [h1, h2] = hatted_graphs(m, p);
      std::array<std::pair<const AugmentedGraph*, const AugmentedGraph*>, 2> pairs{
          std::pair{&g1, &h1}, std::pair{&g2, &h2}};
      for (auto [g, h] : pairs) {
        auto ge = edge_list(*g), he = edge_list(*h);
        for (std::uint64_t mask = 0; mask < (1u << n); ++mask) {
          auto keep = oracle::bits(mask, n);
          auto lg = oracle::components(n, ge, keep);
          keep.resize(h->vertex_count(), 1);
          auto lh = oracle::components(h->vertex_count(), he, keep);
          for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = u + 1; v < n; ++v)
              if (keep[u] && keep[v]) {
                ASSERT_EQ(lg[u] == lg[v], lh[u] == lh[v]) << spec.describe() << " mask=" << mask;
              }
        }
      }
    }
  }
}

TEST(AugmentedFormat, RoundTrip) {
  auto m = std::make_shared<const CombinatorialMap>(generate({Family::square, 3, 4}));
  auto p = make_partition(*m, PartitionStrategy::checkerboard);
  auto [g1, g2] = matching_pair(m, p);
  auto [h1, h2] = hatted_graphs(m, p);
  for (const auto* g : {&g1, &g2, &h1, &h2}) {
    auto text = to_text(*g);
    auto back = augmented_from_text(text);
    EXPECT_EQ(to_text(back), text);
    EXPECT_EQ(edge_keys(back), edge_keys(*g));
  }
  EXPECT_THROW(augmented_from_text(to_text(*m) + "diag 0 1\n"), ParseError);
}
