#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "percoplane/site_bond.hpp"
#include "percoplane/tilings.hpp"

using namespace percoplane;

namespace {

TilingSpec free_patch(Family f, std::size_t w, std::size_t h = 0) {
  TilingSpec s{f, w, h};
  s.boundary = Boundary::free_patch;
  return s;
}

std::vector<FacePartition> partitions(const CombinatorialMap& m) {
  return {make_partition(m, PartitionStrategy::all_f1), make_partition(m, PartitionStrategy::all_f2),
          make_partition(m, PartitionStrategy::checkerboard)};
}

std::vector<std::uint8_t> to_states(const std::vector<char>& b) { return {b.begin(), b.end()}; }

}  // namespace

TEST(BondRule, EdgeOpenIffBothEndsOpen) {
  auto m = std::make_shared<const CombinatorialMap>(generate({Family::square, 3}));
  DualityContext ctx(m, make_partition(*m, PartitionStrategy::checkerboard));
  const auto& g = ctx.g1hat();
  for (std::uint64_t mask = 0; mask < (1u << 9); ++mask) {
    auto w = extend(g, to_states(oracle::bits(mask, 9)));
    auto b = bond_from_sites(ctx, w);
    auto plus = dual_bond_config(b);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      ASSERT_EQ(b.state[e], w.state[g.edge(e).u] && w.state[g.edge(e).v]);
      ASSERT_EQ(b.state[e] + plus.state[e], 1);
    }
    EXPECT_EQ(dual_bond_config(plus).state, b.state);
  }
}

TEST(BondRule, ForcedAndLinkErrors) {
  auto m = std::make_shared<const CombinatorialMap>(generate({Family::square, 3}));
  DualityContext ctx(m, make_partition(*m, PartitionStrategy::all_f1));
  auto w = extend(ctx.g1hat(), std::vector<std::uint8_t>(9, 1));
  w.state.back() = 0;  // a Φ1 site must be open
  EXPECT_THROW(bond_from_sites(ctx, w), ForcedStateViolated);
  BondConfig bare;
  bare.state = {1, 0};
  EXPECT_THROW(dual_bond_config(bare), MissingDualLink);
  EXPECT_THROW(extend(ctx.g1hat(), {1, 1}), Error);
}

TEST(ClusterStats, MatchesDfsOracle) {
  std::mt19937_64 rng(7);
  std::vector<AugmentedGraph> graphs;
  for (const auto& spec : {TilingSpec{Family::square, 5}, TilingSpec{Family::triangular, 4},
                           free_patch(Family::hexagonal, 6, 5), free_patch(Family::square, 4)}) {
    auto m = std::make_shared<const CombinatorialMap>(generate(spec));
    for (const auto& p : partitions(*m)) {
      auto [h1, h2] = hatted_graphs(m, p);
      graphs.push_back(h1);
      graphs.push_back(h2);
    }
    graphs.push_back(matching_graph(m));
  }
  std::size_t instances = 0;
  for (int round = 0; round < 100000 / static_cast<int>(graphs.size()) + 1; ++round) {
    for (const auto& g : graphs) {
      std::vector<std::uint8_t> base(g.base_vertex_count());
      std::bernoulli_distribution coin(std::uniform_real_distribution<double>(0.1, 0.9)(rng));
      for (auto& s : base) s = coin(rng);
      auto w = extend(g, base);
      auto stats = cluster_stats(g, w);
      oracle::EdgeList edges;
      for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
      std::vector<char> open(g.vertex_count()), closed(g.vertex_count());
      for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        open[v] = w.state[v];
        closed[v] = !w.state[v];
      }
      auto lo = oracle::components(g.vertex_count(), edges, open);
      auto lc = oracle::components(g.vertex_count(), edges, closed);
      ASSERT_EQ(stats.n_open(), oracle::count_components(lo));
      ASSERT_EQ(stats.n_closed(), oracle::count_components(lc));
      // each engine cluster is exactly one oracle component
      for (const auto& c : stats.open) {
        for (auto v : c.vertices) ASSERT_EQ(lo[v], lo[c.vertices[0]]);
      }
      ++instances;
    }
  }
  EXPECT_GE(instances, 100000u);
}

TEST(ClusterStats, TorusWrapping) {
  auto m = std::make_shared<const CombinatorialMap>(generate({Family::square, 4}));
  auto g = as_graph(m);
  // open row y = 0 wraps horizontally
  std::vector<std::uint8_t> base(16, 0);
  for (std::size_t v = 0; v < 16; ++v)
    if (m->coord(v)[1] == 0) base[v] = 1;
  auto s = cluster_stats(g, extend(g, base));
  ASSERT_EQ(s.n_open(), 1u);
  EXPECT_TRUE(s.open[0].wraps);
  EXPECT_EQ(s.n_closed(), 1u);
  EXPECT_TRUE(s.closed[0].wraps);
  base.assign(16, 0);
  base[5] = 1;
  s = cluster_stats(g, extend(g, base));
  EXPECT_FALSE(s.open[0].wraps);
}

TEST(ClusterStats, BondSingletonConvention) {
  auto m = std::make_shared<const CombinatorialMap>(generate({Family::square, 3}));
  DualityContext ctx(m, make_partition(*m, PartitionStrategy::all_f2));
  std::vector<std::uint8_t> base(9, 0);
  base[0] = base[4] = 1;  // two non-adjacent open vertices
  auto w = extend(ctx.g1hat(), base);
  auto b = bond_from_sites(ctx, w);
  EXPECT_EQ(cluster_stats(b, &w.state).n_open(), 2u);
  EXPECT_EQ(cluster_stats(b).n_open(), ctx.sited().vertex_count());
}

TEST(Correspondence, ExhaustiveSmallTori) {
  for (auto [lx, ly] : {std::pair{3u, 3u}, {3u, 4u}}) {
    auto m = std::make_shared<const CombinatorialMap>(generate({Family::square, lx, ly}));
    for (const auto& p : partitions(*m)) {
      DualityContext ctx(m, p);
      const std::size_t n = m->vertex_count();
      std::size_t bad = 0;
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        auto rep = correspondence_check(ctx, to_states(oracle::bits(mask, n)));
        if (!rep.ok() && bad++ < 3) ADD_FAILURE() << lx << "x" << ly << " mask " << mask << ": " << rep.witnesses[0];
      }
      EXPECT_EQ(bad, 0u);
    }
  }
}

TEST(Correspondence, FreePatchesAndOtherLattices) {
  for (const auto& spec : {free_patch(Family::square, 4, 3), free_patch(Family::hexagonal, 4, 3),
                           free_patch(Family::triangular, 4, 3)}) {
    auto m = std::make_shared<const CombinatorialMap>(generate(spec));
    for (const auto& p : partitions(*m)) {
      DualityContext ctx(m, p);
      const std::size_t n = m->vertex_count();
      ASSERT_LE(n, 16u);
      std::size_t bad = 0;
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        auto rep = correspondence_check(ctx, to_states(oracle::bits(mask, n)));
        if (!rep.ok() && bad++ < 3) ADD_FAILURE() << spec.describe() << " mask " << mask << ": " << rep.witnesses[0];
      }
      EXPECT_EQ(bad, 0u);
    }
  }
}

TEST(Correspondence, RandomLargerConfigurations) {
  std::mt19937_64 rng(11);
  for (const auto& spec : {TilingSpec{Family::square, 8}, TilingSpec{Family::hexagonal, 8},
                           TilingSpec{Family::triangular, 6}}) {
    auto m = std::make_shared<const CombinatorialMap>(generate(spec));
    for (const auto& p : partitions(*m)) {
      DualityContext ctx(m, p);
      for (int t = 0; t < 200; ++t) {
        std::vector<std::uint8_t> base(m->vertex_count());
        for (auto& s : base) s = rng() & 1;
        auto rep = correspondence_check(ctx, base);
        ASSERT_TRUE(rep.ok()) << spec.describe() << ": " << rep.witnesses[0];
      }
    }
  }
}

TEST(Correspondence, ExtremeConfigurations) {
  auto m = std::make_shared<const CombinatorialMap>(generate({Family::square, 4}));
  DualityContext ctx(m, make_partition(*m, PartitionStrategy::all_f1));
  auto all_open = correspondence_check(ctx, std::vector<std::uint8_t>(16, 1));
  EXPECT_TRUE(all_open.ok());
  EXPECT_EQ(all_open.n_site, 1u);
  EXPECT_EQ(all_open.n_closed, 0u);
  EXPECT_EQ(all_open.empty_regions, all_open.regions);
  auto all_closed = correspondence_check(ctx, std::vector<std::uint8_t>(16, 0));
  EXPECT_TRUE(all_closed.ok());
  EXPECT_EQ(all_closed.regions, 1u);
  EXPECT_EQ(all_closed.wrapping_closed, 1u);
  EXPECT_EQ(all_closed.wrapping_dual, 1u);
  // every Φ1 site is its own open cluster
  EXPECT_EQ(all_closed.n_site, 16u);
}

TEST(OneDependence, Probe) {
  auto m = std::make_shared<const CombinatorialMap>(generate({Family::square, 8}));
  auto [g1, g2] = hatted_graphs(m, make_partition(*m, PartitionStrategy::checkerboard));
  auto r = one_dependence_probe(g1, 0.6, 200000, 3);
  EXPECT_TRUE(r.ok()) << r.marginal << " " << r.adjacent << " " << r.disjoint_corr;
  EXPECT_NEAR(r.marginal, 0.36, 0.01);
  EXPECT_NEAR(r.adjacent, 0.216, 0.01);
}
