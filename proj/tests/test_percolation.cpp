#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "percoplane/percolation.hpp"

using namespace percoplane;

namespace {

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

// Wrapping by BFS in the universal cover: a component wraps iff some vertex
// is reached with two different lifts.
bool oracle_wraps(const AugmentedGraph& g, const std::vector<char>& open) {
  const std::size_t n = g.vertex_count();
  std::vector<std::vector<std::tuple<std::size_t, int, int>>> adj(n);
  for (const auto& e : g.edges()) {
    adj[e.u].push_back({e.v, e.shift.dx, e.shift.dy});
    adj[e.v].push_back({e.u, -e.shift.dx, -e.shift.dy});
  }
  std::vector<char> seen(n, 0);
  std::vector<std::pair<int, int>> lift(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (!open[s] || seen[s]) continue;
    seen[s] = 1;
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (auto [w, dx, dy] : adj[v]) {
        if (!open[w]) continue;
        std::pair<int, int> l{lift[v].first + dx, lift[v].second + dy};
        if (!seen[w]) {
          seen[w] = 1;
          lift[w] = l;
          stack.push_back(w);
        } else if (lift[w] != l) {
          return true;
        }
      }
    }
  }
  return false;
}

}  // namespace

TEST(Sampling, ExtremesAndForcedSites) {
  auto m = std::make_shared<const CombinatorialMap>(generate({Family::square, 4}));
  auto [g1, g2] = hatted_graphs(m, make_partition(*m, PartitionStrategy::all_f1));
  for (double p : {0.0, 1.0}) {
    auto w1 = sample_sites(g1, p, 1, 2);
    auto w2 = sample_sites(g1.with_site_state(SiteState::closed), p, 1, 2);
    for (std::size_t v = 0; v < g1.vertex_count(); ++v) {
      EXPECT_EQ(w1.state[v], g1.is_site(v) ? 1 : static_cast<int>(p));
      EXPECT_EQ(w2.state[v], g1.is_site(v) ? 0 : static_cast<int>(p));
    }
  }
  EXPECT_EQ(sample_sites(g1, 0.4, 9, 3).state, sample_sites(g1, 0.4, 9, 3).state);
  EXPECT_NE(sample_sites(g1, 0.4, 9, 3).state, sample_sites(g1, 0.4, 9, 4).state);
  EXPECT_THROW(sample_sites(g1, 1.5, 0, 0), Error);
}

TEST(Sampling, DensityConcentrates) {
  auto g = as_graph(generate({Family::square, 1000}));
  auto w = sample_sites(g, 0.3, 2024, 0);
  double frac = std::accumulate(w.state.begin(), w.state.end(), 0.0) / static_cast<double>(w.size());
  EXPECT_NEAR(frac, 0.3, 0.002);
}

TEST(Binomial, WeightsMatchDirectFormula) {
  for (std::size_t n : {1u, 7u, 40u}) {
    for (double p : {0.1, 0.5, 0.93}) {
      auto [lo, w] = detail::binomial_weights(n, p);
      double total = 0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        std::size_t k = lo + i;
        double c = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
        EXPECT_NEAR(w[i], c * std::pow(p, k) * std::pow(1 - p, n - k), 1e-12);
        total += w[i];
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
  // large n must not underflow
  auto [lo, w] = detail::binomial_weights(100000, 0.59);
  EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-9);
  EXPECT_LT(w.size(), 4000u);  // about ±11σ, σ ≈ 155
}

TEST(Engine, DirectSamplingMatchesOracles) {
  // cluster statistics from the tracker against brute-force traversal
  std::mt19937_64 rng(5);
  std::vector<AugmentedGraph> tori, patches;
  for (std::size_t l : {3u, 4u, 6u}) {
    auto m = std::make_shared<const CombinatorialMap>(generate({Family::square, l}));
    tori.push_back(as_graph(m));
    tori.push_back(matching_graph(m));
    tori.push_back(hatted_graphs(m, make_partition(*m, PartitionStrategy::checkerboard)).first);
  }
  tori.push_back(as_graph(generate({Family::hexagonal, 4})));
  tori.push_back(as_graph(generate({Family::triangular, 5})));
  for (const auto& s : {free_patch(Family::square, 7), free_patch(Family::triangular, 6)}) {
    auto m = std::make_shared<const CombinatorialMap>(generate(s));
    patches.push_back(as_graph(m));
    patches.push_back(matching_graph(m));
  }
  std::size_t checked = 0;
  for (int t = 0; t < 400; ++t) {
    double p = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
    for (const auto& g : tori) {
      auto vals = sample_observable(g, Observable::wrap_probability, p, 1, t);
      auto mx = sample_observable(g, Observable::max_cluster_fraction, p, 1, t);
      auto w = sample_sites(g, p, t, 0);
      std::vector<char> open(w.state.begin(), w.state.end());
      ASSERT_EQ(vals[0].first, oracle_wraps(g, open));
      auto lab = oracle::components(g.vertex_count(), edge_list(g), open);
      std::vector<std::size_t> sz(g.vertex_count(), 0);
      for (std::size_t v = 0; v < g.base_vertex_count(); ++v)
        if (lab[v] >= 0) ++sz[lab[v]];
      ASSERT_EQ(mx[0].first, *std::max_element(sz.begin(), sz.end()));
      ++checked;
    }
    for (const auto& g : patches) {
      auto bc = sample_observable(g, Observable::boundary_cluster_count, p, 1, t);
      auto cr = sample_observable(g, Observable::cross_probability, p, 1, t);
      auto w = sample_sites(g, p, t, 0);
      std::vector<char> open(w.state.begin(), w.state.end());
      auto lab = oracle::components(g.vertex_count(), edge_list(g), open);
      const auto& m = g.base();
      auto dist = bfs_distances(m, std::stoul(m.meta("root")));
      const std::size_t k = std::stoul(m.meta("radius")) / 2;
      int lo = 1 << 30, hi = -1;
      for (std::size_t v = 0; v < m.vertex_count(); ++v) {
        lo = std::min(lo, m.coord(v)[0]);
        hi = std::max(hi, m.coord(v)[0]);
      }
      std::set<long> inner, outer, left, right;
      for (std::size_t v = 0; v < m.vertex_count(); ++v) {
        if (lab[v] < 0) continue;
        if (dist[v] <= k) inner.insert(lab[v]);
        if (m.is_boundary(v)) outer.insert(lab[v]);
        if (m.coord(v)[0] == lo) left.insert(lab[v]);
        if (m.coord(v)[0] == hi) right.insert(lab[v]);
      }
      std::size_t both = 0, cross = 0;
      for (auto c : inner) both += outer.count(c);
      for (auto c : left) cross += right.count(c);
      ASSERT_EQ(bc[0].first, both);
      ASSERT_EQ(cr[0].first, cross > 0);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 400u * (tori.size() + patches.size()));
}

TEST(Engine, SweepMatchesExactEnumeration) {
  // E[max cluster] and P(wrap) on the 3x3 square torus, exactly, by summing
  // over all 512 configurations
  auto g = as_graph(generate({Family::square, 3}));
  const std::size_t n = 9;
  std::vector<double> exact_wrap(n + 1, 0), exact_max(n + 1, 0), configs(n + 1, 0);
  for (std::uint64_t mask = 0; mask < 512; ++mask) {
    auto open = oracle::bits(mask, n);
    auto k = static_cast<std::size_t>(__builtin_popcountll(mask));
    auto lab = oracle::components(n, edge_list(g), open);
    std::vector<std::size_t> sz(n, 0);
    for (auto l : lab)
      if (l >= 0) ++sz[l];
    exact_max[k] += *std::max_element(sz.begin(), sz.end());
    exact_wrap[k] += oracle_wraps(g, open);
    configs[k] += 1;
  }
  auto wrap = newman_ziff_run(g, Observable::wrap_probability, 40000, 1);
  auto mx = newman_ziff_run(g, Observable::max_cluster_fraction, 40000, 1);
  for (double p : {0.2, 0.5, 0.7}) {
    double ew = 0, em = 0;
    for (std::size_t k = 0; k <= n; ++k) {
      double c = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
      double b = c * std::pow(p, k) * std::pow(1 - p, n - k);
      ew += b * exact_wrap[k] / configs[k];
      em += b * exact_max[k] / configs[k] / n;
    }
    auto [mw, sw] = wrap.at(p);
    auto [mm, sm] = mx.at(p);
    EXPECT_NEAR(mw, ew, 5 * sw + 1e-9) << p;
    EXPECT_NEAR(mm, em, 5 * sm + 1e-9) << p;
  }
}

TEST(Engine, WrapCurveEndpointsAndMonotone) {
  auto g = as_graph(generate({Family::triangular, 16}));
  auto c = newman_ziff_sweep(g, 500, Observable::wrap_probability, parse_pgrid("0:1:0.02"), 3);
  EXPECT_EQ(c.points.front().mean, 0.0);
  EXPECT_EQ(c.points.back().mean, 1.0);
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    EXPECT_GE(c.points[i].mean, c.points[i - 1].mean - 1e-12);
    EXPECT_TRUE(std::isfinite(c.points[i].stderr_));
  }
}

TEST(Engine, ThreadCountDoesNotChangeResults) {
  auto m = std::make_shared<const CombinatorialMap>(generate({Family::square, 12}));
  auto g = hatted_graphs(m, make_partition(*m, PartitionStrategy::all_f1)).first;
  EngineOptions one, four;
  four.threads = 4;
  auto a = newman_ziff_run(g, Observable::wrap_probability, 333, 77, one);
  auto b = newman_ziff_run(g, Observable::wrap_probability, 333, 77, four);
  EXPECT_EQ(a.sum, b.sum);
  EXPECT_EQ(a.block_trials, b.block_trials);
  std::ostringstream sa, sb;
  write_curve_csv(sa, curve_from(a, parse_pgrid("0.3:0.6:0.01")), {{"seed", "77"}});
  write_curve_csv(sb, curve_from(b, parse_pgrid("0.3:0.6:0.01")), {{"seed", "77"}});
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Engine, UnsupportedObservables) {
  auto torus = as_graph(generate({Family::square, 4}));
  auto patch = as_graph(generate(free_patch(Family::square, 4)));
  EXPECT_THROW(newman_ziff_run(patch, Observable::wrap_probability, 10, 1), UnsupportedObservable);
  EXPECT_THROW(newman_ziff_run(torus, Observable::cross_probability, 10, 1), UnsupportedObservable);
  EXPECT_THROW(newman_ziff_run(torus, Observable::boundary_cluster_count, 10, 1), UnsupportedObservable);
  EXPECT_THROW(newman_ziff_run(patch, Observable::root_shell_mass, 10, 1), UnsupportedObservable);
  EXPECT_THROW(parse_pgrid("0.1:0.5"), Error);
  EXPECT_THROW(parse_observable("nonsense"), Error);
  EXPECT_EQ(parse_observable("wrap"), Observable::wrap_probability);
}

TEST(Threshold, TriangularSmallSizes) {
  GraphRecipe r{{Family::triangular, 16}};
  auto est = estimate_pc(r, {16, 32}, 4000, 12);
  EXPECT_EQ(est.method, PcMethod::wrap_crossing);
  EXPECT_NEAR(est.pc, 0.5, 0.015);
  EXPECT_GT(est.half_width, 0);
  EXPECT_LT(est.half_width, 0.02);
  EXPECT_THROW(estimate_pc(r, {16}, 100, 1), CurvesDoNotCross);
}

TEST(Threshold, TreeShellMassCrossesAtOneHalf) {
  GraphRecipe r{free_patch(Family::tree, 10)};
  auto est = estimate_pc(r, {8, 9, 10}, 4000, 5);
  EXPECT_EQ(est.method, PcMethod::size_scaling);
  EXPECT_NEAR(est.pc, 0.5, 0.03);
}

TEST(Threshold, ShellMassMatchesTreeFormula) {
  // 3-regular tree: E|shell_r ∩ C(root)| = 3 * 2^(r-1) * p^(r+1)
  auto g = as_graph(generate(free_patch(Family::tree, 6)));
  EngineOptions o;
  o.probe.shell = 4;
  auto d = newman_ziff_run(g, Observable::root_shell_mass, 20000, 8, o);
  for (double p : {0.3, 0.6, 0.9}) {
    auto [m, se] = d.at(p);
    EXPECT_NEAR(m, 3 * 8 * std::pow(p, 5), 5 * se) << p;
  }
}

TEST(Counts, BoundaryClusters) {
  auto h = generate(free_patch(Family::tree, 4));
  auto at1 = boundary_cluster_count(h, 1.0, 20, 1);
  EXPECT_EQ(at1.mean, 1.0);
  EXPECT_EQ(at1.histogram.size(), 1u);
  EXPECT_EQ(boundary_cluster_count(h, 0.0, 20, 1).mean, 0.0);
  auto sq = generate(free_patch(Family::square, 9));
  auto c = boundary_cluster_count(sq, 0.7, 2000, 2);
  EXPECT_GT(c.mean, 0.9);
  EXPECT_LT(c.mean, 1.2);
}

TEST(Counts, UniquenessFractionAndSpanning) {
  GraphRecipe torus{{Family::square, 8}};
  auto u = uniqueness_fraction(torus, 0.8, 300, {8, 16}, 4);
  ASSERT_EQ(u.size(), 2u);
  EXPECT_GT(u[1].fraction, 0.95);
  GraphRecipe tree{free_patch(Family::tree, 8)};
  auto t = uniqueness_fraction(tree, 0.9, 300, {8}, 4);
  EXPECT_LT(t[0].fraction, 0.3);
  auto ladder = as_graph(generate(free_patch(Family::ladder, 30)));
  EXPECT_EQ(spanning_fraction(ladder, 1.0, 10, 1).mean, 1.0);
  EXPECT_EQ(spanning_fraction(ladder, 0.0, 10, 1).mean, 0.0);
}

TEST(Blocking, TrivialConfigurations) {
  auto m = generate(free_patch(Family::square, 5));
  auto part = make_partition(m, PartitionStrategy::all_f1);
  auto all_open = blocking_circuit_check(m, part, std::vector<std::uint8_t>(25, 1), 1);
  EXPECT_TRUE(all_open.blocked);
  EXPECT_TRUE(all_open.circuit);
  EXPECT_GE(all_open.witness.size(), 4u);
  for (auto v : all_open.witness) EXPECT_GT(bfs_distances(m, 12)[v], 1u);
  auto all_closed = blocking_circuit_check(m, part, std::vector<std::uint8_t>(25, 0), 1);
  EXPECT_FALSE(all_closed.blocked);
  EXPECT_FALSE(all_closed.circuit);
  EXPECT_THROW(blocking_circuit_check(m, part, std::vector<std::uint8_t>(25, 0), 2), BallClipped);
}

TEST(Blocking, ExhaustiveFiveByFive) {
  auto m = std::make_shared<const CombinatorialMap>(generate(free_patch(Family::square, 5)));
  std::vector<std::size_t> outside;
  auto dist = bfs_distances(*m, 12);
  for (std::size_t v = 0; v < 25; ++v)
    if (dist[v] > 1) outside.push_back(v);
  ASSERT_EQ(outside.size(), 20u);
  for (auto strat : {PartitionStrategy::all_f1, PartitionStrategy::checkerboard, PartitionStrategy::all_f2}) {
    BlockingContext ctx(m, make_partition(*m, strat), 1);
    std::size_t bad = 0, blocked = 0;
    std::vector<std::uint8_t> omega(25, 0);
    for (std::uint64_t mask = 0; mask < (1u << 20); ++mask) {
      for (std::size_t i = 0; i < 20; ++i) omega[outside[i]] = (mask >> i) & 1;
      auto r = ctx.check(omega);
      bad += !r.consistent();
      blocked += r.blocked;
    }
    EXPECT_EQ(bad, 0u);
    EXPECT_GT(blocked, 0u);
    EXPECT_LT(blocked, 1u << 20);
  }
}

TEST(Csv, HeaderAndRows) {
  SweepCurve c;
  c.obs = Observable::wrap_probability;
  c.points = {{0.5, 0.25, 0.01, 10}};
  std::ostringstream os;
  write_curve_csv(os, c, {{"seed", "3"}});
  EXPECT_EQ(os.str(),
            "# observable: WRAP_PROBABILITY\n# seed: 3\n# version: 1.0.0\np,mean,stderr,trials\n0.5,0.25,0.01,10\n");
}
