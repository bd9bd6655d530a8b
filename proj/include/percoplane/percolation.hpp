#pragma once

// Monte Carlo engine: product-measure sampling, Newman–Ziff sweeps with
// binomial convolution, crossing/wrapping observables, threshold estimation,
// and the finite-volume uniqueness proxies.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "percoplane/errors.hpp"
#include "percoplane/matching.hpp"
#include "percoplane/rng.hpp"
#include "percoplane/site_bond.hpp"
#include "percoplane/tilings.hpp"
#include "percoplane/union_find.hpp"

namespace percoplane {

inline constexpr const char* version = "1.0.0";

enum class Observable {
  wrap_probability,
  cross_probability,
  max_cluster_fraction,
  boundary_cluster_count,
  uniqueness_fraction,
  root_shell_mass,  // mean number of root-cluster vertices at a fixed distance from the root
};

inline const char* to_string(Observable o) {
  switch (o) {
    case Observable::wrap_probability: return "WRAP_PROBABILITY";
    case Observable::cross_probability: return "CROSS_PROBABILITY";
    case Observable::max_cluster_fraction: return "MAX_CLUSTER_FRACTION";
    case Observable::boundary_cluster_count: return "BOUNDARY_CLUSTER_COUNT";
    case Observable::uniqueness_fraction: return "UNIQUENESS_FRACTION";
    case Observable::root_shell_mass: return "ROOT_SHELL_MASS";
  }
  return "?";
}

inline Observable parse_observable(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  for (auto o : {Observable::wrap_probability, Observable::cross_probability, Observable::max_cluster_fraction,
                 Observable::boundary_cluster_count, Observable::uniqueness_fraction, Observable::root_shell_mass})
    if (s == to_string(o)) return o;
  if (s == "WRAP") return Observable::wrap_probability;
  if (s == "CROSS") return Observable::cross_probability;
  if (s == "MAX_CLUSTER") return Observable::max_cluster_fraction;
  if (s == "UNIQUENESS") return Observable::uniqueness_fraction;
  throw Error("unknown observable '" + s + "'");
}

/// ω under the product measure with density p; forced facial sites keep
/// their state. A pure function of (seed, trial).
inline SiteConfig sample_sites(const AugmentedGraph& g, double p, std::uint64_t seed, std::uint64_t trial) {
  if (!(p >= 0 && p <= 1)) throw Error("p must lie in [0,1]");
  SiteConfig c;
  c.state.resize(g.vertex_count());
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    int f = g.is_site(v) ? g.forced(v) : -1;
    c.state[v] = f >= 0 ? static_cast<std::uint8_t>(f) : element_uniform(seed, trial, v) < p;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Graph recipes: a tiling family plus the construction applied to it.

struct GraphRecipe {
  TilingSpec tiling;
  std::string graph = "g";  // g | star | g1 | g2 | ghat1 | ghat2 | mhat
  PartitionStrategy partition = PartitionStrategy::all_f1;
  std::string mask = "100/010/001";
  // hatted graphs only: by_class keeps Φ1 open and Φ2 closed (the duality
  // convention); "open" turns Ĝ2 into the open-cluster emulation of G2
  SiteState sites = SiteState::by_class;

  std::string describe() const {
    std::string s = tiling.describe() + " graph=" + graph;
    if (sites != SiteState::by_class) s += std::string(" sites=") + to_string(sites);
    if (graph != "g" && graph != "star" && graph != "mhat") {
      static const char* names[] = {"ALL_F1", "ALL_F2", "CHECKERBOARD", "PERIODIC", "EXPLICIT"};
      s += std::string(" partition=") + names[static_cast<int>(partition)];
      if (partition == PartitionStrategy::periodic) s += " mask=" + mask;
    }
    return s;
  }
};

inline AugmentedGraph build_graph(const GraphRecipe& r, std::size_t size = 0) {
  TilingSpec t = r.tiling;
  if (size) {
    if (t.size2 && t.size2 != t.size) throw Error("recipe with a rectangular torus cannot be resized");
    t.size = size;
    t.size2 = 0;
  }
  auto m = std::make_shared<const CombinatorialMap>(generate(t));
  if (r.graph == "g") return as_graph(m);
  if (r.graph == "star") return matching_graph(m);
  if (r.graph == "mhat") return facial_triangulation(m);
  PartitionOptions opt;
  opt.mask = r.mask;
  auto part = make_partition(*m, r.partition, opt);
  if (r.graph == "g1") return matching_pair(m, part).first;
  if (r.graph == "g2") return matching_pair(m, part).second;
  if (r.graph == "ghat1") return hatted_graphs(m, part).first.with_site_state(r.sites);
  if (r.graph == "ghat2") return hatted_graphs(m, part).second.with_site_state(r.sites);
  throw Error("unknown graph construction '" + r.graph + "'");
}

// ---------------------------------------------------------------------------
// Observable probes. Each vertex carries two marker bits (A, B) and a weight;
// clusters aggregate them under union.

struct ProbeOptions {
  std::size_t shell = npos;         // ROOT_SHELL_MASS: distance of the counted shell
  std::size_t inner_radius = npos;  // inner ball Λ_k for boundary counts; default radius/2
};

struct Probe {
  Observable obs;
  std::vector<std::uint8_t> marks;  // bit 0: set A, bit 1: set B
  std::vector<std::uint32_t> weight;
  std::size_t root = npos;
  bool torus = false;
  double scale = 1;  // curve value = accumulated value / scale
};

namespace detail {

inline std::size_t meta_size(const CombinatorialMap& m, const char* key) {
  auto s = m.meta(key);
  if (s.empty()) throw UnsupportedObservable(std::string("map has no '") + key + "' metadata");
  return std::stoul(s);
}

}  // namespace detail

inline Probe make_probe(const AugmentedGraph& g, Observable obs, const ProbeOptions& opt = {}) {
  const auto& m = g.base();
  const std::size_t n = g.vertex_count(), nv = g.base_vertex_count();
  Probe pr;
  pr.obs = obs;
  pr.torus = g.surface() == Surface::torus;
  pr.marks.assign(n, 0);
  pr.weight.assign(n, 0);
  auto need_free = [&](const char* what) {
    if (pr.torus) throw UnsupportedObservable(std::string(what) + " needs a free patch");
    if (m.boundary_vertices().empty()) throw UnsupportedObservable(std::string(what) + " needs a boundary");
  };
  auto mark_inner_and_boundary = [&](const char* what) {
    need_free(what);
    pr.root = detail::meta_size(m, "root");
    std::size_t k = opt.inner_radius != npos ? opt.inner_radius : detail::meta_size(m, "radius") / 2;
    auto dist = bfs_distances(m, pr.root);
    for (std::size_t v = 0; v < nv; ++v) {
      if (dist[v] <= k) pr.marks[v] |= 1;
      if (m.is_boundary(v)) pr.marks[v] |= 2;
    }
  };
  switch (obs) {
    case Observable::wrap_probability:
      if (!pr.torus) throw UnsupportedObservable("WRAP_PROBABILITY needs a torus");
      break;
    case Observable::cross_probability: {
      need_free("CROSS_PROBABILITY");
      if (!m.has_coords()) throw UnsupportedObservable("CROSS_PROBABILITY needs lattice coordinates");
      int lo = m.coord(0)[0], hi = lo;
      for (std::size_t v = 0; v < nv; ++v) {
        lo = std::min(lo, m.coord(v)[0]);
        hi = std::max(hi, m.coord(v)[0]);
      }
      for (std::size_t v = 0; v < nv; ++v) {
        if (m.coord(v)[0] == lo) pr.marks[v] |= 1;
        if (m.coord(v)[0] == hi) pr.marks[v] |= 2;
      }
      break;
    }
    case Observable::max_cluster_fraction:
      for (std::size_t v = 0; v < nv; ++v) pr.weight[v] = 1;
      pr.scale = static_cast<double>(nv);
      break;
    case Observable::boundary_cluster_count:
      mark_inner_and_boundary("BOUNDARY_CLUSTER_COUNT");
      break;
    case Observable::uniqueness_fraction:
      if (!pr.torus) mark_inner_and_boundary("UNIQUENESS_FRACTION");
      break;
    case Observable::root_shell_mass: {
      pr.root = detail::meta_size(m, "root");
      if (opt.shell == npos) throw UnsupportedObservable("ROOT_SHELL_MASS needs a shell distance");
      auto dist = bfs_distances(m, pr.root);
      for (std::size_t v = 0; v < nv; ++v) pr.weight[v] = dist[v] == opt.shell;
      break;
    }
  }
  return pr;
}

namespace detail {

/// Incremental cluster state for one configuration, built by opening vertices
/// one at a time.
class ClusterTracker {
 public:
  ClusterTracker(const AugmentedGraph& g, const Probe& pr)
      : g_(g), pr_(pr), ds_(g.vertex_count()), active_(g.vertex_count(), 0),
        marks_(g.vertex_count(), 0), weight_(g.vertex_count(), 0) {}

  void reset() {
    ds_.reset(g_.vertex_count());
    std::fill(active_.begin(), active_.end(), 0);
    proxies_ = 0;
    any_wrap_ = any_cross_ = false;
    max_weight_ = 0;
  }

  void open(std::size_t v) {
    active_[v] = 1;
    marks_[v] = pr_.marks[v];
    weight_[v] = pr_.weight[v];
    proxies_ += proxy(v);
    any_cross_ = any_cross_ || marks_[v] == 3;
    max_weight_ = std::max<std::uint64_t>(max_weight_, weight_[v]);
    for (const auto& inc : g_.neighbours(v)) {
      if (!active_[inc.to]) continue;
      std::size_t ra = ds_.find(v), rb = ds_.find(inc.to);
      if (ra == rb) {
        bool was = ds_.wraps(ra);
        ds_.unite(v, inc.to, inc.shift);
        if (!was && ds_.wraps(ra)) {
          any_wrap_ = true;
          if (pr_.torus) ++proxies_;
        }
        continue;
      }
      const long before = proxy(ra) + proxy(rb);
      const std::uint8_t mk = marks_[ra] | marks_[rb];
      const std::uint64_t w = weight_[ra] + weight_[rb];
      ds_.unite(v, inc.to, inc.shift);
      const std::size_t r = ds_.find(v);
      marks_[r] = mk;
      weight_[r] = w;
      proxies_ += proxy(r) - before;
      any_wrap_ = any_wrap_ || ds_.wraps(r);
      any_cross_ = any_cross_ || mk == 3;
      max_weight_ = std::max(max_weight_, w);
    }
  }

  /// Primary value, and the secondary channel (used as the denominator of
  /// the uniqueness fraction).
  std::pair<std::uint64_t, std::uint64_t> value() {
    switch (pr_.obs) {
      case Observable::wrap_probability: return {any_wrap_, 0};
      case Observable::cross_probability: return {any_cross_, 0};
      case Observable::max_cluster_fraction: return {max_weight_, 0};
      case Observable::boundary_cluster_count: return {static_cast<std::uint64_t>(proxies_), 0};
      case Observable::uniqueness_fraction: return {proxies_ == 1, proxies_ >= 1};
      case Observable::root_shell_mass:
        return {active_[pr_.root] ? weight_[ds_.find(pr_.root)] : 0, 0};
    }
    return {0, 0};
  }

  long proxies() const { return proxies_; }

 private:
  long proxy(std::size_t r) {
    if (pr_.torus) return pr_.obs == Observable::uniqueness_fraction && ds_.wraps(r);
    return marks_[r] == 3;
  }

  const AugmentedGraph& g_;
  const Probe& pr_;
  DisjointSets ds_;
  std::vector<char> active_;
  std::vector<std::uint8_t> marks_;
  std::vector<std::uint64_t> weight_;
  long proxies_ = 0;
  bool any_wrap_ = false, any_cross_ = false;
  std::uint64_t max_weight_ = 0;
};

/// Runs fn(block) for every block on `threads` workers.
template <class Fn>
void for_each_block(std::size_t blocks, unsigned threads, Fn fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
  if (threads == 1) {
    for (std::size_t b = 0; b < blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t b; (b = next.fetch_add(1)) < blocks;) {
        try {
          fn(b);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline std::size_t block_count(std::size_t trials) { return std::min<std::size_t>(100, trials); }
inline std::size_t block_begin(std::size_t b, std::size_t blocks, std::size_t trials) {
  return b * trials / blocks;
}

/// Binomial(n, p) weights from log space, truncated where they fall below
/// e^-60 of the mode. Returns the first k and the weights from there on.
inline std::pair<std::size_t, std::vector<double>> binomial_weights(std::size_t n, double p) {
  if (p <= 0) return {0, {1.0}};
  if (p >= 1) return {n, {1.0}};
  const double lp = std::log(p), lq = std::log1p(-p), ln = std::lgamma(n + 1.0);
  auto logw = [&](std::size_t k) {
    return ln - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * lp + (n - k) * lq;
  };
  std::size_t mode = std::min(n, static_cast<std::size_t>(std::floor((n + 1) * p)));
  const double top = logw(mode);
  std::size_t lo = mode, hi = mode;
  while (lo > 0 && logw(lo - 1) > top - 60) --lo;
  while (hi < n && logw(hi + 1) > top - 60) ++hi;
  std::vector<double> w(hi - lo + 1);
  for (std::size_t k = lo; k <= hi; ++k) w[k - lo] = std::exp(logw(k));
  return {lo, std::move(w)};
}

}  // namespace detail

/// Integer accumulators of a Newman–Ziff run, kept per contiguous block of
/// trials. Any curve value is a binomial convolution of these.
struct SweepData {
  Observable obs = Observable::wrap_probability;
  std::size_t free_sites = 0;  // vertices whose state is random
  std::size_t trials = 0;
  double scale = 1;
  std::vector<std::size_t> block_trials;
  std::vector<std::vector<std::uint64_t>> sum, aux;  // [block][k]

  std::size_t blocks() const { return block_trials.size(); }

  /// Curve value of one block at p (NaN when the uniqueness denominator vanishes).
  double block_value(std::size_t b, double p) const {
    auto [lo, w] = detail::binomial_weights(free_sites, p);
    return block_value(b, lo, w);
  }
  double block_value(std::size_t b, std::size_t lo, const std::vector<double>& w) const {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      num += w[i] * static_cast<double>(sum[b][lo + i]);
      if (obs == Observable::uniqueness_fraction) den += w[i] * static_cast<double>(aux[b][lo + i]);
    }
    if (obs == Observable::uniqueness_fraction) return den > 0 ? num / den : std::nan("");
    return num / static_cast<double>(block_trials[b]) / scale;
  }

  /// Mean over all trials and the block standard error.
  std::pair<double, double> at(double p) const {
    auto [lo, w] = detail::binomial_weights(free_sites, p);
    double num = 0, den = 0;
    std::vector<double> vals;
    for (std::size_t b = 0; b < blocks(); ++b) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        num += w[i] * static_cast<double>(sum[b][lo + i]);
        if (obs == Observable::uniqueness_fraction) den += w[i] * static_cast<double>(aux[b][lo + i]);
      }
      double v = block_value(b, lo, w);
      if (!std::isnan(v)) vals.push_back(v);
    }
    double mean = obs == Observable::uniqueness_fraction ? (den > 0 ? num / den : 0.0)
                                                         : num / static_cast<double>(trials) / scale;
    double se = 0;
    if (vals.size() > 1) {
      double mu = std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size(), ss = 0;
      for (auto v : vals) ss += (v - mu) * (v - mu);
      se = std::sqrt(ss / (vals.size() - 1) / vals.size());
    }
    return {mean, se};
  }
};

struct EngineOptions {
  unsigned threads = 1;
  ProbeOptions probe;
};

/// Per trial: forced-open sites first, then the random vertices in a random
/// order; the observable is recorded after every step.
inline SweepData newman_ziff_run(const AugmentedGraph& g, Observable obs, std::size_t trials,
                                 std::uint64_t seed, const EngineOptions& opt = {}) {
  if (trials == 0) throw Error("need at least one trial");
  const Probe pr = make_probe(g, obs, opt.probe);
  std::vector<std::size_t> free, forced_open;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    int f = g.is_site(v) ? g.forced(v) : -1;
    if (f < 0) free.push_back(v);
    if (f == 1) forced_open.push_back(v);
  }
  SweepData out;
  out.obs = obs;
  out.free_sites = free.size();
  out.trials = trials;
  out.scale = pr.scale;
  const std::size_t nb = detail::block_count(trials);
  out.block_trials.resize(nb);
  out.sum.assign(nb, std::vector<std::uint64_t>(free.size() + 1, 0));
  out.aux.assign(nb, std::vector<std::uint64_t>(obs == Observable::uniqueness_fraction ? free.size() + 1 : 0, 0));
  detail::for_each_block(nb, opt.threads, [&](std::size_t b) {
    detail::ClusterTracker tr(g, pr);
    std::vector<std::size_t> order(free);
    const std::size_t t0 = detail::block_begin(b, nb, trials), t1 = detail::block_begin(b + 1, nb, trials);
    out.block_trials[b] = t1 - t0;
    auto& s = out.sum[b];
    auto& a = out.aux[b];
    for (std::size_t t = t0; t < t1; ++t) {
      CounterRng rng(seed, t);
      std::copy(free.begin(), free.end(), order.begin());
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.bounded(i)]);
      tr.reset();
      for (auto v : forced_open) tr.open(v);
      auto record = [&](std::size_t k) {
        auto [x, y] = tr.value();
        s[k] += x;
        if (!a.empty()) a[k] += y;
      };
      record(0);
      for (std::size_t k = 0; k < order.size(); ++k) {
        tr.open(order[k]);
        record(k + 1);
      }
    }
  });
  return out;
}

struct SweepPoint {
  double p = 0, mean = 0, stderr_ = 0;
  std::size_t trials = 0;
};

struct SweepCurve {
  Observable obs = Observable::wrap_probability;
  std::vector<SweepPoint> points;
};

/// a:b:step, both ends included.
inline std::vector<double> parse_pgrid(const std::string& s) {
  double a, b, step;
  char c1, c2;
  char tail;
  if (std::sscanf(s.c_str(), "%lf%c%lf%c%lf%c", &a, &c1, &b, &c2, &step, &tail) != 5 || c1 != ':' || c2 != ':')
    throw Error("p-grid must look like a:b:step, got '" + s + "'");
  if (!(a >= 0 && b <= 1 && a <= b && step > 0)) throw Error("p-grid must satisfy 0 <= a <= b <= 1, step > 0");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(std::min(1.0, a + static_cast<double>(i) * step));
  return out;
}

inline SweepCurve curve_from(const SweepData& d, const std::vector<double>& pgrid) {
  SweepCurve c;
  c.obs = d.obs;
  double prev = -1;
  for (double p : pgrid) {
    if (!(p > prev)) throw Error("p-grid must be strictly increasing");
    prev = p;
    auto [m, se] = d.at(p);
    c.points.push_back({p, m, se, d.trials});
  }
  return c;
}

inline SweepCurve newman_ziff_sweep(const AugmentedGraph& g, std::size_t trials, Observable obs,
                                    const std::vector<double>& pgrid, std::uint64_t seed,
                                    const EngineOptions& opt = {}) {
  return curve_from(newman_ziff_run(g, obs, trials, seed, opt), pgrid);
}

// ---------------------------------------------------------------------------
// Threshold estimation.

enum class PcMethod { wrap_crossing, size_scaling };

inline const char* to_string(PcMethod m) {
  return m == PcMethod::wrap_crossing ? "WRAP_CROSSING" : "SIZE_SCALING";
}

struct ThresholdEstimate {
  double pc = 0;
  double half_width = 0;  // 95% bootstrap interval
  PcMethod method = PcMethod::wrap_crossing;
  std::vector<std::size_t> sizes;
  std::size_t total_trials = 0;
  std::uint64_t seed = 0;
  std::size_t resamples = 0;
  std::size_t failed_resamples = 0;
  std::vector<std::pair<std::size_t, SweepCurve>> curves;  // (size or shell, curve) on the report grid
};

struct PcOptions {
  unsigned threads = 1;
  std::size_t resamples = 1000;
  std::vector<double> report_grid;  // when set, the two compared curves are kept on this grid
};

namespace detail {

/// Bisection for D(p) = 0 on [a, b] with D(a) < 0 < D(b).
template <class F>
double bisect(F d, double a, double b) {
  for (int i = 0; i < 60 && b - a > 1e-12; ++i) {
    double mid = 0.5 * (a + b);
    (d(mid) < 0 ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

/// Crossing of two curves: the upward sign change of D = big - small with
/// the steepest rise on a coarse grid, refined by bisection.
inline double crossing(const SweepData& small, const SweepData& big) {
  auto d = [&](double p) { return big.at(p).first - small.at(p).first; };
  double best_a = -1, best_rise = 0;
  double pa = 0.0025, da = d(pa);
  for (double pb = 0.0075; pb < 1.0; pb += 0.005) {
    double db = d(pb);
    if (da < 0 && db >= 0 && db - da > best_rise) {
      best_rise = db - da;
      best_a = pa;
    }
    pa = pb;
    da = db;
  }
  if (best_a < 0) throw CurvesDoNotCross("curves do not cross on (0,1); more trials or sizes needed");
  return bisect(d, best_a, best_a + 0.005);
}

/// Block-bootstrap 95% half-width of the crossing.
inline std::pair<double, std::size_t> bootstrap_half_width(const SweepData& small, const SweepData& big, double pc,
                                                           std::size_t resamples, std::uint64_t seed) {
  const double step = 2.5e-4;
  std::vector<double> grid;
  for (double p = std::max(step, pc - 0.05); p < std::min(1.0, pc + 0.05); p += step) grid.push_back(p);
  // per-block values on the grid, weighted by block trial counts
  auto table = [&](const SweepData& d) {
    std::vector<std::vector<double>> num(d.blocks(), std::vector<double>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j) {
      auto [lo, w] = binomial_weights(d.free_sites, grid[j]);
      for (std::size_t b = 0; b < d.blocks(); ++b) num[b][j] = d.block_value(b, lo, w) * d.block_trials[b];
    }
    return num;
  };
  const auto ts = table(small), tb = table(big);
  CounterRng rng(seed, 0xb007);
  std::vector<double> est;
  std::size_t failed = 0;
  std::vector<double> cs(grid.size()), cb(grid.size());
  const std::size_t nb = std::min(small.blocks(), big.blocks());
  std::vector<std::size_t> picks(nb);
  for (std::size_t r = 0; r < resamples; ++r) {
    // the same block indices for both curves, which keeps paired runs paired
    for (auto& b : picks) b = rng.bounded(nb);
    auto draw = [&](const SweepData& d, const std::vector<std::vector<double>>& t, std::vector<double>& curve) {
      std::fill(curve.begin(), curve.end(), 0.0);
      double n = 0;
      for (auto b : picks) {
        n += d.block_trials[b];
        for (std::size_t j = 0; j < grid.size(); ++j) curve[j] += t[b][j];
      }
      for (auto& x : curve) x /= n;
    };
    draw(small, ts, cs);
    draw(big, tb, cb);
    double found = -1, nearest = 1e9;
    for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
      double d0 = cb[j] - cs[j], d1 = cb[j + 1] - cs[j + 1];
      if (d0 < 0 && d1 >= 0) {
        double x = grid[j] + step * (-d0) / (d1 - d0);
        if (std::abs(x - pc) < nearest) {
          nearest = std::abs(x - pc);
          found = x;
        }
      }
    }
    if (found < 0) {
      ++failed;
      continue;
    }
    est.push_back(found);
  }
  if (est.size() < 2) return {0.05, failed};
  std::sort(est.begin(), est.end());
  auto q = [&](double f) { return est[static_cast<std::size_t>(std::round(f * (est.size() - 1)))]; };
  return {std::max((q(0.975) - q(0.025)) / 2, step / 2), failed};
}

}  // namespace detail

/// p̂c from a family recipe. On a torus: crossing of the wrapping curves of
/// the two largest sizes. On a free patch with a root (hyperbolic, tree):
/// `sizes` are radii within one patch of the largest radius, and p̂c is where
/// the expected root-cluster mass on the two outermost shells coincides.
inline ThresholdEstimate estimate_pc(const GraphRecipe& recipe, std::vector<std::size_t> sizes,
                                     std::size_t trials, std::uint64_t seed, const PcOptions& opt = {}) {
  if (sizes.size() < 2) throw CurvesDoNotCross("at least two sizes are needed");
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.size() < 2) throw CurvesDoNotCross("at least two distinct sizes are needed");
  ThresholdEstimate est;
  est.sizes = sizes;
  est.seed = seed;
  est.resamples = opt.resamples;
  EngineOptions eo;
  eo.threads = opt.threads;
  SweepData small, big;
  const std::size_t s1 = sizes[sizes.size() - 2], s2 = sizes.back();
  if (recipe.tiling.boundary == Boundary::torus) {
    est.method = PcMethod::wrap_crossing;
    small = newman_ziff_run(build_graph(recipe, s1), Observable::wrap_probability, trials, stream_key(seed, s1), eo);
    big = newman_ziff_run(build_graph(recipe, s2), Observable::wrap_probability, trials, stream_key(seed, s2), eo);
  } else {
    est.method = PcMethod::size_scaling;
    auto g = build_graph(recipe, s2);
    // both shells from the same trials: the two masses are strongly
    // correlated, so their difference is far less noisy than either
    eo.probe.shell = s1;
    small = newman_ziff_run(g, Observable::root_shell_mass, trials, seed, eo);
    eo.probe.shell = s2;
    big = newman_ziff_run(g, Observable::root_shell_mass, trials, seed, eo);
  }
  est.total_trials = est.method == PcMethod::wrap_crossing ? 2 * trials : trials;
  if (!opt.report_grid.empty())
    est.curves = {{s1, curve_from(small, opt.report_grid)}, {s2, curve_from(big, opt.report_grid)}};
  est.pc = detail::crossing(small, big);
  std::tie(est.half_width, est.failed_resamples) =
      detail::bootstrap_half_width(small, big, est.pc, opt.resamples, seed);
  return est;
}

// ---------------------------------------------------------------------------
// Fixed-p measurements by direct sampling.

struct CountPoint {
  double p = 0, mean = 0, stderr_ = 0;
  std::size_t trials = 0;
  std::map<long, std::size_t> histogram;
};

/// Value of `obs` in `trials` independent configurations at density p.
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> sample_observable(
    const AugmentedGraph& g, Observable obs, double p, std::size_t trials, std::uint64_t seed,
    const EngineOptions& opt = {}) {
  const Probe pr = make_probe(g, obs, opt.probe);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out(trials);
  const std::size_t nb = detail::block_count(std::max<std::size_t>(trials, 1));
  detail::for_each_block(nb, opt.threads, [&](std::size_t b) {
    detail::ClusterTracker tr(g, pr);
    for (std::size_t t = detail::block_begin(b, nb, trials); t < detail::block_begin(b + 1, nb, trials); ++t) {
      auto w = sample_sites(g, p, seed, t);
      tr.reset();
      for (std::size_t v = 0; v < g.vertex_count(); ++v)
        if (w.state[v]) tr.open(v);
      out[t] = tr.value();
    }
  });
  return out;
}

inline CountPoint summarize(double p, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& vals, double scale = 1) {
  CountPoint c;
  c.p = p;
  c.trials = vals.size();
  double s = 0, ss = 0;
  for (auto [x, y] : vals) {
    ++c.histogram[static_cast<long>(x)];
    s += static_cast<double>(x) / scale;
    ss += static_cast<double>(x) * static_cast<double>(x) / (scale * scale);
  }
  const double n = static_cast<double>(vals.size());
  c.mean = n > 0 ? s / n : 0;
  c.stderr_ = n > 1 ? std::sqrt(std::max(0.0, (ss / n - c.mean * c.mean) * n / (n - 1)) / n) : 0;
  return c;
}

/// Number of open clusters meeting both the inner ball Λ_{r/2} and the
/// boundary of a free patch (radius r from metadata).
inline CountPoint boundary_cluster_count(const AugmentedGraph& g, double p, std::size_t trials,
                                         std::uint64_t seed, const EngineOptions& opt = {}) {
  return summarize(p, sample_observable(g, Observable::boundary_cluster_count, p, trials, seed, opt));
}
inline CountPoint boundary_cluster_count(const CombinatorialMap& m, double p, std::size_t trials,
                                         std::uint64_t seed, const EngineOptions& opt = {}) {
  return boundary_cluster_count(as_graph(m), p, trials, seed, opt);
}

/// Fraction of configurations with an open left-right crossing of a free patch.
inline CountPoint spanning_fraction(const AugmentedGraph& g, double p, std::size_t trials, std::uint64_t seed,
                                    const EngineOptions& opt = {}) {
  return summarize(p, sample_observable(g, Observable::cross_probability, p, trials, seed, opt));
}

struct SizePoint {
  std::size_t size = 0;
  double fraction = 0, stderr_ = 0;
  std::size_t trials = 0;       // all trials
  std::size_t conditioned = 0;  // trials with at least one proxy cluster
};

/// Uniqueness proxy per size at fixed p: among configurations with at least
/// one unbounded-proxy cluster (wrapping on a torus; meeting the inner ball
/// and the boundary on a free patch), the fraction with exactly one.
inline std::vector<SizePoint> uniqueness_fraction(const GraphRecipe& recipe, double p, std::size_t trials,
                                                  const std::vector<std::size_t>& sizes, std::uint64_t seed,
                                                  const EngineOptions& opt = {}) {
  std::vector<SizePoint> out;
  for (auto size : sizes) {
    auto g = build_graph(recipe, size);
    auto vals = sample_observable(g, Observable::uniqueness_fraction, p, trials, stream_key(seed, size), opt);
    SizePoint sp;
    sp.size = size;
    sp.trials = trials;
    std::size_t one = 0;
    for (auto [x, y] : vals) {
      one += x;
      sp.conditioned += y;
    }
    if (sp.conditioned) {
      sp.fraction = static_cast<double>(one) / sp.conditioned;
      sp.stderr_ = std::sqrt(sp.fraction * (1 - sp.fraction) / sp.conditioned);
    }
    out.push_back(sp);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Circuits around a ball against closed connections in the matching partner.

struct BlockingResult {
  bool blocked = false;              // no closed G2 path from Λ_n to the patch boundary
  bool circuit = false;              // an open G1 circuit outside Λ_n surrounds it
  std::vector<std::size_t> witness;  // the circuit, when asked for and present

  bool consistent() const { return blocked == circuit; }
};

/// Fixed data for repeated checks on one square free patch. Λ_n (around the
/// patch root) is a blob: its own states play no role.
class BlockingContext {
 public:
  BlockingContext(std::shared_ptr<const CombinatorialMap> m, const FacePartition& part, std::size_t n) : m_(m) {
    if (m->surface() != Surface::plane_patch || !m->has_coords() || m->meta("family") != "square")
      throw Error("blocking-circuit check needs a square free patch");
    const std::size_t root = detail::meta_size(*m, "root");
    in_ball_.assign(m->vertex_count(), 0);
    for (auto [v, d] : ball_vertices(*m, {root, n})) in_ball_[v] = 1;  // throws BallClipped
    auto [g1, g2] = matching_pair(m, part);
    // winding of each G1 edge around a point inside the ball, via a ray to +x
    const long cx = m->coord(root)[0], y0 = 3L * m->coord(root)[1] + 1;
    for (const auto& e : g1.edges()) {
      auto a = m->coord(e.u), b = m->coord(e.v);
      long ya = 3L * a[1], yb = 3L * b[1];
      int w = 0;
      if ((ya < y0) != (yb < y0)) {
        double x = a[0] + static_cast<double>(y0 - ya) * (b[0] - a[0]) / static_cast<double>(yb - ya);
        if (x >= cx) w = yb > ya ? 1 : -1;
      }
      g1_.push_back({e.u, e.v, w});
    }
    for (const auto& e : g2.edges()) g2_.push_back({e.u, e.v, 0});
  }

  BlockingResult check(const std::vector<std::uint8_t>& omega, bool want_witness = false) const {
    const auto& m = *m_;
    const std::size_t nv = m.vertex_count();
    if (omega.size() != nv) throw Error("configuration has the wrong length");
    BlockingResult r;

    // closed G2 connection, with the ball as one extra node
    DisjointSets ds(nv + 1);
    auto closed = [&](std::size_t v) { return !in_ball_[v] && !omega[v]; };
    for (const auto& e : g2_) {
      bool bu = in_ball_[e.u], bv = in_ball_[e.v];
      if (bu && bv) continue;
      std::size_t a = bu ? nv : e.u, b = bv ? nv : e.v;
      if ((bu || closed(e.u)) && (bv || closed(e.v))) ds.unite(a, b);
    }
    r.blocked = true;
    for (auto v : m.boundary_vertices())
      if (closed(v) && ds.same(v, nv)) r.blocked = false;

    // open G1 circuit with non-zero winding
    DisjointSets wd(nv);
    auto open = [&](std::size_t v) { return !in_ball_[v] && omega[v]; };
    for (const auto& e : g1_)
      if (open(e.u) && open(e.v)) {
        wd.unite(e.u, e.v, Shift{e.w, 0});
      }
    for (std::size_t v = 0; v < nv && !r.circuit; ++v)
      if (open(v) && wd.wraps(v)) r.circuit = true;
    if (r.circuit && want_witness) r.witness = witness(omega);
    return r;
  }

 private:
  struct WEdge {
    std::size_t u, v;
    int w;
  };

  // BFS tree with winding potentials; a non-tree edge that disagrees closes
  // a surrounding cycle.
  std::vector<std::size_t> witness(const std::vector<std::uint8_t>& omega) const {
    const std::size_t nv = m_->vertex_count();
    std::vector<std::vector<std::pair<std::size_t, int>>> adj(nv);
    for (const auto& e : g1_)
      if (!in_ball_[e.u] && !in_ball_[e.v] && omega[e.u] && omega[e.v]) {
        adj[e.u].push_back({e.v, e.w});
        adj[e.v].push_back({e.u, -e.w});
      }
    std::vector<long> pot(nv, 0);
    std::vector<std::size_t> parent(nv, npos), depth(nv, 0);
    std::vector<char> seen(nv, 0);
    for (std::size_t s = 0; s < nv; ++s) {
      if (seen[s] || adj[s].empty()) continue;
      seen[s] = 1;
      std::vector<std::size_t> queue{s};
      for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        auto u = queue[qi];
        for (auto [v, w] : adj[u]) {
          if (!seen[v]) {
            seen[v] = 1;
            pot[v] = pot[u] + w;
            parent[v] = u;
            depth[v] = depth[u] + 1;
            queue.push_back(v);
          } else if (pot[v] != pot[u] + w) {
            std::vector<std::size_t> left{u}, right{v};
            while (left.back() != right.back()) {
              auto& deeper = depth[left.back()] >= depth[right.back()] ? left : right;
              deeper.push_back(parent[deeper.back()]);
            }
            right.pop_back();
            left.insert(left.end(), right.rbegin(), right.rend());
            return left;
          }
        }
      }
    }
    return {};
  }

  std::shared_ptr<const CombinatorialMap> m_;
  std::vector<char> in_ball_;
  std::vector<WEdge> g1_, g2_;
};

inline BlockingResult blocking_circuit_check(const CombinatorialMap& m, const FacePartition& part,
                                             const std::vector<std::uint8_t>& omega, std::size_t n) {
  return BlockingContext(std::make_shared<const CombinatorialMap>(m), part, n).check(omega, true);
}

// ---------------------------------------------------------------------------
// CSV output.

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

/// `# key: value` header lines, then p,mean,stderr,trials.
inline void write_curve_csv(std::ostream& os, const SweepCurve& c,
                            const std::vector<std::pair<std::string, std::string>>& header) {
  os << "# observable: " << to_string(c.obs) << "\n";
  for (const auto& [k, v] : header) os << "# " << k << ": " << v << "\n";
  os << "# version: " << version << "\n";
  os << "p,mean,stderr,trials\n";
  for (const auto& pt : c.points)
    os << format_double(pt.p) << "," << format_double(pt.mean) << "," << format_double(pt.stderr_) << ","
       << pt.trials << "\n";
}

}  // namespace percoplane
