#pragma once

// Declarative experiments: an INI-style config names one of the registered
// experiments, which runs the relevant checks and writes CSVs plus a summary.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "percoplane/errors.hpp"
#include "percoplane/matching.hpp"
#include "percoplane/percolation.hpp"
#include "percoplane/site_bond.hpp"
#include "percoplane/tilings.hpp"

namespace percoplane {

// ---------------------------------------------------------------------------
// Config: `[section]` headers, `key = value` lines, `#` or `;` comments.

class Config {
 public:
  using Section = std::map<std::string, std::string>;

  std::map<std::string, Section> sections;

  bool has(const std::string& sec, const std::string& key) const {
    auto it = sections.find(sec);
    return it != sections.end() && it->second.count(key);
  }

  std::string get(const std::string& sec, const std::string& key) const {
    if (!has(sec, key)) throw ConfigError("missing key [" + sec + "] " + key);
    return sections.at(sec).at(key);
  }
  std::string get(const std::string& sec, const std::string& key, const std::string& fallback) const {
    return has(sec, key) ? sections.at(sec).at(key) : fallback;
  }

  std::size_t get_size(const std::string& sec, const std::string& key, std::size_t fallback = npos) const {
    if (!has(sec, key)) {
      if (fallback == npos) throw ConfigError("missing key [" + sec + "] " + key);
      return fallback;
    }
    return to_size(sec, key, get(sec, key));
  }

  double get_double(const std::string& sec, const std::string& key, double fallback = std::nan("")) const {
    if (!has(sec, key)) {
      if (std::isnan(fallback)) throw ConfigError("missing key [" + sec + "] " + key);
      return fallback;
    }
    const auto s = get(sec, key);
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("[" + sec + "] " + key + " is not a number: '" + s + "'");
    }
  }

  std::vector<std::size_t> get_sizes(const std::string& sec, const std::string& key) const {
    std::vector<std::size_t> out;
    std::stringstream ss(get(sec, key));
    for (std::string item; std::getline(ss, item, ',');) out.push_back(to_size(sec, key, trim(item)));
    if (out.empty()) throw ConfigError("[" + sec + "] " + key + " is empty");
    return out;
  }

  std::vector<std::string> get_list(const std::string& sec, const std::string& key) const {
    std::vector<std::string> out;
    std::stringstream ss(get(sec, key));
    for (std::string item; std::getline(ss, item, ',');)
      if (!trim(item).empty()) out.push_back(trim(item));
    return out;
  }

  static std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

 private:
  static std::size_t to_size(const std::string& sec, const std::string& key, const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("[" + sec + "] " + key + " must be a non-negative integer, got '" + s + "'");
    return std::stoul(s);
  }
};

inline Config parse_config(std::istream& is) {
  Config c;
  std::string line, section;
  for (std::size_t lineno = 1; std::getline(is, line); ++lineno) {
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = Config::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = Config::trim(line.substr(1, line.size() - 2));
      c.sections[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
    auto key = Config::trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (c.sections[section].count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key " + key);
    c.sections[section][key] = Config::trim(line.substr(eq + 1));
  }
  return c;
}

inline Config config_from_text(const std::string& s) {
  std::istringstream is(s);
  return parse_config(is);
}

inline Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in);
}

/// FNV-1a over the sorted key set, leaving out what cannot change results
/// (thread count, output directory).
inline std::string config_hash(const Config& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [sec, kv] : c.sections)
    for (const auto& [k, v] : kv) {
      if ((sec == "budget" && k == "threads") || (sec == "experiment" && k == "output")) continue;
      feed(sec + "." + k + "=" + v + "\n");
    }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Reports.

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunReport {
  std::string experiment;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  std::vector<std::filesystem::path> files;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
};

namespace detail {

inline std::string fmt(double x, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline std::string join(const std::vector<std::size_t>& v, const char* sep = ";") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
  return s;
}

/// Shared state of one run: config, output directory, header block.
class RunContext {
 public:
  RunContext(const Config& cfg, RunReport& rep) : cfg(cfg), rep_(rep) {
    rep_.experiment = cfg.get("experiment", "name");
    rep_.config_hash = config_hash(cfg);
    rep_.seed = cfg.get_size("experiment", "seed", 1);
    out_ = cfg.get("experiment", "output", "out/" + rep_.experiment);
    threads = static_cast<unsigned>(cfg.get_size("budget", "threads", 1));
    if (threads == 0) throw ConfigError("[budget] threads must be positive");
    std::filesystem::create_directories(out_);
  }

  const Config& cfg;
  unsigned threads = 1;

  std::uint64_t seed() const { return rep_.seed; }

  std::ofstream open(const std::string& name) {
    auto path = out_ / name;
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    os << "# experiment: " << rep_.experiment << "\n"
       << "# config_hash: " << rep_.config_hash << "\n"
       << "# seed: " << rep_.seed << "\n"
       << "# version: " << version << "\n";
    rep_.files.push_back(path);
    return os;
  }

  void write_curve(const std::string& name, const SweepCurve& c, const std::string& graph) {
    auto path = out_ / name;
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    write_curve_csv(os, c,
                    {{"experiment", rep_.experiment}, {"config_hash", rep_.config_hash},
                     {"seed", std::to_string(rep_.seed)}, {"graph", graph}});
    rep_.files.push_back(path);
  }

  void check(std::string name, bool ok, std::string detail) {
    rep_.checks.push_back({std::move(name), ok, std::move(detail)});
  }

  void write_summary() {
    auto os = open("summary.txt");
    for (const auto& c : rep_.checks)
      os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    os << (rep_.passed() ? "ALL CHECKS PASSED" : "SOME CHECKS FAILED") << "\n";
  }

 private:
  RunReport& rep_;
  std::filesystem::path out_;
};

inline TilingSpec tiling_from(const Config& c, const std::string& sec = "tiling") {
  TilingSpec t;
  try {
    t.family = parse_family(c.get(sec, "family"));
    t.boundary = parse_boundary(c.get(sec, "boundary", "torus"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("[" + sec + "] " + e.what());
  }
  t.size = c.get_size(sec, "size", 0);
  t.size2 = c.get_size(sec, "size2", 0);
  t.p = static_cast<int>(c.get_size(sec, "p", 0));
  t.q = static_cast<int>(c.get_size(sec, "q", 0));
  t.degree = static_cast<int>(c.get_size(sec, "degree", 3));
  return t;
}

inline std::size_t positive(const Config& c, const std::string& sec, const std::string& key,
                            std::size_t fallback = npos) {
  auto v = c.get_size(sec, key, fallback);
  if (v == 0) throw ConfigError("[" + sec + "] " + key + " must be positive");
  return v;
}

inline std::string threshold_row(const std::string& graph, const ThresholdEstimate& e) {
  return graph + "," + fmt(e.pc) + "," + fmt(e.half_width) + "," + to_string(e.method) + "," + join(e.sizes) +
         "," + std::to_string(e.total_trials);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sum rule.

struct SumRuleResult {
  ThresholdEstimate g1, g2;
  double sum = 0;
  double tolerance = 0;
  bool passed = false;
};

struct Budget {
  std::vector<std::size_t> sizes;
  std::size_t trials = 0;
  unsigned threads = 1;
  std::uint64_t seed = 1;
  double tolerance = 0.015;
};

/// Passes iff |p̂c(G1) + p̂c(G2) − 1| ≤ tolerance + both half-widths.
inline SumRuleResult check_sum_rule(const GraphRecipe& g1, const GraphRecipe& g2, const Budget& b,
                                    const std::vector<double>& report_grid = {}) {
  PcOptions opt;
  opt.threads = b.threads;
  opt.report_grid = report_grid;
  SumRuleResult r;
  r.g1 = estimate_pc(g1, b.sizes, b.trials, b.seed, opt);
  r.g2 = estimate_pc(g2, b.sizes, b.trials, b.seed, opt);
  r.sum = r.g1.pc + r.g2.pc;
  r.tolerance = b.tolerance;
  r.passed = std::abs(r.sum - 1) <= b.tolerance + r.g1.half_width + r.g2.half_width;
  return r;
}

/// Recipes of the two graphs of a matching pair. "hatted": Ĝ1 with Φ1 open
/// and Ĝ2 with Φ2 open; "diagonal": G1 and G2 with their diagonals.
inline std::pair<GraphRecipe, GraphRecipe> pair_recipes(const TilingSpec& t, PartitionStrategy s,
                                                        const std::string& mask, const std::string& graphs) {
  GraphRecipe a{t, "ghat1", s, mask}, b{t, "ghat2", s, mask};
  if (graphs == "diagonal") {
    a.graph = "g1";
    b.graph = "g2";
  } else if (graphs == "hatted") {
    a.sites = SiteState::open;
    b.sites = SiteState::open;
  } else {
    throw ConfigError("[options] graphs must be hatted or diagonal");
  }
  return {a, b};
}

namespace detail {

inline void run_sum_rule(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const auto t = tiling_from(c);
  Budget b;
  b.sizes = c.get_sizes("budget", "sizes");
  b.trials = positive(c, "budget", "trials");
  b.threads = ctx.threads;
  b.seed = ctx.seed();
  b.tolerance = c.get_double("tolerance", "sum", 0.015);
  auto strat = parse_partition_strategy(c.get("partition", "strategy", "all_f1"));
  auto mask = c.get("partition", "mask", "100/010/001");
  auto [r1, r2] = pair_recipes(t, strat, mask, c.get("options", "graphs", "hatted"));
  auto res = check_sum_rule(r1, r2, b, parse_pgrid("0:1:0.005"));
  {
    auto os = ctx.open("thresholds.csv");
    os << "graph,pc,half_width,method,sizes,trials\n";
    os << threshold_row("G1", res.g1) << "\n" << threshold_row("G2", res.g2) << "\n";
    os << "sum," << fmt(res.sum) << "," << fmt(res.g1.half_width + res.g2.half_width) << ",,,\n";
  }
  for (const auto& [side, est] : {std::pair{"G1", &res.g1}, {"G2", &res.g2}})
    for (const auto& [size, curve] : est->curves)
      ctx.write_curve(std::string("wrap_") + side + "_L" + std::to_string(size) + ".csv", curve,
                      side == std::string("G1") ? r1.describe() : r2.describe());
  ctx.check("sum rule", res.passed,
            "pc(G1) = " + fmt(res.g1.pc, 4) + " ± " + fmt(res.g1.half_width, 4) + ", pc(G2) = " + fmt(res.g2.pc, 4) +
                " ± " + fmt(res.g2.half_width, 4) + ", sum = " + fmt(res.sum, 4) + " (tolerance " +
                fmt(res.tolerance, 3) + " + half-widths)");
}

inline void run_triangulation_identity(RunContext& ctx) {
  const auto& c = ctx.cfg;
  auto t = tiling_from(c);
  if (t.family != Family::triangular) throw ConfigError("TRIANGULATION_IDENTITY needs family = triangular");
  {
    auto os = ctx.open("identity.csv");
    os << "size,vertices,edges,star_edges,equal\n";
    bool all = true;
    for (auto l : c.get_sizes("budget", "identity_sizes")) {
      t.size = l;
      auto m = std::make_shared<const CombinatorialMap>(generate(t));
      auto g = as_graph(m), star = matching_graph(m);
      bool eq = adjacency_pairs(g) == adjacency_pairs(star) && edge_keys(g) == edge_keys(star);
      all = all && eq;
      os << l << "," << m->vertex_count() << "," << g.edge_count() << "," << star.edge_count() << "," << eq << "\n";
    }
    ctx.check("matching graph equals the triangulation", all, "sizes " + join(c.get_sizes("budget", "identity_sizes"), ","));
  }
  const std::size_t trials = c.get_size("budget", "trials", 0);
  if (trials == 0) return;
  PcOptions opt;
  opt.threads = ctx.threads;
  opt.report_grid = parse_pgrid("0:1:0.005");
  const double tol = c.get_double("tolerance", "pc", 0.005);
  auto est = estimate_pc(GraphRecipe{t}, c.get_sizes("budget", "sizes"), trials, ctx.seed(), opt);
  {
    auto os = ctx.open("thresholds.csv");
    os << "graph,pc,half_width,method,sizes,trials\n" << threshold_row("G", est) << "\n";
  }
  for (const auto& [size, curve] : est.curves)
    ctx.write_curve("wrap_G_L" + std::to_string(size) + ".csv", curve, t.describe());
  ctx.check("single threshold at one half", std::abs(est.pc - 0.5) <= tol,
            "pc = " + fmt(est.pc, 4) + " ± " + fmt(est.half_width, 4) + " (tolerance " + fmt(tol, 3) + ")");
}

inline void run_duality_exhaustive(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const auto t = tiling_from(c);
  auto m = std::make_shared<const CombinatorialMap>(generate(t));
  const std::size_t n = m->vertex_count();
  const std::size_t limit = c.get_size("budget", "max_vertices", 24);
  if (n > limit) throw ConfigError("patch has " + std::to_string(n) + " vertices; exhaustive limit is " + std::to_string(limit));
  auto os = ctx.open("duality.csv");
  os << "partition,configurations,violations,bond_violations,mean_open_clusters,mean_closed_clusters,mean_faces,empty_faces\n";
  for (const auto& name : c.get_list("partition", "strategies")) {
    PartitionOptions opt;
    opt.mask = c.get("partition", "mask", opt.mask);
    DualityContext dc(m, make_partition(*m, parse_partition_strategy(name), opt));
    const auto& g = dc.g1hat();
    std::size_t bad = 0, bond_bad = 0, sum_open = 0, sum_closed = 0, sum_regions = 0, sum_empty = 0;
    std::string first;
    std::vector<std::uint8_t> omega(n);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      for (std::size_t i = 0; i < n; ++i) omega[i] = (mask >> i) & 1;
      auto rep = correspondence_check(dc, omega);
      if (!rep.ok()) {
        if (!bad) first = rep.witnesses.front();
        ++bad;
      }
      auto w = extend(g, omega);
      auto beta = bond_from_sites(dc, w);
      auto plus = dual_bond_config(beta);
      for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(e);
        const int expect = w.state[ed.u] * w.state[ed.v];
        if (beta.state[e] != expect || beta.state[e] + plus.state[e] != 1) ++bond_bad;
      }
      sum_open += rep.n_site;
      sum_closed += rep.n_closed;
      sum_regions += rep.regions;
      sum_empty += rep.empty_regions;
    }
    const double tot = static_cast<double>(total);
    os << name << "," << total << "," << bad << "," << bond_bad << "," << fmt(sum_open / tot) << ","
       << fmt(sum_closed / tot) << "," << fmt(sum_regions / tot) << "," << sum_empty << "\n";
    ctx.check("face/cluster correspondence (" + name + ")", bad == 0,
              std::to_string(bad) + " violations in " + std::to_string(total) + " configurations" +
                  (bad ? "; first: " + first : ""));
    ctx.check("bond rule (" + name + ")", bond_bad == 0, std::to_string(bond_bad) + " edge mismatches");
  }
  if (c.has("probe", "trials")) {
    // the probe needs room for an edge far from another, so it runs on a larger copy
    auto big_spec = t;
    big_spec.size = std::max<std::size_t>(t.size, 8);
    big_spec.size2 = 0;
    auto big = std::make_shared<const CombinatorialMap>(generate(big_spec));
    auto h1 = hatted_graphs(big, make_partition(*big, parse_partition_strategy(c.get_list("partition", "strategies").front()))).first;
    auto r = one_dependence_probe(h1, c.get_double("probe", "p", 0.5), positive(c, "probe", "trials"), ctx.seed());
    auto ps = ctx.open("one_dependence.csv");
    ps << "quantity,measured,expected,tolerance\n"
       << "edge_marginal," << fmt(r.marginal) << "," << fmt(r.marginal_expected) << "," << fmt(5 * r.stderr_marginal) << "\n"
       << "adjacent_joint," << fmt(r.adjacent) << "," << fmt(r.adjacent_expected) << "," << fmt(5 * r.stderr_adjacent) << "\n"
       << "disjoint_correlation," << fmt(r.disjoint_corr) << ",0," << fmt(r.disjoint_tolerance) << "\n";
    ctx.check("one-dependence of the bond configuration", r.ok(),
              "disjoint-edge correlation " + fmt(r.disjoint_corr, 4) + " (|·| < " + fmt(r.disjoint_tolerance, 4) + ")");
  }
  if (c.has("blocking", "patch")) {
    TilingSpec bs{Family::square, positive(c, "blocking", "patch")};
    bs.boundary = Boundary::free_patch;
    auto bm = std::make_shared<const CombinatorialMap>(generate(bs));
    const std::size_t radius = positive(c, "blocking", "radius", 1);
    const std::size_t root = std::stoul(bm->meta("root"));
    auto dist = bfs_distances(*bm, root);
    std::vector<std::size_t> outside;
    for (std::size_t v = 0; v < bm->vertex_count(); ++v)
      if (dist[v] > radius) outside.push_back(v);
    if (outside.size() > limit) throw ConfigError("blocking patch too large for exhaustive enumeration");
    auto bo = ctx.open("blocking.csv");
    bo << "partition,configurations,blocked,inconsistent\n";
    for (const auto& name : c.get_list("partition", "strategies")) {
      BlockingContext bc(bm, make_partition(*bm, parse_partition_strategy(name)), radius);
      std::vector<std::uint8_t> omega(bm->vertex_count(), 0);
      std::size_t blocked = 0, bad = 0;
      const std::uint64_t total = std::uint64_t{1} << outside.size();
      for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (std::size_t i = 0; i < outside.size(); ++i) omega[outside[i]] = (mask >> i) & 1;
        auto r = bc.check(omega);
        blocked += r.blocked;
        bad += !r.consistent();
      }
      bo << name << "," << total << "," << blocked << "," << bad << "\n";
      ctx.check("open circuit iff no closed partner path (" + name + ")", bad == 0,
                std::to_string(bad) + " inconsistent of " + std::to_string(total));
    }
  }
}

inline void run_hyperbolic_nonuniqueness(RunContext& ctx) {
  const auto& c = ctx.cfg;
  auto t = tiling_from(c);
  if (t.family != Family::hyperbolic) throw ConfigError("HYPERBOLIC_NONUNIQUENESS needs family = hyperbolic");
  t.boundary = Boundary::free_patch;
  const double p = c.get_double("budget", "p", 0.5);
  const auto radii = c.get_sizes("budget", "radii");
  const std::size_t trials = positive(c, "budget", "trials");
  const double min_count = c.get_double("tolerance", "min_count", 1.5);
  EngineOptions eo;
  eo.threads = ctx.threads;
  std::vector<double> means;
  {
    auto os = ctx.open("boundary_clusters.csv");
    os << "radius,inner_radius,p,mean,stderr,trials\n";
    for (auto r : radii) {
      t.size = r;
      auto g = as_graph(generate(t));
      auto pt = boundary_cluster_count(g, p, trials, stream_key(ctx.seed(), r), eo);
      means.push_back(pt.mean);
      os << r << "," << r / 2 << "," << fmt(p) << "," << fmt(pt.mean) << "," << fmt(pt.stderr_) << "," << trials << "\n";
    }
  }
  bool mono = true;
  for (std::size_t i = 1; i < means.size(); ++i) mono = mono && means[i] > means[i - 1];
  std::string list;
  for (std::size_t i = 0; i < means.size(); ++i) list += (i ? ", " : "") + fmt(means[i], 3);
  ctx.check("many boundary clusters at the largest radius", means.back() > min_count,
            "mean " + fmt(means.back(), 3) + " > " + fmt(min_count, 2));
  ctx.check("boundary-cluster count increases with radius", mono, "means " + list);

  if (c.has("threshold", "radii")) {
    PcOptions opt;
    opt.threads = ctx.threads;
    auto pr = c.get_sizes("threshold", "radii");
    t.size = *std::max_element(pr.begin(), pr.end());
    auto est = estimate_pc(GraphRecipe{t}, pr, positive(c, "threshold", "trials"), ctx.seed(), opt);
    auto os = ctx.open("thresholds.csv");
    os << "graph,pc,half_width,method,sizes,trials\n" << threshold_row("G", est) << "\n";
    ctx.check("threshold below one half", est.pc < 0.5 - est.half_width,
              "pc = " + fmt(est.pc, 4) + " ± " + fmt(est.half_width, 4));
  }

  if (c.has("structure", "radii")) {
    auto sr = c.get_sizes("structure", "radii");
    t.size = *std::max_element(sr.begin(), sr.end()) + 1;
    auto h = generate(t);
    auto sq = generate({Family::square, 4 * t.size + 4});
    auto os = ctx.open("edge_boundary_ratio.csv");
    os << "radius,hyperbolic_edges,hyperbolic_boundary,hyperbolic_ratio,square_edges,square_boundary,square_ratio\n";
    bool bounded = true, growing = true;
    double prev = 0;
    for (auto r : sr) {
      auto hb = ball(h, {0, r});
      auto sb = ball(sq, {0, r});
      double hr = static_cast<double>(hb.map.edge_count()) / hb.boundary.size();
      double sqr = static_cast<double>(sb.map.edge_count()) / sb.boundary.size();
      bounded = bounded && hr < 10;
      growing = growing && sqr > prev;
      prev = sqr;
      os << r << "," << hb.map.edge_count() << "," << hb.boundary.size() << "," << fmt(hr) << ","
         << sb.map.edge_count() << "," << sb.boundary.size() << "," << fmt(sqr) << "\n";
    }
    ctx.check("edge-to-boundary ratio bounded on the hyperbolic side, growing on the square side",
              bounded && growing, std::string(bounded ? "bounded" : "unbounded") + ", " + (growing ? "growing" : "not growing"));
  }
}

inline void run_ends_sanity(RunContext& ctx) {
  const auto& c = ctx.cfg;
  EngineOptions eo;
  eo.threads = ctx.threads;
  if (c.sections.count("ladder")) {
    TilingSpec l{Family::ladder, positive(c, "ladder", "length")};
    l.boundary = Boundary::free_patch;
    const double p = c.get_double("ladder", "p");
    const std::size_t trials = positive(c, "ladder", "trials");
    const double need = c.get_double("ladder", "min_nonspanning", 0.99);
    auto pt = spanning_fraction(as_graph(generate(l)), p, trials, stream_key(ctx.seed(), 1), eo);
    auto os = ctx.open("ladder.csv");
    os << "length,p,spanning_fraction,stderr,trials\n"
       << l.size << "," << fmt(p) << "," << fmt(pt.mean) << "," << fmt(pt.stderr_) << "," << trials << "\n";
    ctx.check("two-ended ladder rarely spans", 1 - pt.mean >= need,
              "non-spanning fraction " + fmt(1 - pt.mean, 4) + " (need ≥ " + fmt(need, 3) + ")");
  }
  if (c.sections.count("tree")) {
    TilingSpec tr{Family::tree, positive(c, "tree", "depth")};
    tr.boundary = Boundary::free_patch;
    tr.degree = static_cast<int>(c.get_size("tree", "degree", 3));
    PcOptions opt;
    opt.threads = ctx.threads;
    const double tol = c.get_double("tree", "tolerance", 0.02);
    const double expect = 1.0 / (tr.degree - 1);
    auto est = estimate_pc(GraphRecipe{tr}, c.get_sizes("tree", "radii"), positive(c, "tree", "trials"), ctx.seed(), opt);
    auto os = ctx.open("tree.csv");
    os << "graph,pc,half_width,method,sizes,trials\n" << threshold_row("tree", est) << "\n";
    ctx.check("tree threshold at the branching value", std::abs(est.pc - expect) <= tol,
              "pc = " + fmt(est.pc, 4) + " ± " + fmt(est.half_width, 4) + " vs " + fmt(expect, 4) + " ± " + fmt(tol, 3));
    if (c.has("tree", "uniqueness_p")) {
      const double up = c.get_double("tree", "uniqueness_p");
      auto u = uniqueness_fraction(GraphRecipe{tr}, up, positive(c, "tree", "trials"), {tr.size}, ctx.seed(), eo);
      auto us = ctx.open("tree_uniqueness.csv");
      us << "depth,p,uniqueness_fraction,stderr,conditioned_trials,trials\n"
         << tr.size << "," << fmt(up) << "," << fmt(u[0].fraction) << "," << fmt(u[0].stderr_) << ","
         << u[0].conditioned << "," << u[0].trials << "\n";
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Registry.

struct ExperimentInfo {
  std::string name;
  std::string summary;
  std::vector<std::string> claims;  // relations the experiment checks
  std::function<void(detail::RunContext&)> body;
};

inline const std::vector<ExperimentInfo>& registry() {
  static const std::vector<ExperimentInfo> r{
      {"SUM_RULE", "thresholds of a matching pair add up to one",
       {"sum rule for matching pairs", "sum rule for a graph and its matching graph"},
       detail::run_sum_rule},
      {"TRIANGULATION_IDENTITY", "a triangulation is its own matching graph, with threshold one half",
       {"triangulation is self-matching", "triangular threshold is one half"},
       detail::run_triangulation_identity},
      {"DUALITY_EXHAUSTIVE", "site-to-bond transformation and cluster correspondences over every configuration",
       {"bond rule and planar dual rule", "face/cluster correspondence", "cluster count identities",
        "one-dependence of the bond configuration", "blocking circuits"},
       detail::run_duality_exhaustive},
      {"HYPERBOLIC_NONUNIQUENESS", "many boundary clusters and a low threshold on a hyperbolic triangulation",
       {"non-uniqueness in the hyperbolic plane", "threshold below one half for degree at least seven",
        "edge-to-boundary ratio for degree seven"},
       detail::run_hyperbolic_nonuniqueness},
      {"ENDS_SANITY", "two-ended and tree-like families",
       {"two-ended graphs have threshold one", "trees have infinitely many ends"},
       detail::run_ends_sanity},
  };
  return r;
}

inline const ExperimentInfo& find_experiment(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return e;
  throw ConfigError("unknown experiment '" + name + "'");
}

/// Runs the experiment a config names; the report lists every check.
inline RunReport run(const Config& cfg) {
  const auto& info = find_experiment(cfg.get("experiment", "name"));
  RunReport rep;
  detail::RunContext ctx(cfg, rep);
  try {
    info.body(ctx);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw Error(info.name + ": " + e.what());
  }
  ctx.write_summary();
  return rep;
}

}  // namespace percoplane
