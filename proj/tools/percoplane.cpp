// percoplane command-line front end.
#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "percoplane/percoplane.hpp"

using namespace percoplane;

namespace {

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// "-" means stdout
template <class Fn>
void emit(const std::string& path, Fn fn) {
  if (path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  fn(os);
}

bool is_augmented(const std::string& text) { return text.find("\naugmented ") != std::string::npos; }

std::shared_ptr<const CombinatorialMap> load_map(const std::string& path) {
  auto text = slurp(path);
  if (is_augmented(text)) return std::make_shared<const CombinatorialMap>(augmented_from_text(text).base());
  return std::make_shared<const CombinatorialMap>(map_from_text(text));
}

// A partition argument is either a strategy name or a partition file.
FacePartition load_partition(const CombinatorialMap& m, const std::string& arg, const std::string& mask) {
  if (std::filesystem::is_regular_file(arg)) {
    std::ifstream in(arg);
    return read_partition(in, m);
  }
  PartitionOptions opt;
  opt.mask = mask;
  return make_partition(m, parse_partition_strategy(arg), opt);
}

struct TilingArgs {
  std::string family = "square", boundary = "torus";
  std::size_t size = 0, size2 = 0, radius = 0;
  int p = 0, q = 0, degree = 3;

  void add(CLI::App* c, bool with_size = true) {
    c->add_option("--family", family, "square|triangular|hexagonal|hyperbolic|tree|ladder")->required();
    if (with_size) c->add_option("--size", size, "side length, depth or rungs");
    c->add_option("--size2", size2, "second torus side");
    c->add_option("--radius", radius, "radius of a hyperbolic patch (alias of --size)");
    c->add_option("--p", p, "face size of a hyperbolic tiling");
    c->add_option("--q", q, "vertex degree of a hyperbolic tiling");
    c->add_option("--degree", degree, "tree degree");
    c->add_option("--boundary", boundary, "torus|free");
  }

  TilingSpec spec() const {
    TilingSpec t;
    t.family = parse_family(family);
    t.boundary = parse_boundary(boundary);
    if (t.family == Family::hyperbolic || t.family == Family::tree || t.family == Family::ladder)
      t.boundary = Boundary::free_patch;
    t.size = radius ? radius : size;
    t.size2 = size2;
    t.p = p;
    t.q = q;
    t.degree = degree;
    return t;
  }
};

int cmd_gen(const TilingArgs& ta, const std::string& out) {
  auto m = generate(ta.spec());
  emit(out, [&](std::ostream& os) { write_map(os, m); });
  std::cerr << ta.spec().describe() << ": " << m.vertex_count() << " vertices, " << m.edge_count() << " edges\n";
  return 0;
}

int cmd_match(const std::string& in, const std::string& partition, const std::string& mask, const std::string& kind,
              const std::string& sites, const std::string& out) {
  auto m = load_map(in);
  AugmentedGraph g;
  if (kind == "g") {
    g = as_graph(m);
  } else if (kind == "star") {
    g = matching_graph(m);
  } else if (kind == "mhat") {
    g = facial_triangulation(m);
  } else {
    auto part = load_partition(*m, partition, mask);
    if (kind == "g1" || kind == "g2") {
      auto pr = matching_pair(m, part);
      g = kind == "g1" ? pr.first : pr.second;
    } else if (kind == "ghat1" || kind == "ghat2") {
      auto pr = hatted_graphs(m, part);
      g = (kind == "ghat1" ? pr.first : pr.second).with_site_state(parse_site_state(sites));
    } else {
      throw Error("unknown graph '" + kind + "'");
    }
  }
  emit(out, [&](std::ostream& os) { write_augmented(os, g); });
  return 0;
}

int cmd_duality(const std::string& in, const std::string& partition, const std::string& mask,
                std::size_t exhaustive_max, std::size_t trials, std::uint64_t seed, const std::string& out) {
  auto m = load_map(in);
  DualityContext ctx(m, load_partition(*m, partition, mask));
  const auto& g = ctx.g1hat();
  const std::size_t n = m->vertex_count();
  const bool exhaustive = n <= exhaustive_max && n < 63;
  const std::uint64_t total = exhaustive ? std::uint64_t{1} << n : trials;
  if (total == 0) throw Error("--trials must be positive when the patch exceeds --exhaustive-max");
  std::size_t bad = 0, bond_bad = 0;
  std::string first;
  std::vector<std::uint8_t> omega(n);
  for (std::uint64_t i = 0; i < total; ++i) {
    if (exhaustive) {
      for (std::size_t v = 0; v < n; ++v) omega[v] = (i >> v) & 1;
    } else {
      auto s = sample_sites(g, 0.5, seed, i);
      std::copy(s.state.begin(), s.state.begin() + static_cast<std::ptrdiff_t>(n), omega.begin());
    }
    auto rep = correspondence_check(ctx, omega);
    if (!rep.ok() && bad++ == 0) first = rep.witnesses.front();
    auto w = extend(g, omega);
    auto beta = bond_from_sites(ctx, w);
    auto plus = dual_bond_config(beta);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const auto& ed = g.edge(e);
      if (beta.state[e] != (w.state[ed.u] & w.state[ed.v]) || beta.state[e] + plus.state[e] != 1) ++bond_bad;
    }
  }
  emit(out, [&](std::ostream& os) {
    os << "# map: " << m->meta("family", "unknown") << "\n# partition: " << partition << "\n# seed: " << seed
       << "\n# version: " << version << "\n"
       << "mode,configurations,violations,bond_violations\n"
       << (exhaustive ? "exhaustive" : "random") << "," << total << "," << bad << "," << bond_bad << "\n";
  });
  std::cerr << (exhaustive ? "exhaustive" : "random") << " over " << total << " configurations: " << bad
            << " correspondence violations, " << bond_bad << " bond mismatches\n";
  if (bad) std::cerr << "first violation: " << first << "\n";
  return bad || bond_bad ? 1 : 0;
}

int cmd_sweep(const std::string& in, const std::string& observable, const std::string& pgrid, std::size_t trials,
              std::uint64_t seed, unsigned threads, std::size_t shell, const std::string& out) {
  auto text = slurp(in);
  AugmentedGraph g = is_augmented(text) ? augmented_from_text(text)
                                        : as_graph(std::make_shared<const CombinatorialMap>(map_from_text(text)));
  EngineOptions opt;
  opt.threads = threads;
  opt.probe.shell = shell;
  auto curve = newman_ziff_sweep(g, trials, parse_observable(observable), parse_pgrid(pgrid), seed, opt);
  emit(out, [&](std::ostream& os) {
    write_curve_csv(os, curve, {{"graph", g.kind() + " on " + g.base().meta("family", "unknown")},
                                {"vertices", std::to_string(g.vertex_count())},
                                {"seed", std::to_string(seed)}});
  });
  return 0;
}

int cmd_pc(const TilingArgs& ta, const std::string& graph, const std::string& partition, const std::string& mask,
           const std::string& sites, const std::vector<std::size_t>& sizes, std::size_t trials, std::uint64_t seed,
           unsigned threads, const std::string& out) {
  GraphRecipe r;
  r.tiling = ta.spec();
  if (!sizes.empty()) r.tiling.size = *std::max_element(sizes.begin(), sizes.end());
  r.graph = graph;
  r.partition = parse_partition_strategy(partition);
  r.mask = mask;
  r.sites = parse_site_state(sites);
  PcOptions opt;
  opt.threads = threads;
  auto e = estimate_pc(r, sizes, trials, seed, opt);
  std::ostringstream sz;
  for (std::size_t i = 0; i < e.sizes.size(); ++i) sz << (i ? ";" : "") << e.sizes[i];
  emit(out, [&](std::ostream& os) {
    os << "# recipe: " << r.describe() << "\n# seed: " << seed << "\n# version: " << version << "\n"
       << "pc,half_width,method,sizes,total_trials,failed_resamples\n"
       << format_double(e.pc) << "," << format_double(e.half_width) << "," << to_string(e.method) << "," << sz.str()
       << "," << e.total_trials << "," << e.failed_resamples << "\n";
  });
  return 0;
}

int cmd_run(const std::string& path, unsigned threads) {
  auto cfg = load_config(path);
  if (threads) cfg.sections["budget"]["threads"] = std::to_string(threads);
  auto rep = run(cfg);
  for (const auto& c : rep.checks) std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  std::cout << rep.experiment << " (config " << rep.config_hash << ", seed " << rep.seed << "): "
            << (rep.passed() ? "all checks passed" : "some checks failed") << "\n";
  return rep.passed() ? 0 : 1;
}

int cmd_list() {
  for (const auto& e : registry()) {
    std::cout << e.name << "  " << e.summary << "\n";
    for (const auto& c : e.claims) std::cout << "    - " << c << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planar site percolation: matching pairs, duality and thresholds"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);

  TilingArgs gen_t;
  std::string gen_out = "-";
  auto* gen = app.add_subcommand("gen", "generate a tiling patch in the map exchange format");
  gen_t.add(gen);
  gen->add_option("--out", gen_out, "output file, - for stdout");

  std::string in, partition = "all_f1", mask = "100/010/001", kind = "star", sites = "by_class", out = "-";
  auto* match = app.add_subcommand("match", "build a matching graph, matching pair or facial-site graph");
  match->add_option("--in", in, "map file")->required();
  match->add_option("--partition", partition, "all_f1|all_f2|checkerboard|periodic or a partition file");
  match->add_option("--mask", mask, "cell pattern of the periodic partition");
  match->add_option("--emit", kind, "g|star|g1|g2|ghat1|ghat2|mhat");
  match->add_option("--sites", sites, "facial-site states of hatted graphs: by_class|open|closed");
  match->add_option("--out", out, "output file, - for stdout");

  std::size_t exhaustive_max = 12, trials = 1000;
  std::uint64_t seed = 1;
  auto* dual = app.add_subcommand("duality-check", "check the face/cluster correspondence and the bond rule");
  dual->add_option("--in", in, "map file")->required();
  dual->add_option("--partition", partition, "strategy or partition file");
  dual->add_option("--mask", mask, "cell pattern of the periodic partition");
  dual->add_option("--exhaustive-max", exhaustive_max, "enumerate every configuration up to this many vertices");
  dual->add_option("--trials", trials, "random configurations for larger patches");
  dual->add_option("--seed", seed);
  dual->add_option("--out", out, "report CSV, - for stdout");

  std::string observable = "wrap_probability", pgrid = "0:1:0.01";
  unsigned threads = 1;
  std::size_t shell = 0;
  auto* sweep = app.add_subcommand("sweep", "Newman-Ziff sweep of an observable over a p-grid");
  sweep->add_option("--in", in, "map or augmented-graph file")->required();
  sweep->add_option("--observable", observable, "wrap_probability|cross_probability|max_cluster_fraction|"
                                                "boundary_cluster_count|uniqueness_fraction|root_shell_mass");
  sweep->add_option("--pgrid", pgrid, "a:b:step");
  sweep->add_option("--trials", trials);
  sweep->add_option("--seed", seed);
  sweep->add_option("--threads", threads)->check(CLI::PositiveNumber);
  sweep->add_option("--shell", shell, "shell radius for root_shell_mass");
  sweep->add_option("--out", out, "curve CSV, - for stdout");

  TilingArgs pc_t;
  std::vector<std::size_t> sizes{32, 64};
  std::string graph = "g", pc_sites = "by_class";
  auto* pc = app.add_subcommand("pc", "estimate a critical probability");
  pc_t.add(pc, false);
  pc->add_option("--graph", graph, "g|star|g1|g2|ghat1|ghat2|mhat");
  pc->add_option("--partition", partition, "partition strategy for the pair graphs");
  pc->add_option("--mask", mask, "cell pattern of the periodic partition");
  pc->add_option("--sites", pc_sites, "facial-site states of hatted graphs");
  pc->add_option("--sizes", sizes, "torus sides, or radii on a rooted patch")->delimiter(',');
  pc->add_option("--trials", trials);
  pc->add_option("--seed", seed);
  pc->add_option("--threads", threads)->check(CLI::PositiveNumber);
  pc->add_option("--out", out, "result CSV, - for stdout");

  std::string config;
  unsigned run_threads = 0;
  auto* runc = app.add_subcommand("run", "run a named experiment from a config file");
  runc->add_option("--config", config)->required();
  runc->add_option("--threads", run_threads, "override [budget] threads");

  auto* list = app.add_subcommand("list-experiments", "list the named experiments and what they check");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_gen(gen_t, gen_out);
    if (*match) return cmd_match(in, partition, mask, kind, sites, out);
    if (*dual) return cmd_duality(in, partition, mask, exhaustive_max, trials, seed, out);
    if (*sweep) return cmd_sweep(in, observable, pgrid, trials, seed, threads, shell, out);
    if (*pc) return cmd_pc(pc_t, graph, partition, mask, pc_sites, sizes, trials, seed, threads, out);
    if (*runc) return cmd_run(config, run_threads);
    if (*list) return cmd_list();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
