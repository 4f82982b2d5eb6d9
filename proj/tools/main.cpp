#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "cli_support.hpp"
#include "hpmetric/clustering.hpp"
#include "hpmetric/errors.hpp"
#include "hpmetric/generators.hpp"
#include "hpmetric/geometry_report.hpp"
#include "hpmetric/hitting.hpp"
#include "hpmetric/io.hpp"
#include "hpmetric/metric.hpp"
#include "hpmetric/quotient.hpp"
#include "hpmetric/spectral.hpp"
#include "hpmetric/stationary.hpp"
#include "hpmetric/verify.hpp"

namespace hpm::cli {
namespace {

struct Globals {
  unsigned threads_flag = 0;
  unsigned threads() const { return effective_threads(threads_flag); }
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--in", in.path, "Input graph: CSV edge list, Matrix Market, or dense CSV ('-' for stdin)");
  cmd->add_option("--format", in.format, "auto|csv|mtx|dense")->check(CLI::IsMember({"auto", "csv", "mtx", "dense"}));
  cmd->add_flag("--largest-scc", in.largest_scc, "Restrict to the largest strongly connected component");
  cmd->add_flag("--drop-self-loops", in.drop_self_loops, "Remove i->i edges before normalizing");
}

void record_input(RunContext& ctx, const InputOptions& in, const LoadedChain& loaded) {
  ctx.parameters()["input"] = {{"path", in.path},
                               {"format", in.format},
                               {"largest_scc", in.largest_scc},
                               {"drop_self_loops", in.drop_self_loops},
                               {"nodes_read", loaded.original_size},
                               {"nodes_used", loaded.graph.size()}};
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

// ---- model flags shared by generate and verify

struct ModelOptions {
  std::string model;
  std::size_t nb = 3, nc = 4, branches = 2;
  std::size_t n_er = 20, n_cycle = 8;
  double p = 0.5, w = 3.0;
  bool er_self_loops = false;
  std::size_t n = 300, k = 3;
  std::optional<double> p_in, p_out, rho, delta;
  std::string domain = "circle";
  double gamma = 1.0;
  std::uint64_t seed = 0;
};

void add_model_options(CLI::App* cmd, ModelOptions& m, bool required) {
  auto* opt = cmd->add_option("--model", m.model, "glued|er-cycle|planted|geometric")
                  ->check(CLI::IsMember({"glued", "er-cycle", "planted", "geometric"}));
  if (required) opt->required();
  cmd->add_option("--nb", m.nb, "glued: backbone length");
  cmd->add_option("--nc", m.nc, "glued: branch length");
  cmd->add_option("--C", m.branches, "glued: branch count");
  cmd->add_option("--n-er", m.n_er, "er-cycle: ER block size");
  cmd->add_option("--n-cycle", m.n_cycle, "er-cycle: cycle length");
  cmd->add_option("--p", m.p, "er-cycle: ER edge probability");
  cmd->add_option("--w", m.w, "er-cycle: weight of the cycle in-edges");
  cmd->add_flag("--er-self-loops", m.er_self_loops, "er-cycle: allow i->i edges in the ER block");
  cmd->add_option("--n", m.n, "planted/geometric: node count");
  cmd->add_option("--k", m.k, "planted: community count");
  cmd->add_option("--p-in", m.p_in, "planted: within-community probability");
  cmd->add_option("--p-out", m.p_out, "planted: cross-community probability");
  cmd->add_option("--rho", m.rho, "planted: mean density (with --delta)");
  cmd->add_option("--delta", m.delta, "planted: p_in - p_out (with --rho)");
  cmd->add_option("--domain", m.domain,
                  "geometric: flat-torus|torus-with-hole|H-domain|circle|sphere|torus-lattice");
  cmd->add_option("--gamma", m.gamma, "geometric: kernel scale");
  cmd->add_option("--seed", m.seed, "Random seed");
}

PlantedPartitionSpec planted_spec(const ModelOptions& m) {
  if (m.rho || m.delta) {
    if (!(m.rho && m.delta) || m.p_in || m.p_out) throw UsageError("give either --rho and --delta or --p-in and --p-out");
    return PlantedPartitionSpec::from_rho_delta(m.n, m.k, *m.rho, *m.delta);
  }
  PlantedPartitionSpec spec;
  spec.n = m.n;
  spec.k = m.k;
  if (m.p_in) spec.p_in = *m.p_in;
  if (m.p_out) spec.p_out = *m.p_out;
  return spec;
}

struct GeneratedModel {
  WeightedDigraph graph;
  std::vector<std::size_t> truth;
  std::optional<GeometricGraph> geometric;
  json params;
};

GeneratedModel generate_model(const ModelOptions& m) {
  GeneratedModel out;
  out.params["model"] = m.model;
  if (m.model == "glued") {
    out.graph = gen_glued_cycles({m.nb, m.nc, m.branches});
    out.params.update({{"nb", m.nb}, {"nc", m.nc}, {"C", m.branches}});
  } else if (m.model == "er-cycle") {
    ErCycleSpec spec{m.n_er, m.n_cycle, m.p, m.w, m.er_self_loops};
    out.graph = gen_er_cycle(spec, m.seed);
    out.params.update({{"n_er", m.n_er}, {"n_cycle", m.n_cycle}, {"p", m.p}, {"w", m.w},
                       {"er_self_loops", m.er_self_loops}});
    out.truth.assign(m.n_er, 0);
    out.truth.resize(m.n_er + m.n_cycle, 1);
  } else if (m.model == "planted") {
    const auto spec = planted_spec(m);
    auto planted = gen_planted_partition(spec, m.seed);
    out.graph = std::move(planted.graph);
    out.truth = std::move(planted.truth);
    out.params.update({{"n", spec.n}, {"k", spec.k}, {"p_in", spec.p_in}, {"p_out", spec.p_out},
                       {"rho", spec.rho()}, {"delta", spec.delta()}});
  } else if (m.model == "geometric") {
    GeometricGraphSpec spec{parse_geometric_domain(m.domain), m.n, m.gamma};
    auto geo = gen_geometric(spec, m.seed);
    out.graph = geo.graph;
    out.geometric = std::move(geo);
    out.params.update({{"domain", to_string(spec.domain)}, {"n", m.n}, {"gamma", m.gamma}});
  } else {
    throw UsageError("unknown model '" + m.model + "'");
  }
  return out;
}

// ---- subcommands

struct StationaryCmd {
  InputOptions in;
  std::string out = "-";
};

int run_stationary(const StationaryCmd& c, const Globals&) {
  RunContext ctx("stationary");
  const auto loaded = load_input(c.in);
  record_input(ctx, c.in, loaded);
  const auto p = to_chain(loaded);
  const auto phi = stationary_distribution(p);
  ctx.add_result("residual", phi.residual);
  ctx.write_file(c.out, [&](std::ostream& os) { io::write_vector_csv(os, phi.phi, p.labels(), "phi"); });
  ctx.finish();
  return 0;
}

struct HitprobCmd {
  InputOptions in;
  bool fast = false;
  bool reference = false;
  std::string out = "-";
  std::vector<std::string> mc;
  std::uint64_t walks = 100'000;
  std::uint64_t seed = 0;
};

int run_hitprob(const HitprobCmd& c, const Globals& g) {
  RunContext ctx("hitprob");
  ctx.set_threads(g.threads());
  const auto loaded = load_input(c.in);
  record_input(ctx, c.in, loaded);
  const auto p = to_chain(loaded);
  if (!c.mc.empty()) {
    const auto i = resolve_node(p.labels(), c.mc.at(0));
    const auto j = resolve_node(p.labels(), c.mc.at(1));
    ctx.set_seed(c.seed);
    const auto hit = simulate_hit_before_return(p, i, j, c.walks, c.seed, g.threads());
    const auto visits = simulate_visit_counts(p, i, j, c.walks, c.seed, g.threads());
    json report = {{"source", p.labels()[i]},
                   {"target", p.labels()[j]},
                   {"walks", c.walks},
                   {"seed", c.seed},
                   {"hit_before_return", {{"estimate", hit.mean}, {"std_error", hit.std_error}}},
                   {"visits_to_target", {{"mean", visits.mean}, {"std_error", visits.std_error}}}};
    ctx.parameters()["mc"] = {{"i", c.mc[0]}, {"j", c.mc[1]}, {"walks", c.walks}};
    ctx.write_file(c.out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
    ctx.finish();
    return 0;
  }
  if (c.fast && c.reference) throw UsageError("--fast and --reference are exclusive");
  HittingProbabilities q;
  if (c.reference) {
    q = hitting_reference_all(p, g.threads());
  } else {
    HittingOptions opts;
    opts.threads = g.threads();
    q = hitting_fast(p, opts);
    if (q.fallback_columns > 0 || q.full_fallback) {
      std::cerr << "warning: " << (q.full_fallback ? std::string("all columns") : std::to_string(q.fallback_columns) + " column(s)")
                << " used the direct solve\n";
    }
  }
  ctx.parameters()["method"] = c.reference ? "reference" : "fast";
  ctx.add_result("fallback_columns", q.fallback_columns);
  ctx.add_result("full_fallback", q.full_fallback);
  ctx.write_file(c.out, [&](std::ostream& os) { io::write_dense_csv(os, q.q, p.labels()); });
  ctx.finish();
  return 0;
}

struct MetricCmd {
  InputOptions in;
  double beta = 0.5;
  std::string out = "-";
  std::string similarity;
  double tol_deg = kDefaultDegeneracyTolerance;
};

int run_metric(const MetricCmd& c, const Globals& g) {
  RunContext ctx("metric");
  ctx.set_threads(g.threads());
  const auto loaded = load_input(c.in);
  record_input(ctx, c.in, loaded);
  const auto p = to_chain(loaded);
  const auto phi = stationary_distribution(p);
  HittingOptions opts;
  opts.threads = g.threads();
  const auto a = hp_similarity(hitting_fast(p, opts), phi, c.beta);
  const auto d = hp_distance(a, c.tol_deg);
  const auto axioms = verify_metric_axioms(d);
  ctx.parameters().update({{"beta", c.beta}, {"tol_deg", c.tol_deg}});
  ctx.add_result("asymmetry", a.asymmetry);
  ctx.add_result("is_pseudo", d.is_pseudo);
  ctx.add_result("axioms", {{"symmetry_ok", axioms.symmetry_ok},
                            {"triangle_ok", axioms.triangle_ok},
                            {"positivity_ok", axioms.positivity_ok},
                            {"worst_triangle_slack", axioms.worst_triangle_slack},
                            {"min_off_diagonal", axioms.min_off_diagonal},
                            {"exhaustive", axioms.exhaustive}});
  if (c.beta > 1.0 && !axioms.ok()) std::cerr << "warning: d^beta with beta > 1 violates the metric axioms here\n";
  ctx.write_file(c.out, [&](std::ostream& os) { io::write_dense_csv(os, d.d, p.labels()); });
  if (!c.similarity.empty()) {
    ctx.write_file(c.similarity, [&](std::ostream& os) { io::write_dense_csv(os, a.a, p.labels()); });
  }
  ctx.finish();
  if (c.out != "-") print_json(ctx.metadata()["results"]);
  return 0;
}

struct QuotientCmd {
  InputOptions in;
  std::string out = "-";
  std::string map;
  double tol_deg = kDefaultDegeneracyTolerance;
};

int run_quotient(const QuotientCmd& c, const Globals& g) {
  RunContext ctx("quotient");
  ctx.set_threads(g.threads());
  const auto loaded = load_input(c.in);
  record_input(ctx, c.in, loaded);
  const auto p = to_chain(loaded);
  const auto qa = analyze_quotient(p, c.tol_deg, g.threads());
  ctx.parameters()["tol_deg"] = c.tol_deg;
  json classes = json::array();
  for (const auto& cls : qa.ordered) {
    json members = json::array();
    for (auto v : cls.members) members.push_back(p.labels()[v]);
    classes.push_back(members);
  }
  const auto& b = qa.bounds;
  ctx.add_result("states", qa.quotient.p.size());
  ctx.add_result("degenerate_classes", classes);
  ctx.add_result("bounds", {{"ok", b.ok()},
                            {"pairs_checked", b.pairs_checked},
                            {"same_segment_pairs", b.same_segment_pairs},
                            {"cross_segment_pairs", b.cross_segment_pairs},
                            {"violations", b.violation_count},
                            {"worst_isometry_error", b.worst_isometry_error}});
  ctx.add_result("quotient_degenerate", qa.quotient_degeneracy.degenerate);
  ctx.write_file(c.out, [&](std::ostream& os) { io::write_dense_csv(os, qa.quotient.p.matrix(), qa.quotient.p.labels()); });
  if (!c.map.empty()) {
    ctx.write_file(c.map, [&](std::ostream& os) {
      os << "node,class\n";
      for (std::size_t v = 0; v < p.size(); ++v) {
        os << p.labels()[v] << ',' << qa.quotient.p.labels()[qa.quotient.class_map[v]] << '\n';
      }
    });
  }
  ctx.finish();
  if (c.out != "-") print_json(ctx.metadata()["results"]);
  return b.ok() && !qa.quotient_degeneracy.degenerate ? 0 : 1;
}

struct SymmetrizeCmd {
  InputOptions in;
  std::string method = "additive";
  std::optional<double> beta;
  std::string out = "-";
};

int run_symmetrize(const SymmetrizeCmd& c, const Globals& g) {
  RunContext ctx("symmetrize");
  ctx.set_threads(g.threads());
  const auto loaded = load_input(c.in);
  record_input(ctx, c.in, loaded);
  const auto p = to_chain(loaded);
  const auto op = symmetrize(p, stationary_distribution(p), parse_symmetrization(c.method), c.beta, g.threads());
  ctx.parameters()["method"] = c.method;
  ctx.parameters()["beta"] = c.beta ? json(*c.beta) : json(nullptr);
  ctx.write_file(c.out, [&](std::ostream& os) { io::write_dense_csv(os, op.m, p.labels()); });
  ctx.finish();
  return 0;
}

struct FiedlerCmd {
  InputOptions in;
  std::string method = "hp";
  std::optional<double> beta;
  std::string out = "-";
};

int run_fiedler(const FiedlerCmd& c, const Globals& g) {
  RunContext ctx("fiedler");
  ctx.set_threads(g.threads());
  const auto loaded = load_input(c.in);
  record_input(ctx, c.in, loaded);
  const auto p = to_chain(loaded);
  const auto op = symmetrize(p, stationary_distribution(p), parse_symmetrization(c.method), c.beta, g.threads());
  const auto f = fiedler_vector(op);
  if (f.small_gap) std::cerr << "warning: lambda2 and lambda3 coincide; the sign pattern depends on the basis\n";
  ctx.parameters()["method"] = c.method;
  ctx.parameters()["beta"] = c.beta ? json(*c.beta) : json(nullptr);
  ctx.add_result("lambda2", f.lambda2);
  ctx.add_result("lambda3", f.lambda3);
  ctx.add_result("small_gap", f.small_gap);
  ctx.write_file(c.out, [&](std::ostream& os) {
    os << "label,value,sign\n";
    for (std::size_t v = 0; v < p.size(); ++v) {
      os << p.labels()[v] << ',' << io::format_double(f.vector(static_cast<Eigen::Index>(v))) << ',' << f.signs[v]
         << '\n';
    }
  });
  ctx.finish();
  return 0;
}

struct GenerateCmd {
  ModelOptions model;
  std::string out = "-";
  std::string truth;
  std::string coords;
  std::string curves;
  std::string ref = "0";
};

Matrix chain_distance(const WeightedDigraph& graph, double beta, unsigned threads) {
  const auto p = row_normalize(graph);
  HittingOptions opts;
  opts.threads = threads;
  return hp_distance(hp_similarity(hitting_fast(p, opts), stationary_distribution(p), beta)).d;
}

int run_generate(const GenerateCmd& c, const Globals& g) {
  RunContext ctx("generate");
  ctx.set_threads(g.threads());
  ctx.set_seed(c.model.seed);
  auto gen = generate_model(c.model);
  ctx.parameters() = gen.params;
  const bool connected = is_strongly_connected(support_graph(gen.graph));
  ctx.add_result("nodes", gen.graph.size());
  ctx.add_result("edges", gen.graph.weights.nonZeros());
  ctx.add_result("strongly_connected", connected);
  if (!connected) std::cerr << "warning: generated graph is not strongly connected\n";
  ctx.write_file(c.out, [&](std::ostream& os) { io::write_edge_list_csv(os, gen.graph); });
  if (!c.truth.empty()) {
    if (gen.truth.empty()) throw UsageError("--truth is only available for planted and er-cycle models");
    ctx.write_file(c.truth, [&](std::ostream& os) {
      os << "label,community\n";
      for (std::size_t v = 0; v < gen.graph.size(); ++v) os << gen.graph.labels[v] << ',' << gen.truth[v] << '\n';
    });
  }
  if (!c.coords.empty() || !c.curves.empty()) {
    if (!gen.geometric) throw UsageError("--coords and --curves need the geometric model");
  }
  if (!c.coords.empty()) {
    const auto& x = gen.geometric->coords;
    ctx.write_file(c.coords, [&](std::ostream& os) {
      os << "label";
      for (Eigen::Index d = 0; d < x.cols(); ++d) os << ",x" << d + 1;
      os << '\n';
      for (Eigen::Index v = 0; v < x.rows(); ++v) {
        os << gen.graph.labels[static_cast<std::size_t>(v)];
        for (Eigen::Index d = 0; d < x.cols(); ++d) os << ',' << io::format_double(x(v, d));
        os << '\n';
      }
    });
  }
  if (!c.curves.empty()) {
    const auto ref = resolve_node(gen.graph.labels, c.ref);
    const auto curves = distance_curves(ref, chain_distance(gen.graph, 0.5, g.threads()),
                                        chain_distance(gen.graph, 1.0, g.threads()), gen.geometric->distances);
    ctx.parameters()["reference"] = gen.graph.labels[ref];
    ctx.add_result("spearman_d_half", curves.spearman_half);
    ctx.add_result("spearman_d_one", curves.spearman_one);
    ctx.write_file(c.curves, [&](std::ostream& os) {
      os << "rank,label,d_half,d_one,ambient\n";
      for (std::size_t t = 0; t < curves.order.size(); ++t) {
        const auto e = static_cast<Eigen::Index>(t);
        os << t << ',' << gen.graph.labels[curves.order[t]] << ',' << io::format_double(curves.d_half(e)) << ','
           << io::format_double(curves.d_one(e)) << ',' << io::format_double(curves.ambient(e)) << '\n';
      }
    });
  }
  ctx.finish();
  return 0;
}

std::vector<std::size_t> read_truth(const std::string& path, const std::vector<std::string>& labels) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::map<std::string, std::size_t> community_ids;
  std::map<std::string, std::size_t> by_label;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || (line_no == 1 && line.rfind("label,", 0) == 0)) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(line_no, "expected 'label,community'");
    const auto community = line.substr(comma + 1);
    const auto [it, inserted] = community_ids.try_emplace(community, community_ids.size());
    by_label[line.substr(0, comma)] = it->second;
  }
  std::vector<std::size_t> truth;
  for (const auto& label : labels) {
    const auto it = by_label.find(label);
    if (it == by_label.end()) throw DomainError("truth file has no community for node '" + label + "'");
    truth.push_back(it->second);
  }
  return truth;
}

struct ClusterCmd {
  InputOptions in;
  std::string method = "pca-kmeans-d12";
  std::size_t k = 3;
  std::size_t restarts = 5;
  std::uint64_t seed = 0;
  std::string truth;
  std::size_t trials = 4000;
  std::string out = "-";
};

int run_cluster(const ClusterCmd& c, const Globals& g) {
  RunContext ctx("cluster");
  ctx.set_threads(g.threads());
  ctx.set_seed(c.seed);
  const auto loaded = load_input(c.in);
  record_input(ctx, c.in, loaded);
  ClusterOptions opts;
  opts.k = c.k;
  opts.restarts = c.restarts;
  opts.seed = c.seed;
  opts.threads = g.threads();
  const auto labels = cluster_graph(loaded.graph, parse_cluster_method(c.method), opts);
  ctx.parameters().update({{"method", c.method}, {"k", c.k}, {"restarts", c.restarts}, {"trials", c.trials}});
  json report = {{"method", c.method}, {"k", c.k}, {"seed", c.seed}, {"nodes", loaded.graph.labels}, {"labels", labels}};
  report["accuracy"] = nullptr;
  report["p_value"] = nullptr;
  if (!c.truth.empty()) {
    const auto truth = read_truth(c.truth, loaded.graph.labels);
    const double acc = purity_accuracy(labels, truth);
    report["accuracy"] = acc;
    report["p_value"] = empirical_p_value(acc, truth, c.k, c.trials, c.seed + 1);
  }
  ctx.write_file(c.out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  ctx.finish();
  return 0;
}

struct EmbedCmd {
  InputOptions in;
  std::string matrix = "d12";
  std::size_t dims = 2;
  std::string out = "-";
};

int run_embed(const EmbedCmd& c, const Globals& g) {
  RunContext ctx("embed");
  ctx.set_threads(g.threads());
  const auto loaded = load_input(c.in);
  record_input(ctx, c.in, loaded);
  Matrix m;
  if (c.matrix == "A") {
    m = loaded.graph.dense();
  } else {
    const auto p = to_chain(loaded);
    HittingOptions opts;
    opts.threads = g.threads();
    m = hp_distance(hp_similarity(hitting_fast(p, opts), stationary_distribution(p), c.matrix == "d1" ? 1.0 : 0.5)).d;
  }
  const auto pca = pca_embed(m, c.dims);
  if (pca.rank_deficient) std::cerr << "warning: requested more components than the matrix rank; extra columns are zero\n";
  ctx.parameters().update({{"matrix", c.matrix}, {"dims", c.dims}});
  ctx.add_result("explained_variance", std::vector<double>(pca.explained.data(), pca.explained.data() + pca.explained.size()));
  ctx.add_result("rank", pca.rank);
  ctx.write_file(c.out, [&](std::ostream& os) {
    os << "label";
    for (std::size_t d = 0; d < c.dims; ++d) os << ",pc" << d + 1;
    os << '\n';
    for (std::size_t v = 0; v < loaded.graph.size(); ++v) {
      os << loaded.graph.labels[v];
      for (std::size_t d = 0; d < c.dims; ++d) {
        os << ',' << io::format_double(pca.coords(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(d)));
      }
      os << '\n';
    }
  });
  ctx.finish();
  return 0;
}

struct VerifyCmd {
  InputOptions in;
  ModelOptions model;
  std::string levels = "identity,metric";
  std::uint64_t walks = 100'000;
  double tol_deg = kDefaultDegeneracyTolerance;
  std::size_t oracle_pairs = 6;
  std::string out = "-";
};

int run_verify(const VerifyCmd& c, const Globals& g) {
  RunContext ctx("verify");
  ctx.set_threads(g.threads());
  ctx.set_seed(c.model.seed);
  if (c.in.path.empty() == c.model.model.empty()) throw UsageError("verify needs exactly one of --in and --model");
  std::optional<TransitionMatrix> p;
  if (!c.model.model.empty()) {
    auto gen = generate_model(c.model);
    ctx.parameters()["model"] = gen.params;
    p.emplace(row_normalize(gen.graph));
  } else {
    const auto loaded = load_input(c.in);
    record_input(ctx, c.in, loaded);
    p.emplace(to_chain(loaded));
  }
  VerifyOptions opts;
  opts.levels = parse_verify_levels(c.levels);
  opts.walks = c.walks;
  opts.seed = c.model.seed;
  opts.tol_deg = c.tol_deg;
  opts.max_oracle_pairs = c.oracle_pairs;
  opts.threads = g.threads();
  const auto report = verify_chain(*p, opts);
  ctx.parameters().update({{"levels", c.levels}, {"walks", c.walks}, {"tol_deg", c.tol_deg}});
  json checks = json::array();
  for (const auto& check : report.checks) {
    checks.push_back({{"level", check.level},
                      {"name", check.name},
                      {"passed", check.passed},
                      {"value", check.value},
                      {"tolerance", check.tolerance},
                      {"detail", check.detail}});
  }
  json out = {{"ok", report.ok()}, {"n", report.n}, {"checks", checks}};
  ctx.write_file(c.out, [&](std::ostream& os) { os << out.dump(2) << '\n'; });
  ctx.finish();
  return report.ok() ? 0 : 1;
}

struct BenchCmd {
  std::vector<std::size_t> sizes{1000, 2000};
  double density = 0.01;
  std::size_t repeats = 3;
  std::uint64_t seed = 0;
  std::string out = "-";
};

int run_bench(const BenchCmd& c, const Globals& g) {
  RunContext ctx("bench");
  ctx.set_threads(g.threads());
  ctx.set_seed(c.seed);
  json rows = json::array();
  std::optional<double> previous;
  for (const auto n : c.sizes) {
    const auto p = row_normalize(gen_random_strongly_connected(n, c.density, c.seed + n));
    HittingOptions opts;
    opts.threads = g.threads();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < std::max<std::size_t>(c.repeats, 1); ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto q = hitting_fast(p, opts);
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    json row = {{"n", n}, {"seconds", best}};
    if (previous) row["ratio_to_previous"] = best / *previous;
    previous = best;
    rows.push_back(row);
  }
  ctx.parameters().update({{"sizes", c.sizes}, {"density", c.density}, {"repeats", c.repeats}});
  json report = {{"hitting_fast", rows}, {"threads", g.threads()}};
  ctx.write_file(c.out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  ctx.finish();
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Hitting-probability metric toolkit for irreducible Markov chains"};
  app.set_version_flag("--version", std::string(HPMETRIC_VERSION));
  app.require_subcommand(1);
  Globals globals;
  app.add_option("--threads", globals.threads_flag, "Worker threads (0 = all cores; HPMETRIC_THREADS overrides)");

  std::function<int()> action;

  StationaryCmd stationary_cmd;
  auto* stationary = app.add_subcommand("stationary", "Invariant distribution as CSV label,phi");
  add_input_options(stationary, stationary_cmd.in);
  stationary->add_option("--out", stationary_cmd.out, "Output CSV");
  stationary->callback([&] { action = [&] { return run_stationary(stationary_cmd, globals); }; });

  HitprobCmd hit_cmd;
  auto* hit = app.add_subcommand("hitprob", "Hitting-probability matrix Q or a Monte Carlo estimate");
  add_input_options(hit, hit_cmd.in);
  hit->add_flag("--fast", hit_cmd.fast, "Single inverse plus rank-2 updates (default)");
  hit->add_flag("--reference", hit_cmd.reference, "Independent factorization per column");
  hit->add_option("--out", hit_cmd.out, "Output CSV (row = source)");
  hit->add_option("--mc", hit_cmd.mc, "Simulate excursions from i towards j")->expected(2);
  hit->add_option("--walks", hit_cmd.walks, "Number of simulated excursions");
  hit->add_option("--seed", hit_cmd.seed, "Random seed");
  hit->callback([&] { action = [&] { return run_hitprob(hit_cmd, globals); }; });

  MetricCmd metric_cmd;
  auto* metric = app.add_subcommand("metric", "Distance matrix d^beta");
  add_input_options(metric, metric_cmd.in);
  metric->add_option("--beta", metric_cmd.beta, "beta >= 1/2");
  metric->add_option("--out", metric_cmd.out, "Distance CSV");
  metric->add_option("--similarity", metric_cmd.similarity, "Also write the similarity A");
  metric->add_option("--tol-deg", metric_cmd.tol_deg, "Tolerance for degenerate pairs");
  metric->callback([&] { action = [&] { return run_metric(metric_cmd, globals); }; });

  QuotientCmd quotient_cmd;
  auto* quotient = app.add_subcommand("quotient", "Collapse degenerate classes and check the distance bounds");
  add_input_options(quotient, quotient_cmd.in);
  quotient->add_option("--out", quotient_cmd.out, "Quotient transition matrix CSV");
  quotient->add_option("--map", quotient_cmd.map, "node,class CSV");
  quotient->add_option("--tol-deg", quotient_cmd.tol_deg, "Tolerance for degenerate pairs");
  quotient->callback([&] { action = [&] { return run_quotient(quotient_cmd, globals); }; });

  SymmetrizeCmd sym_cmd;
  auto* sym = app.add_subcommand("symmetrize", "Symmetric operator from the chain");
  add_input_options(sym, sym_cmd.in);
  sym->add_option("--method", sym_cmd.method, "additive|max|chung|hp")
      ->check(CLI::IsMember({"additive", "max", "chung", "hp"}));
  sym->add_option("--beta", sym_cmd.beta, "beta for hp");
  sym->add_option("--out", sym_cmd.out, "Output CSV");
  sym->callback([&] { action = [&] { return run_symmetrize(sym_cmd, globals); }; });

  FiedlerCmd fiedler_cmd;
  auto* fiedler = app.add_subcommand("fiedler", "Fiedler vector of a symmetrization");
  add_input_options(fiedler, fiedler_cmd.in);
  fiedler->add_option("--method", fiedler_cmd.method, "additive|max|chung|hp")
      ->check(CLI::IsMember({"additive", "max", "chung", "hp"}));
  fiedler->add_option("--beta", fiedler_cmd.beta, "beta for hp");
  fiedler->add_option("--out", fiedler_cmd.out, "CSV label,value,sign");
  fiedler->callback([&] { action = [&] { return run_fiedler(fiedler_cmd, globals); }; });

  GenerateCmd gen_cmd;
  auto* generate = app.add_subcommand("generate", "Synthetic graphs");
  add_model_options(generate, gen_cmd.model, true);
  generate->add_option("--out", gen_cmd.out, "Edge list CSV");
  generate->add_option("--truth", gen_cmd.truth, "label,community CSV");
  generate->add_option("--coords", gen_cmd.coords, "Point coordinates (geometric)");
  generate->add_option("--curves", gen_cmd.curves, "Rescaled distance curves from --ref (geometric)");
  generate->add_option("--ref", gen_cmd.ref, "Reference node for --curves");
  generate->callback([&] { action = [&] { return run_generate(gen_cmd, globals); }; });

  ClusterCmd cluster_cmd;
  auto* cluster = app.add_subcommand("cluster", "Cluster nodes and score against a truth partition");
  add_input_options(cluster, cluster_cmd.in);
  cluster->add_option("--method", cluster_cmd.method, "kmedoids-d12|pca-kmeans-d12|pca-kmeans-A")
      ->check(CLI::IsMember({"kmedoids-d12", "pca-kmeans-d12", "pca-kmeans-A"}));
  cluster->add_option("--k", cluster_cmd.k, "Cluster count");
  cluster->add_option("--restarts", cluster_cmd.restarts, "Random restarts");
  cluster->add_option("--seed", cluster_cmd.seed, "Random seed");
  cluster->add_option("--truth", cluster_cmd.truth, "label,community CSV");
  cluster->add_option("--trials", cluster_cmd.trials, "Random partitions for the p-value");
  cluster->add_option("--out", cluster_cmd.out, "JSON report");
  cluster->callback([&] { action = [&] { return run_cluster(cluster_cmd, globals); }; });

  EmbedCmd embed_cmd;
  auto* embed = app.add_subcommand("embed", "PCA coordinates of d^1/2, d^1 or the adjacency");
  add_input_options(embed, embed_cmd.in);
  embed->add_option("--matrix", embed_cmd.matrix, "d12|d1|A")->check(CLI::IsMember({"d12", "d1", "A"}));
  embed->add_option("--dims", embed_cmd.dims, "Components");
  embed->add_option("--out", embed_cmd.out, "Coordinates CSV");
  embed->callback([&] { action = [&] { return run_embed(embed_cmd, globals); }; });

  VerifyCmd verify_cmd;
  auto* verify = app.add_subcommand("verify", "Run invariant checks; exit 1 on any violation");
  add_input_options(verify, verify_cmd.in);
  add_model_options(verify, verify_cmd.model, false);
  verify->add_option("--levels", verify_cmd.levels, "Comma list of identity,metric,quotient,oracle");
  verify->add_option("--walks", verify_cmd.walks, "Excursions per Monte Carlo check");
  verify->add_option("--oracle-pairs", verify_cmd.oracle_pairs, "Pairs sampled for the oracle level");
  verify->add_option("--tol-deg", verify_cmd.tol_deg, "Tolerance for degenerate pairs");
  verify->add_option("--out", verify_cmd.out, "JSON report");
  verify->callback([&] { action = [&] { return run_verify(verify_cmd, globals); }; });

  BenchCmd bench_cmd;
  auto* bench = app.add_subcommand("bench", "Time the fast hitting-probability solver");
  bench->add_option("--sizes", bench_cmd.sizes, "State counts")->delimiter(',');
  bench->add_option("--density", bench_cmd.density, "Extra edge density of the random graphs");
  bench->add_option("--repeats", bench_cmd.repeats, "Best of this many runs");
  bench->add_option("--seed", bench_cmd.seed, "Random seed");
  bench->add_option("--out", bench_cmd.out, "JSON report");
  bench->callback([&] { action = [&] { return run_bench(bench_cmd, globals); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::input_error);
  }
  return action();
}

}  // namespace
}  // namespace hpm::cli

int main(int argc, char** argv) {
  try {
    return hpm::cli::run(argc, argv);
  } catch (const hpm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return static_cast<int>(hpm::ExitCode::numerical_failure);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(hpm::ExitCode::numerical_failure);
  }
}
