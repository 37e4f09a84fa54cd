// epiwalk: generate weighted geometric graphs, perturb node weights, run the
// walker-based SIS dynamics and the sensitivity sweep.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "epiwalk/analysis.hpp"
#include "epiwalk/engine.hpp"
#include "epiwalk/errors.hpp"
#include "epiwalk/graph.hpp"
#include "epiwalk/io.hpp"
#include "epiwalk/rng.hpp"
#include "epiwalk/sweep.hpp"
#include "epiwalk/weights.hpp"

namespace fs = std::filesystem;
using namespace epiwalk;

namespace {

bool g_quiet = false;

void note(const std::string& msg) {
  if (!g_quiet) std::cerr << msg << "\n";
}

std::size_t default_workers() {
  if (const char* env = std::getenv("EPIWALK_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
    throw ParamError("EPIWALK_WORKERS must be a positive integer");
  }
  return 0;  // resolved to hardware concurrency by the sweep
}

void write_run_manifest(const std::string& out_dir, nlohmann::ordered_json extra) {
  extra["tool"] = "epiwalk";
  atomic_write((fs::path(out_dir) / "manifest.json").string(), extra.dump(2) + "\n");
}

int cmd_gen(const GraphParams& params, double w_short, double w_long,
            const std::string& out_path) {
  WeightedGraph graph = generate_graph(params);
  graph = assign_baseline_weights(graph, WeightPolicy{w_short, w_long});
  save_graph(graph, out_path);
  note("wrote " + out_path + " (" + std::to_string(graph.n()) + " nodes, " +
       std::to_string(graph.n_bonds()) + " bonds, hash " +
       fnv1a64_hex(serialize_graph(graph)) + ")");
  return 0;
}

int cmd_perturb(const std::string& graph_path, std::size_t node, const std::string& spec_path,
                const std::string& out_path) {
  WeightedGraph graph = load_graph(graph_path);
  nlohmann::json spec_doc;
  const std::string spec_text = read_file(spec_path);
  try {
    spec_doc = nlohmann::json::parse(spec_text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t byte = std::min(e.byte, spec_text.size());
    const long line =
        1 + static_cast<long>(std::count(spec_text.begin(), spec_text.begin() + byte, '\n'));
    throw ParseError(std::string("spec file parse error: ") + e.what(), line);
  }
  HeterogeneitySpec spec;
  spec.node = spec_doc.value("node", node);
  spec.bin_width = spec_doc.value("bin_width", 0.01);
  spec.differences = spec_doc.at("differences").get<std::vector<double>>();
  if (spec_doc.contains("node") && spec_doc["node"].get<std::size_t>() != node)
    throw ParamError("--node disagrees with the node in the spec file");

  WeightedGraph out = inject_heterogeneity(graph, spec);
  save_graph(out, out_path);
  const NodeMetrics m = node_metrics(out, spec.node, spec.bin_width);
  note("wrote " + out_path + "; achieved D=" + format_fixed(m.d_value) +
       " S=" + format_fixed(m.entropy));
  return 0;
}

int cmd_metrics(const std::string& graph_path, std::size_t node, double bin_width) {
  WeightedGraph graph = load_graph(graph_path);
  const NodeMetrics m = node_metrics(graph, node, bin_width);
  std::cout << "metric,value\n";
  std::cout << "D," << format_fixed(m.d_value) << "\n";
  std::cout << "S," << format_fixed(m.entropy) << "\n";
  std::cout << "bin_center,mass\n";
  for (const auto& [bin, mass] : m.distribution)
    std::cout << format_fixed(static_cast<double>(bin) * bin_width) << ","
              << format_fixed(mass) << "\n";
  return 0;
}

int cmd_run(const std::string& graph_path, std::size_t seed_node, std::size_t t_max,
            std::uint64_t rng_seed, const std::string& out_dir) {
  WeightedGraph graph = load_graph(graph_path);
  Rng rng(rng_seed);
  RunResult result = run(graph, seed_node, t_max, rng);

  std::ostringstream run_csv;
  run_csv << "t,node,I,walkers,eta\n";
  const double n_walkers = static_cast<double>(result.final_state.n_walkers);
  for (std::size_t t = 0; t < result.trace.n_steps(); ++t) {
    for (std::size_t i = 0; i < graph.n(); ++i) {
      const auto w = result.walker_history[t][i];
      run_csv << t << "," << i << "," << int(result.trace.steps[t][i]) << "," << w << ","
              << format_fixed(static_cast<double>(w) / n_walkers) << "\n";
    }
  }
  std::ostringstream trace_txt;
  for (std::size_t t = 0; t < result.trace.n_steps(); ++t) {
    trace_txt << t << ":";
    for (std::size_t i = 0; i < graph.n(); ++i)
      if (result.trace.steps[t][i]) trace_txt << " " << i;
    trace_txt << "\n";
  }

  fs::create_directories(out_dir);
  atomic_write((fs::path(out_dir) / "run.csv").string(), run_csv.str());
  atomic_write((fs::path(out_dir) / "trace.txt").string(), trace_txt.str());

  nlohmann::ordered_json manifest;
  manifest["graph"] = fs::absolute(graph_path).string();
  manifest["graph_hash"] = fnv1a64_hex(serialize_graph(graph));
  manifest["seed_node"] = seed_node;
  manifest["t_max"] = t_max;
  manifest["rng_seed"] = rng_seed;
  manifest["extinct_at"] = result.extinct_at ? nlohmann::ordered_json(*result.extinct_at)
                                             : nlohmann::ordered_json(nullptr);
  manifest["artifacts"] = {{"run.csv", fnv1a64_hex(run_csv.str())},
                           {"trace.txt", fnv1a64_hex(trace_txt.str())}};
  write_run_manifest(out_dir, manifest);
  note("wrote " + out_dir + " (steps recorded: " + std::to_string(result.trace.n_steps()) + ")");
  return 0;
}

int cmd_analyze(const std::string& run_dir, double pr_threshold,
                std::string out_dir) {
  if (out_dir.empty()) out_dir = run_dir;
  nlohmann::json manifest = nlohmann::json::parse(read_file((fs::path(run_dir) / "manifest.json").string()));
  WeightedGraph graph = load_graph(manifest.at("graph").get<std::string>());
  const std::size_t seed_node = manifest.at("seed_node").get<std::size_t>();
  const std::size_t t_max = manifest.at("t_max").get<std::size_t>();

  // Rebuild the run deterministically from the manifest instead of parsing
  // run.csv: same seed, same engine, bit-identical trajectory.
  Rng rng(manifest.at("rng_seed").get<std::uint64_t>());
  RunResult result = run(graph, seed_node, t_max, rng);

  OutcomeMetrics metrics;
  const std::size_t last = result.trace.n_steps() - 1;
  metrics.pr = participation_ratio(result.trace, graph.n(), last);
  metrics.diam = diameter(result.trace, graph.positions(), seed_node, last);
  metrics.extinct_at = result.extinct_at;
  metrics.outbreak = outbreak_classify(metrics, pr_threshold);

  std::ostringstream csv;
  csv << "pr,diam,extinct_at,outbreak,pr_threshold\n";
  csv << format_fixed(metrics.pr) << "," << format_fixed(metrics.diam) << ",";
  if (metrics.extinct_at)
    csv << *metrics.extinct_at;
  else
    csv << "none";
  csv << "," << (metrics.outbreak ? 1 : 0) << "," << format_fixed(pr_threshold) << "\n";

  const BoundReport report = check_bounds(result, graph);
  std::ostringstream rep;
  rep << "regular_graph=" << (report.regular_graph ? 1 : 0) << "\n";
  rep << "violations=" << report.violations.size() << "\n";
  for (const auto& v : report.violations)
    rep << v.kind << " node=" << v.node << " t=" << v.t << " value=" << format_fixed(v.value)
        << " bound=" << format_fixed(v.bound) << "\n";

  atomic_write((fs::path(out_dir) / "metrics.csv").string(), csv.str());
  atomic_write((fs::path(out_dir) / "bounds_report.txt").string(), rep.str());
  std::cout << csv.str();
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              std::size_t workers_flag) {
  SweepConfig config = SweepConfig::from_json(read_file(config_path));
  if (workers_flag > 0)
    config.workers = workers_flag;
  else if (config.workers == 0)
    config.workers = default_workers();
  SweepResult result = run_sweep(config);
  export_surfaces(result, out_dir);
  note("wrote sweep results to " + out_dir + " (" + std::to_string(result.cells.size()) +
       " cells x " + std::to_string(config.replicates) + " replicates)");
  return 0;
}

int cmd_verify(const std::string& graph_path, std::size_t t_max, std::size_t trials,
               std::uint64_t rng_seed) {
  WeightedGraph graph = load_graph(graph_path);
  const SeedSelection seed = select_seed_node(graph, Scenario::NoLongDistance);
  const TransferMatrix transfer(graph);

  std::size_t bound_violations = 0;
  double worst_identity_gap = 0.0;
  std::string first_failure;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(seed_combine(rng_seed, trial));
    RunResult result = run(graph, seed.node, t_max, rng);  // conservation checked per step

    const BoundReport report = check_bounds(result, graph);
    if (!report.ok()) {
      bound_violations += report.violations.size();
      if (first_failure.empty()) {
        const auto& v = report.violations.front();
        first_failure = v.kind + " at node " + std::to_string(v.node) + " t=" +
                        std::to_string(v.t);
      }
    }

    // master-equation identity on this trial's trace
    const std::vector<double> eta0 = [&] {
      EpidemicState s0 = init_state(graph, seed.node, t_max);
      return s0.eta_vector();
    }();
    std::vector<double> eta = eta0;
    std::vector<std::int64_t> cum(graph.n(), 0);
    for (std::size_t t = 0; t + 1 < result.trace.n_steps(); ++t) {
      for (std::size_t i = 0; i < graph.n(); ++i) cum[i] += result.trace.steps[t][i];
      eta = step_meanflow(eta, result.trace.steps[t], graph, t_max);
      const auto closed = masterflow_closed_form(eta0, cum, transfer, t_max);
      for (std::size_t i = 0; i < graph.n(); ++i)
        worst_identity_gap = std::max(worst_identity_gap, std::abs(closed[i] - eta[i]));
    }
  }

  const bool identity_ok = worst_identity_gap <= 1e-12;
  std::cout << "trials=" << trials << "\n";
  std::cout << "walker_conservation=pass\n";  // step_stochastic aborts otherwise
  std::cout << "bound_violations=" << bound_violations << "\n";
  if (!first_failure.empty()) std::cout << "first_violation=" << first_failure << "\n";
  std::cout << "master_equation_max_gap=" << worst_identity_gap << "\n";
  std::cout << "result=" << (bound_violations == 0 && identity_ok ? "pass" : "fail") << "\n";
  return bound_violations == 0 && identity_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SIS epidemic dynamics as random walks on weighted geometric graphs"};
  app.require_subcommand(1);
  app.add_flag("--quiet", g_quiet, "suppress progress notes");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a weighted geometric graph");
  GraphParams gp;
  double w_short = 0.03, w_long = 0.03;
  std::string out_path;
  gen->add_option("--n", gp.n_nodes, "number of nodes")->required();
  gen->add_option("--r", gp.r, "short-distance radius")->required();
  gen->add_option("--pr", gp.p_r, "short-bond probability")->required();
  gen->add_option("--R", gp.R, "long-distance radius")->required();
  gen->add_option("--pR", gp.p_R, "long-bond probability")->required();
  gen->add_option("--seed", gp.seed, "RNG seed")->required();
  gen->add_option("--w-short", w_short, "baseline short-bond weight");
  gen->add_option("--w-long", w_long, "baseline long-bond weight");
  gen->add_option("--out", out_path, "output graph file")->required();

  // perturb
  auto* perturb = app.add_subcommand("perturb", "inject weight heterogeneity at a node");
  std::string graph_path, spec_path;
  std::size_t node = 0;
  perturb->add_option("--graph", graph_path, "input graph file")->required();
  perturb->add_option("--node", node, "perturbed node index")->required();
  perturb->add_option("--spec", spec_path, "heterogeneity spec file (JSON)")->required();
  perturb->add_option("--out", out_path, "output graph file")->required();

  // metrics
  auto* metrics = app.add_subcommand("metrics", "print D_i, S_i^D and the binned distribution");
  double bin_width = 0.01;
  metrics->add_option("--graph", graph_path, "input graph file")->required();
  metrics->add_option("--node", node, "node index")->required();
  metrics->add_option("--bin-width", bin_width, "difference bin width");

  // run
  auto* run_cmd = app.add_subcommand("run", "run one stochastic epidemic");
  std::size_t seed_node = 0, t_max = 200, trials = 1000;
  std::uint64_t rng_seed = 0;
  run_cmd->add_option("--graph", graph_path, "input graph file")->required();
  run_cmd->add_option("--seed-node", seed_node, "initially infected node")->required();
  run_cmd->add_option("--tmax", t_max, "experiment length")->required();
  run_cmd->add_option("--rng-seed", rng_seed, "RNG seed")->required();
  run_cmd->add_option("--out", out_path, "output directory")->required();

  // analyze
  auto* analyze = app.add_subcommand("analyze", "compute outcome metrics for a recorded run");
  std::string run_dir, analyze_out;
  double pr_threshold = 0.10;
  analyze->add_option("--run", run_dir, "run directory (from epiwalk run)")->required();
  analyze->add_option("--pr-threshold", pr_threshold, "outbreak PR threshold");
  analyze->add_option("--out", analyze_out, "output directory (default: run dir)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "run the (D1, S1) sensitivity grid");
  std::string config_path;
  std::size_t workers = 0;
  sweep_cmd->add_option("--config", config_path, "sweep config file (JSON)")->required();
  sweep_cmd->add_option("--out", out_path, "output directory")->required();
  sweep_cmd->add_option("--workers", workers, "worker thread count (default: EPIWALK_WORKERS or all cores)");

  // verify
  auto* verify = app.add_subcommand("verify", "Monte-Carlo invariant and bound checks");
  verify->add_option("--graph", graph_path, "input graph file")->required();
  verify->add_option("--tmax", t_max, "experiment length")->required();
  verify->add_option("--trials", trials, "number of seeded runs");
  verify->add_option("--rng-seed", rng_seed, "base RNG seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gp, w_short, w_long, out_path);
    if (perturb->parsed()) return cmd_perturb(graph_path, node, spec_path, out_path);
    if (metrics->parsed()) return cmd_metrics(graph_path, node, bin_width);
    if (run_cmd->parsed()) return cmd_run(graph_path, seed_node, t_max, rng_seed, out_path);
    if (analyze->parsed()) return cmd_analyze(run_dir, pr_threshold, analyze_out);
    if (sweep_cmd->parsed()) return cmd_sweep(config_path, out_path, workers);
    if (verify->parsed()) return cmd_verify(graph_path, t_max, trials, rng_seed);
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const ParamError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
