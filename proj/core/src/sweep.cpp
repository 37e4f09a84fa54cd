#include "epiwalk/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "epiwalk/analysis.hpp"
#include "epiwalk/engine.hpp"
#include "epiwalk/errors.hpp"
#include "epiwalk/io.hpp"
#include "epiwalk/weights.hpp"

namespace epiwalk {

std::string to_string(Scenario s) {
  return s == Scenario::SmallWorld ? "small-world" : "no-long-distance";
}

Scenario scenario_from_string(const std::string& s) {
  if (s == "small-world") return Scenario::SmallWorld;
  if (s == "no-long-distance") return Scenario::NoLongDistance;
  throw ParamError("unknown scenario: " + s + " (expected small-world or no-long-distance)");
}

void SweepConfig::validate() const {
  graph.validate();
  if (replicates < 1) throw ParamError("replicates must be >= 1");
  if (d_targets.empty() || s_targets.empty()) throw ParamError("target lists must be nonempty");
  if (t_max < 1) throw ParamError("t_max must be >= 1");
  WeightPolicy{w_short, w_long}.validate();
  if (!(bin_width > 0.0)) throw ParamError("bin_width must be positive");
}

std::string SweepConfig::to_json() const {
  nlohmann::ordered_json j;
  j["graph"] = {{"n", graph.n_nodes}, {"r", graph.r},   {"pr", graph.p_r},
                {"R", graph.R},       {"pR", graph.p_R}, {"seed", graph.seed}};
  j["scenario"] = epiwalk::to_string(scenario);
  j["d_targets"] = d_targets;
  j["s_targets"] = s_targets;
  j["replicates"] = replicates;
  j["t_max"] = t_max;
  j["base_seed"] = base_seed;
  j["pr_threshold"] = pr_threshold;
  j["w_short"] = w_short;
  j["w_long"] = w_long;
  j["bin_width"] = bin_width;
  j["level_spacing"] = level_spacing;
  j["d_tolerance"] = d_tolerance;
  j["s_tolerance"] = s_tolerance;
  // workers is an execution detail, deliberately excluded: serialized configs
  // (and thus manifests) must be identical regardless of parallelism
  return j.dump(2) + "\n";
}

SweepConfig SweepConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t byte = std::min(e.byte, text.size());
    const long line = 1 + static_cast<long>(std::count(text.begin(), text.begin() + byte, '\n'));
    throw ParseError(std::string("sweep config parse error: ") + e.what(), line);
  }
  try {
    SweepConfig c;
    const auto& g = j.at("graph");
    c.graph = {g.at("n").get<std::size_t>(), g.at("r").get<double>(), g.at("pr").get<double>(),
               g.at("R").get<double>(),      g.at("pR").get<double>(),
               g.at("seed").get<std::uint64_t>()};
    c.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    c.d_targets = j.at("d_targets").get<std::vector<double>>();
    c.s_targets = j.at("s_targets").get<std::vector<double>>();
    c.replicates = j.at("replicates").get<std::size_t>();
    c.t_max = j.at("t_max").get<std::size_t>();
    c.base_seed = j.at("base_seed").get<std::uint64_t>();
    c.pr_threshold = j.value("pr_threshold", 0.10);
    c.w_short = j.value("w_short", 0.03);
    c.w_long = j.value("w_long", 0.03);
    c.bin_width = j.value("bin_width", 0.01);
    c.level_spacing = j.value("level_spacing", 0.04);
    c.d_tolerance = j.value("d_tolerance", 0.05);
    c.s_tolerance = j.value("s_tolerance", 0.15);
    c.workers = j.value("workers", std::size_t{0});
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParamError(std::string("sweep config schema error: ") + e.what());
  }
}

SeedSelection select_seed_node(const WeightedGraph& graph, Scenario scenario) {
  if (graph.n() == 0) throw ParamError("cannot select a seed node in an empty graph");
  const std::size_t target_short = scenario == Scenario::SmallWorld ? 19 : 20;
  const std::size_t target_long = scenario == Scenario::SmallWorld ? 1 : 0;

  SeedSelection best;
  long best_degree_gap = -1;
  long best_mismatch = -1;
  for (std::size_t i = 0; i < graph.n(); ++i) {
    const std::size_t k = graph.degree(i);
    if (k == 0) continue;  // cannot seed there
    std::size_t n_long = 0;
    for (auto lng : graph.edge_is_long(i)) n_long += lng;
    const std::size_t n_short = k - n_long;
    const long degree_gap = std::labs(static_cast<long>(k) - 20);
    const long mismatch =
        std::labs(static_cast<long>(n_short) - static_cast<long>(target_short)) +
        std::labs(static_cast<long>(n_long) - static_cast<long>(target_long));
    if (best_degree_gap < 0 || std::make_pair(degree_gap, mismatch) <
                                   std::make_pair(best_degree_gap, best_mismatch)) {
      best_degree_gap = degree_gap;
      best_mismatch = mismatch;
      best = {i, degree_gap == 0 && mismatch == 0, k, n_short, n_long};
    }
  }
  if (best_degree_gap < 0)
    throw ParamError("no seed candidate: every node has degree 0");
  return best;
}

namespace {

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct Task {
  std::size_t cell;
  std::size_t replicate;
};

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();

  GraphParams gp = config.graph;
  if (config.scenario == Scenario::NoLongDistance) gp.p_R = 0.0;

  // Topology fixed across cells: one graph per replicate index.
  std::vector<WeightedGraph> graphs;
  std::vector<SeedSelection> seeds;
  graphs.reserve(config.replicates);
  const WeightPolicy policy{config.w_short, config.w_long};
  for (std::size_t r = 0; r < config.replicates; ++r) {
    GraphParams g = gp;
    g.seed = seed_combine(gp.seed, r);
    graphs.push_back(assign_baseline_weights(generate_graph(g), policy));
    seeds.push_back(select_seed_node(graphs.back(), config.scenario));
  }

  const std::size_t n_cells = config.d_targets.size() * config.s_targets.size();
  SweepResult result;
  result.config = config;
  result.cells.resize(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    result.cells[c].d_target = config.d_targets[c / config.s_targets.size()];
    result.cells[c].s_target = config.s_targets[c % config.s_targets.size()];
    result.cells[c].replicates.resize(config.replicates);
  }

  std::vector<Task> tasks;
  tasks.reserve(n_cells * config.replicates);
  for (std::size_t c = 0; c < n_cells; ++c)
    for (std::size_t r = 0; r < config.replicates; ++r) tasks.push_back({c, r});

  const std::uint64_t scenario_tag = seed_combine(config.base_seed, to_string(config.scenario));
  auto run_task = [&](const Task& task) {
    CellResult& cell = result.cells[task.cell];
    const WeightedGraph& graph = graphs[task.replicate];
    const SeedSelection& seed = seeds[task.replicate];

    HeterogeneitySpec spec;
    spec.node = seed.node;
    spec.bin_width = config.bin_width;
    spec.differences = make_difference_multiset(seed.degree, cell.d_target, cell.s_target,
                                                config.level_spacing);
    WeightedGraph perturbed = inject_heterogeneity(graph, spec);

    ReplicateOutcome& out = cell.replicates[task.replicate];
    out.seed_node = seed.node;
    out.achieved_d = difference_measure(perturbed, seed.node);
    out.achieved_s = nodal_entropy(difference_distribution(perturbed, seed.node, config.bin_width));
    out.run_seed = seed_combine(seed_combine(scenario_tag, task.cell), task.replicate);

    Rng rng(out.run_seed);
    RunOptions opts;
    opts.record_history = false;
    RunResult rr = run(perturbed, seed.node, config.t_max, rng, opts);
    const std::size_t last = rr.trace.n_steps() - 1;
    out.pr = participation_ratio(rr.trace, graph.n(), last);
    out.diam = diameter(rr.trace, graph.positions(), seed.node, last);
    out.extinct_at = rr.extinct_at;
    out.outbreak = out.pr > config.pr_threshold;
  };

  std::size_t workers = config.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<std::size_t>(workers, tasks.size());
  if (workers <= 1) {
    for (const auto& task : tasks) run_task(task);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t idx = next.fetch_add(1); idx < tasks.size(); idx = next.fetch_add(1))
          run_task(tasks[idx]);
      });
    for (auto& th : pool) th.join();
  }

  for (auto& cell : result.cells) {
    std::vector<double> pr, diam, ad, as;
    std::size_t outbreaks = 0;
    double ext_sum = 0.0;
    for (const auto& rep : cell.replicates) {
      pr.push_back(rep.pr);
      diam.push_back(rep.diam);
      ad.push_back(rep.achieved_d);
      as.push_back(rep.achieved_s);
      outbreaks += rep.outbreak ? 1 : 0;
      ext_sum += static_cast<double>(rep.extinct_at.value_or(config.t_max));
    }
    cell.achieved_d = mean_of(ad);
    cell.achieved_s = mean_of(as);
    cell.mean_pr = mean_of(pr);
    cell.median_pr = median_of(pr);
    cell.max_pr = *std::max_element(pr.begin(), pr.end());
    cell.mean_diam = mean_of(diam);
    cell.median_diam = median_of(diam);
    cell.max_diam = *std::max_element(diam.begin(), diam.end());
    cell.outbreak_fraction =
        static_cast<double>(outbreaks) / static_cast<double>(cell.replicates.size());
    cell.mean_extinction_time = ext_sum / static_cast<double>(cell.replicates.size());
    cell.infeasible = std::abs(cell.achieved_d - cell.d_target) > config.d_tolerance ||
                      std::abs(cell.achieved_s - cell.s_target) > config.s_tolerance;
  }
  return result;
}

namespace {

std::string surface_csv(const SweepResult& result, bool diam, bool use_max) {
  const auto& cfg = result.config;
  std::ostringstream out;
  out << "d_target";
  for (double s : cfg.s_targets) out << "," << format_fixed(s);
  out << "\n";
  for (std::size_t di = 0; di < cfg.d_targets.size(); ++di) {
    out << format_fixed(cfg.d_targets[di]);
    for (std::size_t si = 0; si < cfg.s_targets.size(); ++si) {
      const auto& cell = result.cells[di * cfg.s_targets.size() + si];
      out << ",";
      if (cell.infeasible) {
        out << "NA";
      } else if (diam) {
        out << format_fixed(use_max ? cell.max_diam : cell.mean_diam);
      } else {
        out << format_fixed(use_max ? cell.max_pr : cell.mean_pr);
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string long_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "scenario,d_target,s_target,replicate,run_seed,seed_node,achieved_d,achieved_s,"
         "pr,diam,outbreak,extinct_at\n";
  const std::string scen = to_string(result.config.scenario);
  for (const auto& cell : result.cells) {
    for (std::size_t r = 0; r < cell.replicates.size(); ++r) {
      const auto& rep = cell.replicates[r];
      out << scen << "," << format_fixed(cell.d_target) << "," << format_fixed(cell.s_target)
          << "," << r << "," << rep.run_seed << "," << rep.seed_node << ","
          << format_fixed(rep.achieved_d) << "," << format_fixed(rep.achieved_s) << ","
          << format_fixed(rep.pr) << "," << format_fixed(rep.diam) << ","
          << (rep.outbreak ? 1 : 0) << ",";
      if (rep.extinct_at)
        out << *rep.extinct_at;
      else
        out << "none";
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace

void export_surfaces(const SweepResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ParamError("cannot create output directory " + out_dir + ": " + ec.message());

  const std::string scen = to_string(result.config.scenario);
  struct Artifact {
    std::string name;
    std::string content;
  };
  std::vector<Artifact> artifacts = {
      {"pr_surface_" + scen + ".csv", surface_csv(result, false, false)},
      {"pr_surface_max_" + scen + ".csv", surface_csv(result, false, true)},
      {"diam_surface_" + scen + ".csv", surface_csv(result, true, false)},
      {"diam_surface_max_" + scen + ".csv", surface_csv(result, true, true)},
      {"runs_long.csv", long_csv(result)},
  };

  nlohmann::ordered_json manifest;
  manifest["config"] = nlohmann::ordered_json::parse(result.config.to_json());
  nlohmann::ordered_json hashes;
  for (const auto& a : artifacts) {
    atomic_write((fs::path(out_dir) / a.name).string(), a.content);
    hashes[a.name] = fnv1a64_hex(a.content);
  }
  manifest["artifacts"] = hashes;
  atomic_write((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

}  // namespace epiwalk
