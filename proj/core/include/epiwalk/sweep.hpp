#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epiwalk/graph.hpp"

namespace epiwalk {

enum class Scenario { SmallWorld, NoLongDistance };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

struct SweepConfig {
  GraphParams graph;            // seed acts as the per-replicate base graph seed
  Scenario scenario = Scenario::SmallWorld;
  std::vector<double> d_targets;
  std::vector<double> s_targets;
  std::size_t replicates = 25;
  std::size_t t_max = 200;
  std::uint64_t base_seed = 0;
  double pr_threshold = 0.10;
  double w_short = 0.03;
  double w_long = 0.03;
  double bin_width = 0.01;
  double level_spacing = 0.04;
  double d_tolerance = 0.05;   // cell marked infeasible beyond this
  double s_tolerance = 0.15;
  std::size_t workers = 0;     // 0 = hardware concurrency

  void validate() const;
  std::string to_json() const;
  static SweepConfig from_json(const std::string& text);
};

struct ReplicateOutcome {
  std::uint64_t run_seed = 0;
  double achieved_d = 0.0;
  double achieved_s = 0.0;
  double pr = 0.0;
  double diam = 0.0;
  bool outbreak = false;
  std::optional<std::size_t> extinct_at;
  std::size_t seed_node = 0;
};

struct CellResult {
  double d_target = 0.0;
  double s_target = 0.0;
  double achieved_d = 0.0;  // mean over replicates
  double achieved_s = 0.0;
  double mean_pr = 0.0, median_pr = 0.0, max_pr = 0.0;
  double mean_diam = 0.0, median_diam = 0.0, max_diam = 0.0;
  double outbreak_fraction = 0.0;
  double mean_extinction_time = 0.0;  // non-extinct replicates count as t_max
  bool infeasible = false;
  std::vector<ReplicateOutcome> replicates;
};

struct SweepResult {
  SweepConfig config;
  std::vector<CellResult> cells;  // row-major: d_targets x s_targets
};

struct SeedSelection {
  std::size_t node = 0;
  bool exact = false;
  std::size_t degree = 0;
  std::size_t n_short = 0;
  std::size_t n_long = 0;
};

/// Seed node rule: exactly 19 short + 1 long in the small-world scenario,
/// 20 short otherwise; else closest by (|k - 20|, composition mismatch),
/// ties to the lowest index.
SeedSelection select_seed_node(const WeightedGraph& graph, Scenario scenario);

/// Full sensitivity grid. Topology is held fixed across cells: replicate r of
/// every cell uses the graph generated from seed_combine(graph.seed, r), so
/// only the injected node weights vary cell-to-cell. Per-run RNG seeds derive
/// from (base_seed, scenario, cell index, replicate index). Deterministic.
SweepResult run_sweep(const SweepConfig& config);

/// Writes pr_surface_<scenario>.csv, diam_surface_<scenario>.csv (rows = D
/// targets, columns = S targets, mean aggregation, "NA" for infeasible
/// cells), max-aggregation variants, runs_long.csv and manifest.json.
void export_surfaces(const SweepResult& result, const std::string& out_dir);

}  // namespace epiwalk
