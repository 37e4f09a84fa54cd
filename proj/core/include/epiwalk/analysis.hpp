#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epiwalk/engine.hpp"
#include "epiwalk/graph.hpp"

namespace epiwalk {

struct OutcomeMetrics {
  double pr = 0.0;    // participation ratio at the evaluation time
  double diam = 0.0;  // Euclidean distance in unit-square units
  std::optional<std::size_t> extinct_at;
  bool outbreak = false;
};

/// Fraction of nodes infected at least once during [0, t].
double participation_ratio(const InfectionTrace& trace, std::size_t n_nodes, std::size_t t);

/// Max Euclidean distance from the seed's position over nodes ever infected
/// by time t; 0 when only the seed was infected.
double diameter(const InfectionTrace& trace,
                const std::vector<std::array<double, 2>>& positions,
                std::size_t seed_node, std::size_t t);

bool outbreak_classify(const OutcomeMetrics& metrics, double pr_threshold);

/// Density lower bound at the end of a t-step experiment for a degree-k node:
///   [(t - ceil(t/2)) k + floor(t/2)] / sum_k
/// With k = k_max this is the graph-wide form. Units: walkers / degree_sum
/// (t_max times the simulation density).
double bound_lower(std::size_t t, std::size_t k, std::size_t sum_k);

/// Intermediate-time variant: bound at step t of a t_max-step experiment.
double bound_lower_at(std::size_t t_max, std::size_t t, std::size_t k, std::size_t sum_k);

/// Density upper bound at the end of a t-step experiment (t >= 3):
///   [(t - ceil((t-3)/2)) k_max + ceil((t-2)/2) k_max^2] / sum_k
double bound_upper(std::size_t t, std::size_t k_max, std::size_t sum_k);

/// Intermediate-time envelope (valid for t >= 1) whose value at t = t_max is
/// bound_upper.
double bound_upper_at(std::size_t t_max, std::size_t t, std::size_t k_max, std::size_t sum_k);

struct BoundViolation {
  std::size_t node;
  std::size_t t;
  std::string kind;  // "per-step-change" | "lower-refined" | "lower-kmax" | "upper-kmax"
  double value;      // offending quantity, walkers / degree_sum units
  double bound;
};

struct BoundReport {
  std::vector<BoundViolation> violations;
  bool regular_graph = false;  // k_max forms checked only when true
  bool ok() const { return violations.empty(); }
};

/// Checks, for every node with degree >= 1 and every recorded step:
///  - the per-step change bound |walkers(t+1) - walkers(t)| <= k_max^2 + k_max
///  - the degree-refined lower bound: the extremal-chain accounting evaluated on
///    the realized infection schedule (each infected step sends at most k_i,
///    each infection after t = 0 brings at least one walker in); reduces to
///    bound_lower_at on the worst-case every-other-step schedule
///  - on regular graphs, bound_lower at the end of the experiment and the
///    running-max envelope of bound_upper_at at every step (the raw schedule
///    dips on even steps, but walkers can simply be retained).
/// The run must have been recorded with history.
BoundReport check_bounds(const RunResult& result, const WeightedGraph& graph);

/// max-norm of T eta0 - eta0, the condition-2 diagnostic.
double non_outbreak_residual(const TransferMatrix& transfer, const std::vector<double>& eta0);

}  // namespace epiwalk
