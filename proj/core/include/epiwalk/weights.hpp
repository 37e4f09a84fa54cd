#pragma once

#include <map>
#include <vector>

#include "epiwalk/graph.hpp"

namespace epiwalk {

struct WeightPolicy {
  double w_short = 0.0;
  double w_long = 0.0;

  void validate() const;  // both in [0,1]
};

/// Perturbation of one node's outgoing weights: the j-th bond of `node` in
/// canonical order (ascending neighbor index) gets
/// w = clamp(baseline + differences[j], 0, 1). Incoming weights untouched.
struct HeterogeneitySpec {
  std::size_t node = 0;
  double bin_width = 0.01;
  std::vector<double> differences;  // length must equal degree(node)
};

struct NodeMetrics {
  double d_value = 0.0;                  // D_i
  std::map<long, double> distribution;   // bin index -> mass, bin center = index * bin_width
  double bin_width = 0.01;
  double entropy = 0.0;                  // S_i^D, nats
};

/// Every short bond gets w_short in both directions, every long bond w_long.
WeightedGraph assign_baseline_weights(const WeightedGraph& graph, const WeightPolicy& policy);

/// Returns a copy with the spec applied. If clamping kicks in, the achieved
/// metrics (difference_measure / nodal_entropy) differ from the targets; the
/// caller reports achieved values.
WeightedGraph inject_heterogeneity(const WeightedGraph& graph, const HeterogeneitySpec& spec);

/// D_i = mean over neighbors of (w_ij - w_ji). Positive = more infectious.
double difference_measure(const WeightedGraph& graph, std::size_t node);

/// P_i(d): each incident edge contributes 1/k_i mass to the bin holding
/// w_ij - w_ji. Bins have width bin_width with 0 a bin center.
std::map<long, double> difference_distribution(const WeightedGraph& graph, std::size_t node,
                                               double bin_width);

/// Natural-log Shannon entropy of a distribution; input must sum to 1.
double nodal_entropy(const std::map<long, double>& distribution);

NodeMetrics node_metrics(const WeightedGraph& graph, std::size_t node, double bin_width);

/// Difference-multiset generator targeting (D, S^D) for a degree-k node:
/// m difference levels spaced `level_spacing` apart, centered so the weighted
/// mean is exactly d_target; the multiplicity profile is searched to bring
/// the entropy closest to s_target. Entropy is attained exactly only when a
/// matching multiplicity profile exists, so callers must measure achieved
/// values after injection.
std::vector<double> make_difference_multiset(std::size_t degree, double d_target,
                                             double s_target, double level_spacing = 0.04);

}  // namespace epiwalk
