#include "epiwalk/weights.hpp"

#include <algorithm>
#include <cmath>

#include "epiwalk/errors.hpp"

namespace epiwalk {

void WeightPolicy::validate() const {
  if (w_short < 0.0 || w_short > 1.0) throw ParamError("w_short must be in [0,1]");
  if (w_long < 0.0 || w_long > 1.0) throw ParamError("w_long must be in [0,1]");
}

WeightedGraph assign_baseline_weights(const WeightedGraph& graph, const WeightPolicy& policy) {
  policy.validate();
  WeightedGraph out = graph;
  for (const auto& b : graph.bonds()) {
    const double w = b.tag == BondTag::Long ? policy.w_long : policy.w_short;
    out.set_weight(b.i, b.j, w);
    out.set_weight(b.j, b.i, w);
  }
  return out;
}

WeightedGraph inject_heterogeneity(const WeightedGraph& graph, const HeterogeneitySpec& spec) {
  if (spec.node >= graph.n()) throw ParamError("heterogeneity node out of range");
  const std::size_t k = graph.degree(spec.node);
  if (spec.differences.size() != k)
    throw ParamError("difference multiset length " + std::to_string(spec.differences.size()) +
                     " does not match node degree " + std::to_string(k));
  WeightedGraph out = graph;
  auto nbrs = graph.neighbors(spec.node);
  auto base = graph.out_weights(spec.node);
  for (std::size_t e = 0; e < k; ++e) {
    const double w = std::clamp(base[e] + spec.differences[e], 0.0, 1.0);
    out.set_weight(spec.node, nbrs[e], w);
  }
  return out;
}

double difference_measure(const WeightedGraph& graph, std::size_t node) {
  const std::size_t k = graph.degree(node);
  if (k == 0) throw ParamError("difference measure undefined for a degree-0 node");
  auto nbrs = graph.neighbors(node);
  auto out_w = graph.out_weights(node);
  double sum = 0.0;
  for (std::size_t e = 0; e < k; ++e) sum += out_w[e] - graph.weight(nbrs[e], node);
  return sum / static_cast<double>(k);
}

std::map<long, double> difference_distribution(const WeightedGraph& graph, std::size_t node,
                                               double bin_width) {
  const std::size_t k = graph.degree(node);
  if (k == 0) throw ParamError("difference distribution undefined for a degree-0 node");
  if (!(bin_width > 0.0)) throw ParamError("bin width must be positive");
  auto nbrs = graph.neighbors(node);
  auto out_w = graph.out_weights(node);
  std::map<long, double> bins;
  const double mass = 1.0 / static_cast<double>(k);
  for (std::size_t e = 0; e < k; ++e) {
    const double d = out_w[e] - graph.weight(nbrs[e], node);
    // bin m covers [(m - 1/2) bw, (m + 1/2) bw): 0 is a bin center
    const long m = static_cast<long>(std::floor(d / bin_width + 0.5));
    bins[m] += mass;
  }
  return bins;
}

double nodal_entropy(const std::map<long, double>& distribution) {
  double total = 0.0;
  for (const auto& [bin, p] : distribution) {
    if (p < 0.0) throw ParamError("distribution has negative mass");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ParamError("distribution does not sum to 1 (sum = " + std::to_string(total) + ")");
  double s = 0.0;
  for (const auto& [bin, p] : distribution)
    if (p > 0.0) s -= p * std::log(p);
  return s;
}

NodeMetrics node_metrics(const WeightedGraph& graph, std::size_t node, double bin_width) {
  NodeMetrics m;
  m.bin_width = bin_width;
  m.d_value = difference_measure(graph, node);
  m.distribution = difference_distribution(graph, node, bin_width);
  m.entropy = nodal_entropy(m.distribution);
  return m;
}

namespace {

double profile_entropy(const std::vector<std::size_t>& counts, std::size_t k) {
  double s = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(k);
    s -= p * std::log(p);
  }
  return s;
}

}  // namespace

std::vector<double> make_difference_multiset(std::size_t degree, double d_target,
                                             double s_target, double level_spacing) {
  if (degree == 0) throw ParamError("cannot build a multiset for a degree-0 node");
  if (s_target < 0.0) throw ParamError("entropy target must be nonnegative");
  if (!(level_spacing > 0.0)) throw ParamError("level spacing must be positive");

  // Search multiplicity profiles (c0, even split of the rest over m-1
  // levels) for the entropy closest to the target.
  std::vector<std::size_t> best = {degree};
  double best_err = std::abs(s_target - 0.0);
  const std::size_t m_cap = std::min<std::size_t>(degree, 12);
  for (std::size_t m = 2; m <= m_cap; ++m) {
    for (std::size_t c0 = 1; c0 + (m - 1) <= degree; ++c0) {
      const std::size_t rest = degree - c0;
      std::vector<std::size_t> counts = {c0};
      for (std::size_t lvl = 0; lvl < m - 1; ++lvl)
        counts.push_back(rest / (m - 1) + (lvl < rest % (m - 1) ? 1 : 0));
      const double err = std::abs(profile_entropy(counts, degree) - s_target);
      if (err < best_err - 1e-12) {
        best_err = err;
        best = counts;
      }
    }
  }

  // Levels at level_spacing * (index - weighted mean index), shifted by
  // d_target: the count-weighted mean difference is d_target exactly.
  double mean_index = 0.0;
  for (std::size_t i = 0; i < best.size(); ++i)
    mean_index += static_cast<double>(best[i]) * static_cast<double>(i);
  mean_index /= static_cast<double>(degree);

  std::vector<double> multiset;
  multiset.reserve(degree);
  for (std::size_t i = 0; i < best.size(); ++i) {
    const double level = d_target + level_spacing * (static_cast<double>(i) - mean_index);
    multiset.insert(multiset.end(), best[i], level);
  }
  return multiset;
}

}  // namespace epiwalk
