#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace epiwalk {

enum class BondTag : std::uint8_t { Short = 0, Long = 1 };

/// Parameters of the geometric small-world construction: bonds form with
/// probability p_r between points closer than r and with probability p_R
/// between points farther apart than R. Pairs at distance in [r, R] never
/// bond; ties at exactly r or R are excluded from both classes.
struct GraphParams {
  std::size_t n_nodes = 0;
  double r = 0.0;    // short-distance radius
  double p_r = 0.0;  // short-bond formation probability
  double R = 0.0;    // long-distance radius
  double p_R = 0.0;  // long-bond formation probability
  std::uint64_t seed = 0;

  void validate() const;  // throws ParamError
};

struct Bond {
  std::uint32_t i;
  std::uint32_t j;  // i < j
  BondTag tag;
};

/// Undirected geometric graph with a directed transmission weight on each
/// half-edge. Immutable in spirit: the weights module returns modified
/// copies. Adjacency is CSR with neighbor lists sorted ascending; that
/// ordering is the canonical edge order used everywhere.
class WeightedGraph {
public:
  WeightedGraph() = default;
  WeightedGraph(std::vector<std::array<double, 2>> positions,
                std::vector<Bond> bonds,
                std::optional<GraphParams> params = std::nullopt);

  std::size_t n() const { return positions_.size(); }
  std::size_t n_bonds() const { return bonds_.size(); }
  const std::vector<std::array<double, 2>>& positions() const { return positions_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const std::optional<GraphParams>& params() const { return params_; }

  std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {adj_.data() + offsets_[i], degree(i)};
  }
  std::span<const double> out_weights(std::size_t i) const {
    return {out_w_.data() + offsets_[i], degree(i)};
  }
  std::span<const std::uint8_t> edge_is_long(std::size_t i) const {
    return {edge_long_.data() + offsets_[i], degree(i)};
  }

  bool has_bond(std::size_t i, std::size_t j) const;
  /// w_ij; 0 if {i,j} is not a bond.
  double weight(std::size_t i, std::size_t j) const;
  void set_weight(std::size_t i, std::size_t j, double w);  // bond must exist
  double out_weight_sum(std::size_t i) const;

  std::size_t degree_sum() const { return degree_sum_; }
  std::size_t k_max() const { return k_max_; }
  double avg_degree() const {
    return n() == 0 ? 0.0 : static_cast<double>(degree_sum_) / static_cast<double>(n());
  }

private:
  std::size_t edge_index(std::size_t i, std::size_t j) const;  // throws ParamError if absent

  std::vector<std::array<double, 2>> positions_;
  std::vector<Bond> bonds_;  // sorted by (i, j)
  std::optional<GraphParams> params_;

  std::vector<std::size_t> offsets_;     // n+1
  std::vector<std::uint32_t> adj_;       // ascending per node
  std::vector<double> out_w_;            // w_{i, adj_[..]}
  std::vector<std::uint8_t> edge_long_;  // tag per directed entry
  std::size_t degree_sum_ = 0;
  std::size_t k_max_ = 0;
};

/// Random placement + distance-thresholded bonding. Deterministic per seed;
/// positions, short bonds and long bonds use independent derived RNG streams,
/// so p_R = 0 yields exactly the same short structure as p_R > 0.
/// `pinned_positions` bypasses random placement for exact small tests.
WeightedGraph generate_graph(
    const GraphParams& params,
    std::optional<std::vector<std::array<double, 2>>> pinned_positions = std::nullopt);

struct DegreeProfile {
  std::map<std::size_t, double> pk;  // degree -> fraction of nodes
  double avg_degree = 0.0;
  std::size_t k_max = 0;
};

DegreeProfile degree_profile(const WeightedGraph& graph);

/// Solves for the bond probability that hits `target_mean_degree` given the
/// actual number of candidate pairs in the point set (short: dist < r,
/// long: dist > R). Returns the clamped probability.
double calibrate_bond_probability(std::span<const std::array<double, 2>> positions,
                                  double radius, bool long_range,
                                  double target_mean_degree);

void save_graph(const WeightedGraph& graph, const std::string& path);
WeightedGraph load_graph(const std::string& path);

/// Canonical serialization (also the on-disk format, 12 decimal digits).
std::string serialize_graph(const WeightedGraph& graph);
WeightedGraph parse_graph(const std::string& text);

/// FNV-1a over the canonical serialization; the graph-comparison operation.
std::uint64_t graph_hash(const WeightedGraph& graph);

}  // namespace epiwalk
