#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "epiwalk/graph.hpp"
#include "epiwalk/rng.hpp"

namespace epiwalk {

/// State of the integer-walker SIS engine. Walkers are conserved: they only
/// move, so the total stays at N_walkers = t_max * degree_sum forever.
struct EpidemicState {
  std::size_t time = 0;
  std::vector<std::uint8_t> infected;      // I_i(t)
  std::vector<std::int64_t> walkers;       // integer counts
  std::vector<std::uint8_t> ever_infected;
  std::int64_t n_walkers = 0;
  std::size_t t_max = 0;
  static constexpr std::size_t tau_inf = 1;  // only supported value

  /// eta_i(t) = walkers_i / N_walkers
  double eta(std::size_t i) const {
    return static_cast<double>(walkers[i]) / static_cast<double>(n_walkers);
  }
  std::vector<double> eta_vector() const;
};

/// Column-stochastic matrix of normalized weights:
/// T_ij = w_ji / sum_m w_jm for j a neighbor of i. Columns of nodes with
/// zero outgoing weight sum are flagged and act as identity (mass stays put),
/// matching the engine's treatment of such nodes.
class TransferMatrix {
public:
  TransferMatrix() = default;
  explicit TransferMatrix(const WeightedGraph& graph);

  std::size_t n() const { return col_offsets_.empty() ? 0 : col_offsets_.size() - 1; }
  bool zero_column(std::size_t j) const { return zero_col_[j] != 0; }
  double column_sum(std::size_t j) const;

  /// y = T x (flagged columns contribute x_j to row j).
  std::vector<double> apply(const std::vector<double>& x) const;

  /// Entry T_ij (dense lookup, test use).
  double entry(std::size_t i, std::size_t j) const;

private:
  // CSC: column j holds rows / values for all neighbors i of j.
  std::vector<std::size_t> col_offsets_;
  std::vector<std::uint32_t> rows_;
  std::vector<double> values_;
  std::vector<std::uint8_t> zero_col_;
};

TransferMatrix build_transfer_matrix(const WeightedGraph& graph);

/// Per-step infection indicators plus running cumulative counts.
struct InfectionTrace {
  std::vector<std::vector<std::uint8_t>> steps;  // steps[t][i] = I_i(t)
  std::vector<std::int64_t> cumulative;          // sum over recorded steps, per node

  void append(const std::vector<std::uint8_t>& indicators);
  std::size_t n_steps() const { return steps.size(); }
};

/// t_max * k_i walkers at every node; only `initial_node` infected.
EpidemicState init_state(const WeightedGraph& graph, std::size_t initial_node,
                         std::size_t t_max);

/// One synchronous stochastic step. For each node infected at time t, one
/// walker per incident bond attempts the directed edge (i,j) and crosses with
/// probability w_ij. Any node receiving at least one walker is infected at
/// t+1 (reinfection wins over recovery); infected nodes without an arrival
/// recover.
void step_stochastic(EpidemicState& state, const WeightedGraph& graph, Rng& rng);

/// C_ij = (k_i / degree_sum) * w_ij / sum_m w_im.
double edge_current(const WeightedGraph& graph, std::size_t i, std::size_t j);

/// One mean-flow step: eta_i(t+1) = eta_i(t) + J_i^-(t) - J_i^+(t) with the
/// edge currents above. Infected nodes with zero outgoing weight sum move
/// nothing.
std::vector<double> step_meanflow(const std::vector<double>& eta,
                                  const std::vector<std::uint8_t>& infected_t,
                                  const WeightedGraph& graph, std::size_t t_max);

/// Closed form equal to iterating step_meanflow over the trace:
///   eta = eta0 + (T v - v) / t_max,  v = cumulative_trace (.) eta0
/// (elementwise product of the cumulative infection counts with eta0).
std::vector<double> masterflow_closed_form(const std::vector<double>& eta0,
                                           const std::vector<std::int64_t>& cumulative_trace,
                                           const TransferMatrix& transfer, std::size_t t_max);

enum class StopPolicy { RunToTmax, StopOnExtinction };

struct RunOptions {
  StopPolicy stop = StopPolicy::StopOnExtinction;
  bool record_history = true;  // keep per-step walker counts (needed by verify/analyze)
};

struct RunResult {
  InfectionTrace trace;                                  // I(0) .. I(T)
  std::vector<std::vector<std::int64_t>> walker_history; // per recorded step, if requested
  EpidemicState final_state;
  std::optional<std::size_t> extinct_at;                 // first t with empty infected set
};

RunResult run(const WeightedGraph& graph, std::size_t initial_node, std::size_t t_max,
              Rng& rng, const RunOptions& options = {});

}  // namespace epiwalk
