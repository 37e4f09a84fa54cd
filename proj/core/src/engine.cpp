#include "epiwalk/engine.hpp"

#include <algorithm>
#include <numeric>

#include "epiwalk/errors.hpp"

namespace epiwalk {

std::vector<double> EpidemicState::eta_vector() const {
  std::vector<double> eta(walkers.size());
  for (std::size_t i = 0; i < walkers.size(); ++i)
    eta[i] = static_cast<double>(walkers[i]) / static_cast<double>(n_walkers);
  return eta;
}

TransferMatrix::TransferMatrix(const WeightedGraph& graph) {
  const std::size_t n = graph.n();
  col_offsets_.assign(n + 1, 0);
  zero_col_.assign(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    const double wsum = graph.out_weight_sum(j);
    if (wsum <= 0.0) {
      zero_col_[j] = 1;
      col_offsets_[j + 1] = col_offsets_[j];
      continue;
    }
    col_offsets_[j + 1] = col_offsets_[j] + graph.degree(j);
  }
  rows_.reserve(col_offsets_[n]);
  values_.reserve(col_offsets_[n]);
  for (std::size_t j = 0; j < n; ++j) {
    if (zero_col_[j]) continue;
    const double wsum = graph.out_weight_sum(j);
    auto nbrs = graph.neighbors(j);
    auto w = graph.out_weights(j);
    for (std::size_t e = 0; e < nbrs.size(); ++e) {
      rows_.push_back(nbrs[e]);
      values_.push_back(w[e] / wsum);  // T_{nbrs[e], j} = w_{j,nbr} / sum
    }
  }
}

double TransferMatrix::column_sum(std::size_t j) const {
  double s = 0.0;
  for (std::size_t e = col_offsets_[j]; e < col_offsets_[j + 1]; ++e) s += values_[e];
  return s;
}

std::vector<double> TransferMatrix::apply(const std::vector<double>& x) const {
  if (x.size() != n()) throw ParamError("transfer matrix dimension mismatch");
  std::vector<double> y(n(), 0.0);
  for (std::size_t j = 0; j < n(); ++j) {
    if (zero_col_[j]) {
      y[j] += x[j];  // flagged column keeps its mass in place
      continue;
    }
    const double xj = x[j];
    for (std::size_t e = col_offsets_[j]; e < col_offsets_[j + 1]; ++e)
      y[rows_[e]] += values_[e] * xj;
  }
  return y;
}

double TransferMatrix::entry(std::size_t i, std::size_t j) const {
  for (std::size_t e = col_offsets_[j]; e < col_offsets_[j + 1]; ++e)
    if (rows_[e] == i) return values_[e];
  return 0.0;
}

TransferMatrix build_transfer_matrix(const WeightedGraph& graph) {
  return TransferMatrix(graph);
}

void InfectionTrace::append(const std::vector<std::uint8_t>& indicators) {
  if (cumulative.empty()) cumulative.assign(indicators.size(), 0);
  if (indicators.size() != cumulative.size())
    throw ParamError("trace dimension mismatch");
  steps.push_back(indicators);
  for (std::size_t i = 0; i < indicators.size(); ++i) cumulative[i] += indicators[i];
}

EpidemicState init_state(const WeightedGraph& graph, std::size_t initial_node,
                         std::size_t t_max) {
  if (initial_node >= graph.n()) throw ParamError("initial node out of range");
  if (graph.degree(initial_node) == 0)
    throw ParamError("cannot seed the epidemic at a degree-0 node");
  if (t_max < 1) throw ParamError("t_max must be at least 1");

  EpidemicState state;
  state.time = 0;
  state.t_max = t_max;
  const std::size_t n = graph.n();
  state.infected.assign(n, 0);
  state.ever_infected.assign(n, 0);
  state.infected[initial_node] = 1;
  state.ever_infected[initial_node] = 1;
  state.walkers.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    state.walkers[i] = static_cast<std::int64_t>(t_max) *
                       static_cast<std::int64_t>(graph.degree(i));
  state.n_walkers = static_cast<std::int64_t>(t_max) *
                    static_cast<std::int64_t>(graph.degree_sum());
  return state;
}

void step_stochastic(EpidemicState& state, const WeightedGraph& graph, Rng& rng) {
  const std::size_t n = graph.n();
  if (state.walkers.size() != n) throw ParamError("state/graph dimension mismatch");

  std::vector<std::int64_t> delta(n, 0);
  std::vector<std::uint8_t> arrival(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!state.infected[i]) continue;
    const std::size_t k = graph.degree(i);
    if (state.walkers[i] < static_cast<std::int64_t>(k))
      throw InvariantViolation("node " + std::to_string(i) +
                               " has fewer walkers than incident bonds at step " +
                               std::to_string(state.time));
    auto nbrs = graph.neighbors(i);
    auto w = graph.out_weights(i);
    for (std::size_t e = 0; e < k; ++e) {
      if (w[e] <= 0.0) continue;
      if (rng.uniform() < w[e]) {
        --delta[i];
        ++delta[nbrs[e]];
        arrival[nbrs[e]] = 1;
      }
    }
  }

  std::int64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    state.walkers[i] += delta[i];
    if (state.walkers[i] < 0)
      throw InvariantViolation("walker count underflow at node " + std::to_string(i));
    total += state.walkers[i];
    state.infected[i] = arrival[i];  // recovery unless reinfected by an arrival
    if (arrival[i]) state.ever_infected[i] = 1;
  }
  if (total != state.n_walkers)
    throw InvariantViolation("walker conservation broken: " + std::to_string(total) + " != " +
                             std::to_string(state.n_walkers));
  ++state.time;
}

double edge_current(const WeightedGraph& graph, std::size_t i, std::size_t j) {
  if (!graph.has_bond(i, j)) throw ParamError("edge current requested for a non-bond");
  const double wsum = graph.out_weight_sum(i);
  if (wsum <= 0.0)
    throw ParamError("edge current undefined: node has all-zero outgoing weights");
  const double ki = static_cast<double>(graph.degree(i));
  const double sum_k = static_cast<double>(graph.degree_sum());
  return (ki / sum_k) * (graph.weight(i, j) / wsum);
}

std::vector<double> step_meanflow(const std::vector<double>& eta,
                                  const std::vector<std::uint8_t>& infected_t,
                                  const WeightedGraph& graph, std::size_t t_max) {
  const std::size_t n = graph.n();
  if (eta.size() != n || infected_t.size() != n)
    throw ParamError("mean-flow dimension mismatch");
  std::vector<double> next = eta;
  const double sum_k = static_cast<double>(graph.degree_sum());
  for (std::size_t i = 0; i < n; ++i) {
    if (!infected_t[i]) continue;
    const double wsum = graph.out_weight_sum(i);
    if (wsum <= 0.0) continue;  // flagged node: no currents
    const double out = static_cast<double>(graph.degree(i)) /
                       (sum_k * static_cast<double>(t_max));
    auto nbrs = graph.neighbors(i);
    auto w = graph.out_weights(i);
    for (std::size_t e = 0; e < nbrs.size(); ++e) next[nbrs[e]] += out * (w[e] / wsum);
    next[i] -= out;
  }
  return next;
}

std::vector<double> masterflow_closed_form(const std::vector<double>& eta0,
                                           const std::vector<std::int64_t>& cumulative_trace,
                                           const TransferMatrix& transfer, std::size_t t_max) {
  const std::size_t n = transfer.n();
  if (eta0.size() != n || cumulative_trace.size() != n)
    throw ParamError("master equation dimension mismatch");
  // v = cumulative trace (.) eta0; eta = eta0 + (T v - v) / t_max
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(cumulative_trace[i]) * eta0[i];
  std::vector<double> tv = transfer.apply(v);
  std::vector<double> eta(n);
  const double inv_t = 1.0 / static_cast<double>(t_max);
  for (std::size_t i = 0; i < n; ++i) eta[i] = eta0[i] + (tv[i] - v[i]) * inv_t;
  return eta;
}

RunResult run(const WeightedGraph& graph, std::size_t initial_node, std::size_t t_max,
              Rng& rng, const RunOptions& options) {
  RunResult result;
  EpidemicState state = init_state(graph, initial_node, t_max);
  result.trace.append(state.infected);
  if (options.record_history) result.walker_history.push_back(state.walkers);

  for (std::size_t t = 0; t < t_max; ++t) {
    step_stochastic(state, graph, rng);
    result.trace.append(state.infected);
    if (options.record_history) result.walker_history.push_back(state.walkers);
    const bool extinct =
        std::none_of(state.infected.begin(), state.infected.end(), [](std::uint8_t v) { return v != 0; });
    if (extinct) {
      if (!result.extinct_at) result.extinct_at = state.time;
      if (options.stop == StopPolicy::StopOnExtinction) break;
    }
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace epiwalk
