#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "epiwalk/engine.hpp"
#include "epiwalk/graph.hpp"
#include "epiwalk/rng.hpp"

namespace epiwalk::testing {

// four nodes pinned at the unit-square corners; r = 1.5 > sqrt(2) -> K4
inline WeightedGraph make_k4(double p_r = 1.0) {
  GraphParams params{4, 1.5, p_r, 1.5, 0.0, 1};
  std::vector<std::array<double, 2>> corners = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  return generate_graph(params, corners);
}

// path 0-1-2 built directly, all bonds short
inline WeightedGraph make_path3() {
  std::vector<std::array<double, 2>> pos = {{0.1, 0.5}, {0.5, 0.5}, {0.9, 0.5}};
  std::vector<Bond> bonds = {{0, 1, BondTag::Short}, {1, 2, BondTag::Short}};
  return WeightedGraph(pos, bonds);
}

inline WeightedGraph make_path(std::size_t n) {
  std::vector<std::array<double, 2>> pos(n);
  for (std::size_t i = 0; i < n; ++i)
    pos[i] = {static_cast<double>(i) / static_cast<double>(n), 0.5};
  std::vector<Bond> bonds;
  for (std::size_t i = 0; i + 1 < n; ++i)
    bonds.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + 1),
                     BondTag::Short});
  return WeightedGraph(pos, bonds);
}

// ring of n nodes on a circle, every node degree 2
inline WeightedGraph make_ring(std::size_t n) {
  std::vector<std::array<double, 2>> pos(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 6.283185307179586 * static_cast<double>(i) / static_cast<double>(n);
    pos[i] = {0.5 + 0.4 * std::cos(a), 0.5 + 0.4 * std::sin(a)};
  }
  std::vector<Bond> bonds;
  for (std::size_t i = 0; i < n; ++i)
    bonds.push_back({static_cast<std::uint32_t>(std::min(i, (i + 1) % n)),
                     static_cast<std::uint32_t>(std::max(i, (i + 1) % n)), BondTag::Short});
  return WeightedGraph(pos, bonds);
}

// star: node 0 in the center, k leaves; leaf `long_leaves` of them tagged long
inline WeightedGraph make_star(std::size_t k, std::size_t long_leaves = 0) {
  std::vector<std::array<double, 2>> pos(k + 1);
  pos[0] = {0.5, 0.5};
  for (std::size_t i = 1; i <= k; ++i) {
    const double a = 6.283185307179586 * static_cast<double>(i) / static_cast<double>(k);
    pos[i] = {0.5 + 0.3 * std::cos(a), 0.5 + 0.3 * std::sin(a)};
  }
  std::vector<Bond> bonds;
  for (std::size_t i = 1; i <= k; ++i)
    bonds.push_back({0, static_cast<std::uint32_t>(i),
                     i > k - long_leaves ? BondTag::Long : BondTag::Short});
  return WeightedGraph(pos, bonds);
}

// random connected-ish geometric graph with random asymmetric weights in
// [w_lo, w_hi]; n in [2, n_max]
inline WeightedGraph random_small_graph(Rng& rng, std::size_t n_max = 10, double w_lo = 0.01,
                                        double w_hi = 0.25) {
  for (;;) {
    const std::size_t n = 2 + rng.below(n_max - 1);
    GraphParams params{n, rng.uniform(0.4, 1.4), rng.uniform(0.3, 1.0), 1.41, 0.0,
                       rng.raw()()};
    WeightedGraph g = generate_graph(params);
    bool has_edge = g.n_bonds() > 0;
    if (!has_edge) continue;
    for (const auto& b : g.bonds()) {
      g.set_weight(b.i, b.j, rng.uniform(w_lo, w_hi));
      g.set_weight(b.j, b.i, rng.uniform(w_lo, w_hi));
    }
    return g;
  }
}

inline std::size_t first_nonisolated(const WeightedGraph& g) {
  for (std::size_t i = 0; i < g.n(); ++i)
    if (g.degree(i) > 0) return i;
  return g.n();
}

}  // namespace epiwalk::testing
