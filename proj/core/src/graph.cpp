#include "epiwalk/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "epiwalk/errors.hpp"
#include "epiwalk/io.hpp"
#include "epiwalk/rng.hpp"

namespace epiwalk {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

double dist(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

void GraphParams::validate() const {
  if (n_nodes == 0) throw ParamError("empty population: n_nodes must be positive");
  if (p_r < 0.0 || p_r > 1.0) throw ParamError("p_r must be in [0,1]");
  if (p_R < 0.0 || p_R > 1.0) throw ParamError("p_R must be in [0,1]");
  if (!(r > 0.0)) throw ParamError("short radius r must be positive");
  if (R < r) throw ParamError("long radius R must satisfy r <= R");
  // r itself may exceed sqrt(2) (useful for complete graphs); R is capped at
  // the unit-square diagonal only when long bonds are actually possible.
  if (p_R > 0.0 && R > kSqrt2) throw ParamError("long radius R exceeds the unit-square diagonal");
}

WeightedGraph::WeightedGraph(std::vector<std::array<double, 2>> positions,
                             std::vector<Bond> bonds,
                             std::optional<GraphParams> params)
    : positions_(std::move(positions)), bonds_(std::move(bonds)), params_(std::move(params)) {
  const std::size_t n = positions_.size();
  for (auto& b : bonds_) {
    if (b.i == b.j) throw ParamError("self-loop bond");
    if (b.i > b.j) std::swap(b.i, b.j);
    if (b.j >= n) throw ParamError("bond endpoint out of range");
  }
  std::sort(bonds_.begin(), bonds_.end(),
            [](const Bond& a, const Bond& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  for (std::size_t e = 1; e < bonds_.size(); ++e)
    if (bonds_[e].i == bonds_[e - 1].i && bonds_[e].j == bonds_[e - 1].j)
      throw ParamError("duplicate bond");

  std::vector<std::size_t> deg(n, 0);
  for (const auto& b : bonds_) {
    ++deg[b.i];
    ++deg[b.j];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  degree_sum_ = offsets_[n];
  k_max_ = deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());

  adj_.assign(degree_sum_, 0);
  out_w_.assign(degree_sum_, 0.0);
  edge_long_.assign(degree_sum_, 0);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& b : bonds_) {
    const std::uint8_t lng = b.tag == BondTag::Long ? 1 : 0;
    adj_[cursor[b.i]] = b.j;
    edge_long_[cursor[b.i]++] = lng;
    adj_[cursor[b.j]] = b.i;
    edge_long_[cursor[b.j]++] = lng;
  }
  // bonds_ sorted by (i,j) already leaves each neighbor list ascending for the
  // i side; the j side needs a per-node sort.
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<std::uint32_t, std::uint8_t>> row;
    row.reserve(deg[i]);
    for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e)
      row.emplace_back(adj_[e], edge_long_[e]);
    std::sort(row.begin(), row.end());
    for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e) {
      adj_[e] = row[e - offsets_[i]].first;
      edge_long_[e] = row[e - offsets_[i]].second;
    }
  }
}

std::size_t WeightedGraph::edge_index(std::size_t i, std::size_t j) const {
  auto nb = neighbors(i);
  auto it = std::lower_bound(nb.begin(), nb.end(), static_cast<std::uint32_t>(j));
  if (it == nb.end() || *it != j) throw ParamError("no bond between requested nodes");
  return offsets_[i] + static_cast<std::size_t>(it - nb.begin());
}

bool WeightedGraph::has_bond(std::size_t i, std::size_t j) const {
  auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), static_cast<std::uint32_t>(j));
}

double WeightedGraph::weight(std::size_t i, std::size_t j) const {
  if (!has_bond(i, j)) return 0.0;
  return out_w_[edge_index(i, j)];
}

void WeightedGraph::set_weight(std::size_t i, std::size_t j, double w) {
  if (w < 0.0 || w > 1.0) throw ParamError("weight outside [0,1]");
  out_w_[edge_index(i, j)] = w;
}

double WeightedGraph::out_weight_sum(std::size_t i) const {
  double s = 0.0;
  for (double w : out_weights(i)) s += w;
  return s;
}

WeightedGraph generate_graph(const GraphParams& params,
                             std::optional<std::vector<std::array<double, 2>>> pinned_positions) {
  params.validate();

  std::vector<std::array<double, 2>> positions;
  if (pinned_positions) {
    if (pinned_positions->size() != params.n_nodes)
      throw ParamError("pinned position count does not match n_nodes");
    positions = std::move(*pinned_positions);
  } else {
    Rng pos_rng(seed_combine(params.seed, "positions"));
    positions.resize(params.n_nodes);
    for (auto& p : positions) {
      p[0] = pos_rng.uniform();
      p[1] = pos_rng.uniform();
    }
  }

  // Independent streams for the two bond classes: the short structure is
  // identical whether or not long bonds are switched on.
  Rng short_rng(seed_combine(params.seed, "short-bonds"));
  Rng long_rng(seed_combine(params.seed, "long-bonds"));

  std::vector<Bond> bonds;
  const std::size_t n = params.n_nodes;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = dist(positions[i], positions[j]);
      if (d < params.r) {
        if (params.p_r > 0.0 && short_rng.bernoulli(params.p_r))
          bonds.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                           BondTag::Short});
      } else if (d > params.R) {
        if (params.p_R > 0.0 && long_rng.bernoulli(params.p_R))
          bonds.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                           BondTag::Long});
      }
      // distance in [r, R] (ties included): never a bond
    }
  }
  return WeightedGraph(std::move(positions), std::move(bonds), params);
}

DegreeProfile degree_profile(const WeightedGraph& graph) {
  DegreeProfile profile;
  const std::size_t n = graph.n();
  if (n == 0) return profile;
  for (std::size_t i = 0; i < n; ++i) profile.pk[graph.degree(i)] += 1.0;
  for (auto& [k, v] : profile.pk) {
    v /= static_cast<double>(n);
    profile.avg_degree += static_cast<double>(k) * v;
    profile.k_max = std::max(profile.k_max, k);
  }
  return profile;
}

double calibrate_bond_probability(std::span<const std::array<double, 2>> positions,
                                  double radius, bool long_range,
                                  double target_mean_degree) {
  if (target_mean_degree < 0.0) throw ParamError("target mean degree must be nonnegative");
  const std::size_t n = positions.size();
  std::size_t candidates = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = dist(positions[i], positions[j]);
      if (long_range ? d > radius : d < radius) ++candidates;
    }
  if (candidates == 0) return 0.0;
  // mean degree = 2 * p * candidates / n
  const double p = target_mean_degree * static_cast<double>(n) /
                   (2.0 * static_cast<double>(candidates));
  return std::clamp(p, 0.0, 1.0);
}

std::string serialize_graph(const WeightedGraph& graph) {
  std::ostringstream out;
  out << "{\n  \"version\": 1,\n";
  out << "  \"params\": ";
  if (graph.params()) {
    const auto& p = *graph.params();
    out << "{\"n\": " << p.n_nodes << ", \"r\": " << format_fixed(p.r)
        << ", \"pr\": " << format_fixed(p.p_r) << ", \"R\": " << format_fixed(p.R)
        << ", \"pR\": " << format_fixed(p.p_R) << ", \"seed\": " << p.seed << "},\n";
  } else {
    out << "null,\n";
  }
  out << "  \"positions\": [\n";
  for (std::size_t i = 0; i < graph.n(); ++i) {
    const auto& pos = graph.positions()[i];
    out << "    [" << format_fixed(pos[0]) << ", " << format_fixed(pos[1]) << "]"
        << (i + 1 < graph.n() ? "," : "") << "\n";
  }
  out << "  ],\n  \"edges\": [\n";
  const auto& bonds = graph.bonds();
  for (std::size_t e = 0; e < bonds.size(); ++e) {
    out << "    {\"i\": " << bonds[e].i << ", \"j\": " << bonds[e].j << ", \"tag\": \""
        << (bonds[e].tag == BondTag::Long ? "long" : "short") << "\"}"
        << (e + 1 < bonds.size() ? "," : "") << "\n";
  }
  out << "  ],\n  \"weights\": [\n";
  // both directions per bond, ordered by (from, to)
  std::vector<std::pair<std::uint32_t, std::uint32_t>> directed;
  directed.reserve(2 * bonds.size());
  for (const auto& b : bonds) {
    directed.emplace_back(b.i, b.j);
    directed.emplace_back(b.j, b.i);
  }
  std::sort(directed.begin(), directed.end());
  for (std::size_t e = 0; e < directed.size(); ++e) {
    const auto [from, to] = directed[e];
    out << "    {\"from\": " << from << ", \"to\": " << to << ", \"w\": "
        << format_fixed(graph.weight(from, to)) << "}"
        << (e + 1 < directed.size() ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
  return out.str();
}

WeightedGraph parse_graph(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t byte = std::min(e.byte, text.size());
    const long line = 1 + static_cast<long>(std::count(text.begin(), text.begin() + byte, '\n'));
    throw ParseError(std::string("graph file parse error: ") + e.what(), line);
  }
  try {
    if (doc.at("version").get<int>() != 1) throw ParamError("unsupported graph file version");
    std::optional<GraphParams> params;
    if (!doc.at("params").is_null()) {
      const auto& p = doc["params"];
      params = GraphParams{p.at("n").get<std::size_t>(), p.at("r").get<double>(),
                           p.at("pr").get<double>(),    p.at("R").get<double>(),
                           p.at("pR").get<double>(),    p.at("seed").get<std::uint64_t>()};
    }
    std::vector<std::array<double, 2>> positions;
    for (const auto& pos : doc.at("positions"))
      positions.push_back({pos.at(0).get<double>(), pos.at(1).get<double>()});
    std::vector<Bond> bonds;
    for (const auto& e : doc.at("edges")) {
      const std::string tag = e.at("tag").get<std::string>();
      if (tag != "short" && tag != "long") throw ParamError("unknown edge tag: " + tag);
      bonds.push_back({e.at("i").get<std::uint32_t>(), e.at("j").get<std::uint32_t>(),
                       tag == "long" ? BondTag::Long : BondTag::Short});
    }
    WeightedGraph graph(std::move(positions), std::move(bonds), params);
    for (const auto& w : doc.at("weights")) {
      const double value = w.at("w").get<double>();
      if (value < 0.0 || value > 1.0)
        throw ParamError("weight outside [0,1]: " + std::to_string(value));
      graph.set_weight(w.at("from").get<std::size_t>(), w.at("to").get<std::size_t>(), value);
    }
    return graph;
  } catch (const nlohmann::json::exception& e) {
    throw ParamError(std::string("graph file schema error: ") + e.what());
  }
}

void save_graph(const WeightedGraph& graph, const std::string& path) {
  atomic_write(path, serialize_graph(graph));
}

WeightedGraph load_graph(const std::string& path) { return parse_graph(read_file(path)); }

std::uint64_t graph_hash(const WeightedGraph& graph) { return fnv1a64(serialize_graph(graph)); }

}  // namespace epiwalk
