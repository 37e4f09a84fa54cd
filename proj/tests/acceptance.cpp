// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every randomized corpus below runs from frozen seeds so the
// verdict is reproducible bit-for-bit.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "epiwalk/analysis.hpp"
#include "epiwalk/engine.hpp"
#include "epiwalk/graph.hpp"
#include "epiwalk/io.hpp"
#include "epiwalk/rng.hpp"
#include "epiwalk/sweep.hpp"
#include "epiwalk/weights.hpp"
#include "helpers.hpp"

using namespace epiwalk;
using namespace epiwalk::testing;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& title, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion-" << criterion << " " << title << ": "
            << detail << "\n";
  if (!ok) ++g_failures;
}

std::string fmt(double v, int prec = 6) {
  std::ostringstream out;
  out.precision(prec);
  out << v;
  return out.str();
}

// 6-node 3-regular circulant: ring edges plus the three diameters
WeightedGraph make_circulant6() {
  std::vector<std::array<double, 2>> pos(6);
  for (std::size_t i = 0; i < 6; ++i) {
    const double a = 6.283185307179586 * static_cast<double>(i) / 6.0;
    pos[i] = {0.5 + 0.4 * std::cos(a), 0.5 + 0.4 * std::sin(a)};
  }
  std::vector<Bond> bonds;
  for (std::uint32_t i = 0; i < 6; ++i)
    bonds.push_back({std::min(i, (i + 1) % 6u), std::max(i, (i + 1) % 6u), BondTag::Short});
  for (std::uint32_t i = 0; i < 3; ++i) bonds.push_back({i, i + 3, BondTag::Short});
  return WeightedGraph(pos, bonds);
}

void randomize_weights(WeightedGraph& g, Rng& rng, double lo, double hi) {
  for (const auto& b : g.bonds()) {
    g.set_weight(b.i, b.j, rng.uniform(lo, hi));
    g.set_weight(b.j, b.i, rng.uniform(lo, hi));
  }
}

// one-sided sign test: P(X >= wins) for X ~ Binomial(n, 1/2)
double sign_test_p(std::size_t wins, std::size_t n) {
  double p = 0.0;
  double log_half = std::log(0.5);
  for (std::size_t k = wins; k <= n; ++k) {
    double log_c = std::lgamma(double(n) + 1) - std::lgamma(double(k) + 1) -
                   std::lgamma(double(n - k) + 1);
    p += std::exp(log_c + double(n) * log_half);
  }
  return std::min(p, 1.0);
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// positions of a parameter set without any bonds (probe for calibration)
std::vector<std::array<double, 2>> probe_positions(GraphParams params) {
  params.p_r = 0.0;
  params.p_R = 0.0;
  return generate_graph(params).positions();
}

// ---------------------------------------------------------------------------
// criteria 1 + 4 share the random-small-graph run corpus
// ---------------------------------------------------------------------------

struct CorpusOutcome {
  bool conservation_exact = true;
  double worst_eta_gap = 0.0;       // stochastic sum-to-1, fp view
  double worst_flow_gap = 0.0;      // mean-flow sum-to-1
  std::size_t change_violations = 0;
  std::size_t lower_violations = 0;
  std::size_t kmax_form_violations = 0;  // informational: see the regular corpus
  std::size_t runs = 0;
};

CorpusOutcome run_random_corpus(std::uint64_t base_seed, std::size_t trials) {
  CorpusOutcome out;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng meta(seed_combine(base_seed, trial));
    WeightedGraph g = random_small_graph(meta, 10, 0.01, 0.25);
    const std::size_t t_max = 1 + meta.below(10);
    const std::size_t seed_node = first_nonisolated(g);
    Rng rng(meta.raw()());
    RunOptions opts;
    opts.stop = StopPolicy::RunToTmax;
    RunResult r = run(g, seed_node, t_max, rng, opts);
    ++out.runs;

    const std::int64_t expected =
        static_cast<std::int64_t>(t_max) * static_cast<std::int64_t>(g.degree_sum());
    std::vector<double> eta = init_state(g, seed_node, t_max).eta_vector();
    for (std::size_t t = 0; t < r.walker_history.size(); ++t) {
      const auto& w = r.walker_history[t];
      const std::int64_t total = std::accumulate(w.begin(), w.end(), std::int64_t{0});
      if (total != expected) out.conservation_exact = false;
      double eta_sum = 0.0;
      for (std::size_t i = 0; i < g.n(); ++i)
        eta_sum += static_cast<double>(w[i]) / static_cast<double>(expected);
      out.worst_eta_gap = std::max(out.worst_eta_gap, std::abs(eta_sum - 1.0));

      if (t + 1 < r.walker_history.size()) {
        eta = step_meanflow(eta, r.trace.steps[t], g, t_max);
        out.worst_flow_gap = std::max(
            out.worst_flow_gap, std::abs(std::accumulate(eta.begin(), eta.end(), 0.0) - 1.0));
      }
    }

    const BoundReport rep = check_bounds(r, g);
    for (const auto& v : rep.violations) {
      if (v.kind == "per-step-change")
        ++out.change_violations;
      else if (v.kind == "lower-refined")
        ++out.lower_violations;
      else
        ++out.kmax_form_violations;  // plug-in forms are asserted on the regular corpus
    }
  }
  return out;
}

// regular-graph corpus for the k_max-form bounds
std::size_t run_regular_corpus(std::uint64_t base_seed, std::size_t trials, bool& flagged_regular) {
  std::size_t violations = 0;
  flagged_regular = true;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng meta(seed_combine(base_seed, trial));
    WeightedGraph g = trial % 2 == 0 ? make_k4() : make_circulant6();
    randomize_weights(g, meta, 0.01, 0.10);
    const std::size_t t_max = 1 + meta.below(10);
    const std::size_t seed_node = meta.below(g.n());
    Rng rng(meta.raw()());
    RunOptions opts;
    opts.stop = StopPolicy::RunToTmax;
    RunResult r = run(g, seed_node, t_max, rng, opts);
    const BoundReport rep = check_bounds(r, g);
    flagged_regular &= rep.regular_graph;
    violations += rep.violations.size();
  }
  return violations;
}

}  // namespace

// ---------------------------------------------------------------------------

int main() {
  // ---- criteria 1 & 4: shared corpus ------------------------------------
  const CorpusOutcome corpus = run_random_corpus(0xC0FFEEULL, 10000);
  {
    const bool ok = corpus.conservation_exact && corpus.worst_eta_gap <= 1e-12 &&
                    corpus.worst_flow_gap <= 1e-12 && corpus.runs == 10000;
    report(1, "conservation & normalization", ok,
           fmt(double(corpus.runs), 6) + " runs, walkers " +
               (corpus.conservation_exact ? "exact" : "BROKEN") +
               ", max |sum eta - 1| stochastic " + fmt(corpus.worst_eta_gap, 3) +
               " mean-flow " + fmt(corpus.worst_flow_gap, 3));
  }

  {
    bool regular_flagged = false;
    const std::size_t reg_violations = run_regular_corpus(0xB0B0ULL, 10000, regular_flagged);

    // walkthrough values, T = 5, k_max = 3 (walker counts at sum_k = 12)
    const long lower_expected[] = {15, 12, 13, 10, 11, 8};
    const long upper_expected[] = {18, 15, 24, 21, 30};
    bool walkthrough = true;
    for (std::size_t t = 0; t <= 5; ++t)
      walkthrough &= std::abs(bound_lower_at(5, t, 3, 12) * 12 - double(lower_expected[t])) < 1e-9;
    for (std::size_t t = 1; t <= 5; ++t)
      walkthrough &=
          std::abs(bound_upper_at(5, t, 3, 12) * 12 - double(upper_expected[t - 1])) < 1e-9;
    walkthrough &= std::abs(bound_lower(5, 3, 12) * 12 - 8.0) < 1e-9;
    walkthrough &= std::abs(bound_upper(5, 3, 12) * 12 - 30.0) < 1e-9;

    // negative control: a corrupted history must produce a named violation
    WeightedGraph k4 = assign_baseline_weights(make_k4(), WeightPolicy{0.05, 0.05});
    Rng rng(17);
    RunOptions opts;
    opts.stop = StopPolicy::RunToTmax;
    RunResult bad = run(k4, 0, 6, rng, opts);
    bad.walker_history[2][1] += 500;
    const BoundReport bad_rep = check_bounds(bad, k4);
    bool control = false;
    for (const auto& v : bad_rep.violations) control |= v.kind == "per-step-change";

    const bool ok = corpus.change_violations == 0 && corpus.lower_violations == 0 &&
                    reg_violations == 0 && regular_flagged && walkthrough && control;
    report(4, "walker-density bounds", ok,
           "random corpus violations " + std::to_string(corpus.change_violations + corpus.lower_violations) +
               ", regular corpus violations " + std::to_string(reg_violations) +
               ", walkthrough " + (walkthrough ? "exact" : "BROKEN") + ", negative control " +
               (control ? "detected" : "MISSED"));
  }

  // ---- criterion 2: master-equation identity ----------------------------
  {
    double worst = 0.0;
    for (std::size_t trial = 0; trial < 1000; ++trial) {
      Rng meta(seed_combine(0xAB12ULL, trial));
      WeightedGraph g = random_small_graph(meta, 10, 0.01, 0.9);
      const std::size_t n = g.n();
      const std::size_t t_max = 2 + meta.below(8);
      EpidemicState s0 = init_state(g, first_nonisolated(g), t_max);
      const std::vector<double> eta0 = s0.eta_vector();
      TransferMatrix T(g);

      std::vector<double> eta = eta0;
      std::vector<std::int64_t> cum(n, 0);
      for (std::size_t t = 0; t < t_max; ++t) {
        std::vector<std::uint8_t> infected(n, 0);
        for (std::size_t i = 0; i < n; ++i)
          infected[i] = g.degree(i) > 0 && meta.bernoulli(0.4) ? 1 : 0;
        eta = step_meanflow(eta, infected, g, t_max);
        for (std::size_t i = 0; i < n; ++i) cum[i] += infected[i];
        const auto closed = masterflow_closed_form(eta0, cum, T, t_max);
        for (std::size_t i = 0; i < n; ++i)
          worst = std::max(worst, std::abs(closed[i] - eta[i]));
      }
    }
    report(2, "master-equation identity", worst <= 1e-12,
           "1000 graphs, componentwise max gap " + fmt(worst, 3));
  }

  // ---- criterion 3: stochastic vs enumerated, 3-node path w = 0.5 -------
  {
    WeightedGraph g = assign_baseline_weights(make_path3(), WeightPolicy{0.5, 0.5});
    const std::size_t trials = 100000;
    std::size_t combo[2][2] = {{0, 0}, {0, 0}};  // (I_0(1), I_2(1))
    std::size_t mid_at_2 = 0;                    // infected set at t=2 is exactly {1}
    std::int64_t arrivals0 = 0;                  // walkers crossing (1,0) in step 0
    std::size_t inf0_events = 0, crossings0 = 0; // node-0 infection events and sends
    RunOptions opts;
    opts.stop = StopPolicy::RunToTmax;
    for (std::size_t trial = 0; trial < trials; ++trial) {
      Rng rng(seed_combine(0x3A3AULL, trial));
      RunResult r = run(g, 1, 2, rng, opts);
      const auto& i1 = r.trace.steps[1];
      const auto& i2 = r.trace.steps[2];
      ++combo[i1[0]][i1[2]];
      if (i2[0] == 0 && i2[1] == 1 && i2[2] == 0) ++mid_at_2;
      arrivals0 += r.walker_history[1][0] - r.walker_history[0][0];
      if (i1[0]) {
        ++inf0_events;
        crossings0 += static_cast<std::size_t>(r.walker_history[1][0] - r.walker_history[2][0]);
      }
    }
    const double n = static_cast<double>(trials);
    const double tol_quarter = 3.0 * std::sqrt(0.25 * 0.75 / n);
    bool freq_ok = true;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        freq_ok &= std::abs(double(combo[a][b]) / n - 0.25) <= tol_quarter;
    const double p_mid = 7.0 / 16.0;
    freq_ok &= std::abs(double(mid_at_2) / n - p_mid) <=
               3.0 * std::sqrt(p_mid * (1 - p_mid) / n);

    // per-edge flux: one walker attempts, crosses w.p. w = 0.5
    const double flux_in = double(arrivals0) / n;  // per infection event of the middle
    const double flux_out = double(crossings0) / double(inf0_events);
    const bool flux_ok =
        std::abs(flux_in - 0.5) <= 3.0 * std::sqrt(0.25 / n) &&
        std::abs(flux_out - 0.5) <= 3.0 * std::sqrt(0.25 / double(inf0_events));
    report(3, "stochastic/mean consistency", freq_ok && flux_ok,
           "outcome freqs within 3 sigma of {1/4}, P(mid reinfected) " +
               fmt(double(mid_at_2) / n, 4) + " vs 7/16, flux " + fmt(flux_in, 4) + "/" +
               fmt(flux_out, 4) + " vs 0.5");
  }

  // ---- criterion 5: low-transmission non-outbreak ------------------------
  {
    const std::size_t n_seeds = 100;
    const std::vector<double> ws = {0.01, 0.03, 0.05, 0.10};
    GraphParams base{500, 0.15, 0.0, 1.41, 0.0, 0};
    base.seed = seed_combine(0x5EED5ULL, std::uint64_t{0});
    const double p_r = calibrate_bond_probability(probe_positions(base), 0.15, false, 25.0);

    std::vector<double> fractions;
    for (double w : ws) {
      std::size_t outbreaks = 0;
      for (std::size_t s = 0; s < n_seeds; ++s) {
        GraphParams params = base;
        params.p_r = p_r;
        params.seed = seed_combine(0x5EED5ULL, s);
        WeightedGraph g =
            assign_baseline_weights(generate_graph(params), WeightPolicy{w, w});
        const SeedSelection sel = select_seed_node(g, Scenario::NoLongDistance);
        Rng rng(seed_combine(seed_combine(0xF00DULL, s),
                             static_cast<std::uint64_t>(w * 1000)));
        RunOptions lean;
        lean.record_history = false;
        RunResult r = run(g, sel.node, 200, rng, lean);
        const double pr = participation_ratio(r.trace, g.n(), r.trace.n_steps() - 1);
        if (pr > 0.10) ++outbreaks;
      }
      fractions.push_back(double(outbreaks) / double(n_seeds));
    }

    bool monotone = true;
    std::size_t ties = 0;
    for (std::size_t i = 1; i < fractions.size(); ++i) {
      if (fractions[i] < fractions[i - 1]) monotone = false;
      if (fractions[i] == fractions[i - 1]) ++ties;
    }
    const bool ok = fractions[1] < fractions[3] && monotone && ties <= 1;
    std::string detail = "outbreak fractions";
    for (std::size_t i = 0; i < ws.size(); ++i)
      detail += " w=" + fmt(ws[i], 2) + ":" + fmt(fractions[i], 3);
    report(5, "low-transmission non-outbreak", ok, detail);
  }

  // ---- criterion 6: long-distance bonds drive PR and diameter up ---------
  {
    const std::size_t n_pairs = 80;
    GraphParams base{300, 0.15, 0.0, 0.5, 0.0, seed_combine(0x10D6ULL, std::uint64_t{0})};
    const auto layout = probe_positions(base);
    const double p_r = calibrate_bond_probability(layout, 0.15, false, 15.0);
    const double p_R = calibrate_bond_probability(layout, 0.5, true, 1.0);

    std::vector<double> pr_sw, pr_nl, diam_sw, diam_nl;
    for (std::size_t pair = 0; pair < n_pairs; ++pair) {
      for (int arm = 0; arm < 2; ++arm) {
        GraphParams params = base;
        params.p_r = p_r;
        params.p_R = arm == 0 ? p_R : 0.0;
        params.seed = seed_combine(0x10D6ULL, pair);
        WeightedGraph g =
            assign_baseline_weights(generate_graph(params), WeightPolicy{0.10, 0.30});
        const Scenario scen = arm == 0 ? Scenario::SmallWorld : Scenario::NoLongDistance;
        const SeedSelection sel = select_seed_node(g, scen);
        HeterogeneitySpec spec;
        spec.node = sel.node;
        spec.differences = make_difference_multiset(sel.degree, 0.3, 0.0);
        WeightedGraph h = inject_heterogeneity(g, spec);

        Rng rng(seed_combine(0xFA1ULL, pair));
        RunOptions lean;
        lean.record_history = false;
        RunResult r = run(h, sel.node, 8, rng, lean);
        const std::size_t last = r.trace.n_steps() - 1;
        const double pr = participation_ratio(r.trace, h.n(), last);
        const double dm = diameter(r.trace, h.positions(), sel.node, last);
        (arm == 0 ? pr_sw : pr_nl).push_back(pr);
        (arm == 0 ? diam_sw : diam_nl).push_back(dm);
      }
    }

    auto sign_test = [&](const std::vector<double>& a, const std::vector<double>& b) {
      std::size_t wins = 0, n_eff = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) continue;
        ++n_eff;
        if (a[i] > b[i]) ++wins;
      }
      return n_eff == 0 ? 1.0 : sign_test_p(wins, n_eff);
    };
    const double p_pr = sign_test(pr_sw, pr_nl);
    const double p_diam = sign_test(diam_sw, diam_nl);
    const bool ok = mean_of(pr_sw) >= mean_of(pr_nl) && mean_of(diam_sw) >= mean_of(diam_nl) &&
                    p_pr < 0.05 && p_diam < 0.05;
    report(6, "long-distance effect", ok,
           "mean PR " + fmt(mean_of(pr_sw), 3) + " vs " + fmt(mean_of(pr_nl), 3) +
               " (p=" + fmt(p_pr, 3) + "), mean Diam " + fmt(mean_of(diam_sw), 3) + " vs " +
               fmt(mean_of(diam_nl), 3) + " (p=" + fmt(p_diam, 3) + "), " +
               std::to_string(n_pairs) + " pairs");
  }

  // ---- criteria 7 & 9: sensitivity sweep ---------------------------------
  SweepConfig sweep7;
  sweep7.graph = {200, 0.15, 0.0, 1.41, 0.0, seed_combine(0x77EEULL, std::uint64_t{1})};
  {
    sweep7.graph.p_r =
        calibrate_bond_probability(probe_positions(sweep7.graph), 0.15, false, 20.0);
    sweep7.scenario = Scenario::NoLongDistance;
    sweep7.d_targets = {-0.5, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.5};
    sweep7.s_targets = {0.0, 0.3};
    sweep7.replicates = 25;
    sweep7.t_max = 50;
    sweep7.base_seed = 0x5117ULL;
    sweep7.w_short = sweep7.w_long = 0.5;
    SweepResult result = run_sweep(sweep7);

    auto cell_at = [&](double d, double s) -> const CellResult* {
      for (const auto& c : result.cells)
        if (std::abs(c.d_target - d) < 1e-9 && std::abs(c.s_target - s) < 1e-9) return &c;
      return nullptr;
    };
    double lo = 1.0, hi = 0.0;
    for (const auto& c : result.cells)
      if (!c.infeasible) {
        lo = std::min(lo, c.mean_pr);
        hi = std::max(hi, c.mean_pr);
      }
    const double range = hi - lo;

    bool ok = range > 0.5;  // the sweep must actually span outbreak regimes
    double worst_asym = 0.0;
    for (double s : {0.0, 0.3}) {
      for (double d : {0.1, 0.2, 0.3}) {
        const CellResult* plus = cell_at(d, s);
        const CellResult* minus = cell_at(-d, s);
        if (!plus || !minus || plus->infeasible || minus->infeasible) {
          ok = false;
          continue;
        }
        const double asym = std::abs(plus->mean_pr - minus->mean_pr);
        worst_asym = std::max(worst_asym, asym);
        if (asym >= 0.35 * range) ok = false;
      }
    }
    report(7, "quasi-symmetry about D=0", ok,
           "PR dynamic range " + fmt(range, 3) + ", worst |PR(+d)-PR(-d)| " + fmt(worst_asym, 3) +
               " (limit " + fmt(0.35 * range, 3) + ")");
  }

  // ---- criterion 8: transfer matrix --------------------------------------
  {
    double worst_col = 0.0;
    for (std::size_t trial = 0; trial < 1000; ++trial) {
      Rng meta(seed_combine(0x8888ULL, trial));
      WeightedGraph g = random_small_graph(meta, 10, 0.01, 0.99);
      TransferMatrix T(g);
      for (std::size_t j = 0; j < g.n(); ++j) {
        if (T.zero_column(j)) continue;
        worst_col = std::max(worst_col, std::abs(T.column_sum(j) - 1.0));
      }
    }

    double worst_residual = 0.0;
    {
      Rng meta(0);
      for (WeightedGraph g : {make_k4(), make_circulant6(), make_ring(12)}) {
        g = assign_baseline_weights(g, WeightPolicy{0.07, 0.07});
        EpidemicState s = init_state(g, 0, 5);
        worst_residual = std::max(worst_residual,
                                  non_outbreak_residual(TransferMatrix(g), s.eta_vector()));
      }
    }
    const bool ok = worst_col <= 1e-12 && worst_residual <= 1e-12;
    report(8, "transfer matrix", ok,
           "1000 graphs, max |column sum - 1| " + fmt(worst_col, 3) +
               ", regular symmetric-uniform residual " + fmt(worst_residual, 3));
  }

  // ---- criterion 9: byte-identical sweep re-runs -------------------------
  {
    SweepConfig c = sweep7;
    c.d_targets = {-0.1, 0.0, 0.2};
    c.s_targets = {0.0, 0.3};
    c.replicates = 8;
    c.t_max = 25;
    const fs::path base = fs::temp_directory_path() / "epiwalk_acceptance";
    fs::remove_all(base);
    const fs::path d1 = base / "a";
    const fs::path d2 = base / "b";
    c.workers = 1;
    export_surfaces(run_sweep(c), d1.string());
    c.workers = 4;
    export_surfaces(run_sweep(c), d2.string());

    bool identical = true;
    std::size_t n_files = 0;
    for (const auto& entry : fs::directory_iterator(d1)) {
      ++n_files;
      const fs::path other = d2 / entry.path().filename();
      identical &= fs::exists(other) &&
                   read_file(entry.path().string()) == read_file(other.string());
    }
    const bool ok = identical && n_files == 6;
    report(9, "reproducibility", ok,
           std::to_string(n_files) + " artifacts compared, " +
               (identical ? "byte-identical across worker counts" : "MISMATCH"));
    fs::remove_all(base);
  }

  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: " + std::to_string(g_failures))
            << "\n";
  return g_failures == 0 ? 0 : 1;
}
