// Copyright 2026 The MCB-MSN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance checks. With no arguments every criterion runs; `--only N`
// runs one. Prints one PASS/FAIL line per criterion and exits nonzero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mcb/beamforming.hpp"
#include "mcb/harness.hpp"
#include "mcb/lambert_w.hpp"
#include "mcb/optimizer.hpp"
#include "mcb/rng.hpp"
#include "mcb/routing.hpp"

#ifndef MCB_GOLDEN_DIR
#define MCB_GOLDEN_DIR "tests/golden"
#endif

using namespace mcb;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

template <typename... A>
std::string fmtn(const char* f, A... a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

// --- 1 ---------------------------------------------------------------------

Outcome popularity_caching() {
  Rng rng(101);
  int mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const int files = 1 + static_cast<int>(rng.below(10));
    const int cap = static_cast<int>(rng.below(6));
    const auto cat = zipf_popularity(files, rng.uniform(0.0, 2.0));
    double best = 0.0;
    for (unsigned mask = 0; mask < (1u << files); ++mask) {
      if (__builtin_popcount(mask) > cap) continue;
      double m = 0.0;
      for (int f = 0; f < files; ++f) {
        if (mask & (1u << f)) m += cat.popularity[f];
      }
      best = std::max(best, m);
    }
    const int caps[] = {cap};
    const auto cache = optimal_cache(cat, caps);
    double got = 0.0;
    int stored = 0;
    bool binary = true;
    for (int f = 0; f < files; ++f) {
      const double q = cache.q[0][f];
      binary = binary && (q == 0.0 || q == 1.0);
      if (q == 1.0) {
        got += cat.popularity[f];
        ++stored;
      }
    }
    if (!binary || stored > cap || got != best) ++mismatches;
  }
  return {mismatches == 0, fmtn("%d/200 catalogs differ from exhaustive search", mismatches)};
}

// --- 2 ---------------------------------------------------------------------

Outcome lambert_w() {
  const double lo = -std::exp(-1.0) + 1e-6, hi = 1e3;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    // Half the points on a linear scale, half spread geometrically.
    const double z = i < 500 ? lo + (1.0 - lo) * i / 499.0
                             : std::exp(std::log(1.0) + (std::log(hi) - std::log(1.0)) * (i - 500) / 499.0);
    const double w = lambert_w0(z);
    worst = std::max(worst, std::abs(w * std::exp(w) - z));
  }
  const bool anchors = lambert_w0(0.0) == 0.0 && std::abs(lambert_w0(std::exp(1.0)) - 1.0) <= 1e-12;
  return {worst <= 1e-12 && anchors, fmt("max |W e^W - z| = %.3g", worst)};
}

// --- 3 ---------------------------------------------------------------------

Outcome cluster_size() {
  Rng rng(303);
  double worst_res = 0.0, worst_rel = 0.0, worst_curv = -1e300;
  for (int t = 0; t < 100; ++t) {
    const double m = rng.uniform(1e-3, 1.0 - 1e-3);
    const double v = rng.uniform(0.0, 4.0);
    const double k = optimal_k(v, m);
    worst_res = std::max(worst_res, std::abs(2.0 * k * std::log(m) - std::log(k) - 1.0 + v));
    worst_curv = std::max(worst_curv, k_curvature(m, k));
    // Any maximizer satisfies ln k < v - 1, so the grid covers (0, e^(v-1)].
    const double top = std::exp(v - 1.0);
    const int n = 1000000;
    double best_k = 0.0, best_f = -1e300;
    for (int i = 1; i <= n; ++i) {
      const double g = top * i / n;
      const double f = g * g * std::log(m) - g * std::log(g) + v * g;
      if (f > best_f) {
        best_f = f;
        best_k = g;
      }
    }
    worst_rel = std::max(worst_rel, std::abs(best_k - k) / k);
  }
  return {worst_res <= 1e-9 && worst_curv < 0.0 && worst_rel <= 1e-3,
          fmtn("residual %.2g, max curvature %.3g, grid gap %.2g rel", worst_res, worst_curv, worst_rel)};
}

// --- 4 ---------------------------------------------------------------------

RadioInstance small_instance(Rng& rng) {
  RadioInstance inst;
  inst.noise_w = 1e-13;
  inst.gamma_min = 0.1;
  const double bx[] = {500.0, 200.0, 800.0}, by[] = {150.0, 100.0, 100.0};
  for (int i = 0; i < 3; ++i) {
    inst.is_macro.push_back(i == 0);
    inst.max_power_w.push_back(i == 0 ? 20.0 : 1.0);
    inst.harvest_w.push_back(i == 0 ? 10.0 : 0.5);
    inst.cache_capacity.push_back(i == 0 ? 100 : 20);
  }
  inst.gain.assign(3, std::vector<double>(10));
  for (int j = 0; j < 10; ++j) {
    const double x = rng.uniform(0, 1000), y = rng.uniform(0, 300);
    for (int i = 0; i < 3; ++i) {
      inst.gain[i][j] = 1e-4 * std::pow(std::max(1.0, std::hypot(x - bx[i], y - by[i])), -3.0);
    }
  }
  return inst;
}

Outcome solver_gap() {
  Rng rng(404);
  const auto cat = zipf_popularity(100, 0.8);
  double worst_gap = 0.0;
  int max_iter = 0;
  bool nonneg = true;
  for (int t = 0; t < 20; ++t) {
    const RadioInstance inst = small_instance(rng);
    const auto cache = optimal_cache(cat, inst.cache_capacity);
    const double grid = inst.eta * power_and_grid(inst, inst.max_power_w).total_grid();
    double best = -1e300;
    std::vector<int> a(10);
    for (int code = 0; code < 59049; ++code) {
      int c = code;
      for (int j = 0; j < 10; ++j, c /= 3) a[j] = c % 3;
      if (!sinr_feasible(a, inst.max_power_w, inst)) continue;
      best = std::max(best, association_objective(a, inst.max_power_w, inst, cache, cat) - grid);
    }
    const SolveResult r = solve(inst, cat);
    worst_gap = std::max(worst_gap, (best - r.objective) / std::abs(best));
    max_iter = std::max(max_iter, r.iterations);
    nonneg = nonneg && r.min_multiplier >= 0.0;
  }
  return {worst_gap <= 0.05 && nonneg && max_iter <= 2000,
          fmtn("worst gap %.3f%%, max iterations %d", 100.0 * worst_gap, max_iter)};
}

// --- 5 ---------------------------------------------------------------------

Outcome combining_conservation() {
  const double p = 0.5, g = 2e-9;
  double worst = 0.0;
  for (std::size_t l = 0; l <= 16; ++l) {
    const double per = p / static_cast<double>(l + 1);
    const std::vector<double> tx(l + 1, per), gains(l + 1, g);
    worst = std::max(worst, std::abs(received_power_w(tx, gains) - p * g) / (p * g));
  }
  const bool exact = std::abs(combining_gain_db(9) - 10.0) <= 1e-12;
  return {worst <= 1e-9 && exact, fmt("max relative error %.2g", worst)};
}

// --- 6 ---------------------------------------------------------------------

Outcome data_terms() {
  const EnergyModel m;
  const double e = 2.5766430382033926e-06;
  double worst = 0.0;
  for (int l = 1; l <= 10; ++l) {
    BeamGroup g;
    g.source = NodeId{0};
    g.destination = NodeId{1};
    g.eps_source_relay = g.eps_source_dest = g.eps_dest_source = e;
    for (int j = 0; j < l; ++j) g.relays.push_back({NodeId{static_cast<std::uint32_t>(2 + j)}, e, e});
    const auto r = diban_hop_energy(g, m);
    const double data = r.breakdown.data_from_source + r.breakdown.data_from_relays;
    worst = std::max(worst, std::abs(data - e * m.body_bits) / (e * m.body_bits));
  }
  return {worst <= 1e-12, fmt("max relative error %.2g", worst)};
}

// --- 7, 8 ------------------------------------------------------------------

struct Pair {
  RunSummary on, off;
};

Pair beamforming_pair(ScenarioConfig c, int reps) {
  c.run.beamforming = true;
  Pair p{monte_carlo(c, reps), {}};
  c.run.beamforming = false;
  p.off = monte_carlo(c, reps);
  return p;
}

const Pair& dense_pair() {
  static const Pair p = beamforming_pair(ScenarioConfig{}, 30);
  return p;
}

Outcome energy_trend() {
  const Pair& p = dense_pair();
  const double on = p.on.at("frame_energy_j").mean, off = p.off.at("frame_energy_j").mean;
  const double reduction = 1.0 - on / off;

  // Reduction across the N grid, 10 replications per point.
  double best = -1e300, best_n = 0.0;
  for (double n : experiment("ee-vs-n").grid) {
    ScenarioConfig c = sweep_config("ee-vs-n", ScenarioConfig{}, n, Scheme::kMcb);
    const Pair q = beamforming_pair(c, 10);
    const double off_n = q.off.at("frame_energy_j").mean;
    if (off_n <= 0.0) continue;
    const double r = 1.0 - q.on.at("frame_energy_j").mean / off_n;
    if (r > best) {
      best = r;
      best_n = n;
    }
  }
  return {reduction >= 0.15,
          fmtn("dense reduction %.1f%% (need >= 15%%); max over N grid %.1f%% at N = %.0f", 100.0 * reduction,
               100.0 * best, best_n)};
}

Outcome anonymity_trend() {
  const Pair& p = dense_pair();
  const double b_on = p.on.at("bs_belief").mean, b_off = p.off.at("bs_belief").mean;
  const double a_on = p.on.at("argmax_correct").mean, a_off = p.off.at("argmax_correct").mean;
  bool normalized = true;
  for (const auto* s : {&p.on, &p.off}) {
    for (const auto& r : s->records) {
      if (!r.ledger_empty && std::abs(r.evidence_normalization - 1.0) > 1e-9) normalized = false;
    }
  }
  bool same_traffic = true;
  for (std::size_t k = 0; k < p.on.records.size(); ++k) {
    same_traffic = same_traffic && p.on.records[k].hops == p.off.records[k].hops;
  }
  return {b_on <= b_off && a_on <= a_off && normalized,
          fmtn("belief %.3f vs %.3f, argmax-correct %.2f vs %.2f, normalization %s, traffic %s", b_on, b_off, a_on,
               a_off, normalized ? "ok" : "broken", same_traffic ? "shared" : "differs")};
}

// --- 9 ---------------------------------------------------------------------

double exhaustive_route_cost(const LinkCostTable& t, NodeId bs, std::uint32_t src) {
  const std::size_t n = t.size();
  double best = kInfiniteCost;
  std::vector<char> used(n, 0);
  std::vector<double> links;
  std::function<void(std::uint32_t)> dfs = [&](std::uint32_t u) {
    if (u == bs.value) {
      double acc = 0.0;
      for (auto it = links.rbegin(); it != links.rend(); ++it) acc = *it + acc;
      best = std::min(best, acc);
      return;
    }
    used[u] = 1;
    for (std::uint32_t v = 0; v < n; ++v) {
      const double c = t.cost(NodeId{u}, NodeId{v});
      if (used[v] || !std::isfinite(c)) continue;
      links.push_back(c);
      dfs(v);
      links.pop_back();
    }
    used[u] = 0;
  };
  dfs(src);
  return best;
}

Outcome routing_oracle() {
  Rng rng(909);
  int bad = 0, routed = 0;
  for (int t = 0; t < 50; ++t) {
    PlacementConfig p;
    p.node_count = 2 + static_cast<int>(rng.below(7));
    p.grid.side_m = t < 10 ? 300.0 : 120.0;
    p.grid.cells_per_side = 2;
    p.bs_cell = 3;
    const Topology topo = build_grid(p, rng.next_u64());
    const auto costs = build_link_costs(topo, ChannelModel{}, EnergyModel{}, RelaySelectionParams{});
    const RouteTable routes = shortest_routes(costs, topo);
    for (std::uint32_t s = 0; s < topo.size(); ++s) {
      if (NodeId{s} == topo.base_station()) continue;
      const double oracle = exhaustive_route_cost(costs, topo.base_station(), s);
      const auto& r = routes.route(NodeId{s});
      if (!r) {
        if (std::isfinite(oracle)) ++bad;
        continue;
      }
      ++routed;
      if (r->total_cost != oracle) ++bad;
      for (std::size_t h = 0; h + 1 < r->hops.size(); ++h) {
        if (!std::isfinite(costs.cost(r->hops[h], r->hops[h + 1]))) ++bad;
      }
    }
  }
  return {bad == 0, fmtn("%d mismatches, %d routed sources", bad, routed)};
}

// --- 10 --------------------------------------------------------------------

Outcome baseline_dominance() {
  // Sum rate comes from the radio tier alone, so frames are skipped.
  ScenarioConfig base;
  base.run.frames = 0;
  int wins = 0, points = 0;
  std::string worst;
  double worst_ratio = 1e300;
  for (double n : experiment("sumrate-vs-n").grid) {
    double mean[3];
    for (Scheme s : {Scheme::kMcb, Scheme::kFpa, Scheme::kRpa}) {
      const ScenarioConfig c = sweep_config("sumrate-vs-n", base, n, s);
      mean[static_cast<int>(s)] = monte_carlo(c, 30).at("sum_rate_bps").mean;
    }
    ++points;
    if (mean[0] >= mean[1] && mean[0] >= mean[2]) ++wins;
    const double ratio = mean[0] / std::max(mean[1], mean[2]);
    if (ratio < worst_ratio) {
      worst_ratio = ratio;
      worst = fmtn("N = %.0f: mcb %.3g, fpa %.3g, rpa %.3g", n, mean[0], mean[1], mean[2]);
    }
  }
  return {wins == points, fmtn("mcb ahead at %d/%d points; worst %s", wins, points, worst.c_str())};
}

// --- 11 --------------------------------------------------------------------

std::string golden_csv() {
  ScenarioConfig c;
  const MetricsRecord r = run_scenario(c, 42);
  std::ostringstream os;
  write_metrics_csv(os, std::span<const MetricsRecord>(&r, 1));
  return os.str();
}

Outcome golden() {
  const std::string a = golden_csv(), b = golden_csv();
  std::ifstream in(std::string(MCB_GOLDEN_DIR) + "/default_seed42.csv", std::ios::binary);
  if (!in) return {false, "golden file missing"};
  const std::string stored((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return {a == b && a == stored, a == b ? (a == stored ? "byte-identical to the stored fixture"
                                                       : "repeatable but differs from the stored fixture")
                                        : "repeated runs differ"};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "popularity caching matches exhaustive search", popularity_caching},
    {2, "Lambert W residuals", lambert_w},
    {3, "cluster-size stationarity", cluster_size},
    {4, "solver near-optimality", solver_gap},
    {5, "combining-gain conservation", combining_conservation},
    {6, "cooperative data terms independent of relay count", data_terms},
    {7, "beamforming energy reduction >= 15%", energy_trend},
    {8, "base-station anonymity with beamforming", anonymity_trend},
    {9, "shortest routes match exhaustive search", routing_oracle},
    {10, "MCB-MSN sum rate >= FPA and RPA over the N sweep", baseline_dominance},
    {11, "golden replication is byte-identical", golden},
};

}  // namespace

int main(int argc, char** argv) {
  if (argc == 2 && std::strcmp(argv[1], "--write-golden") == 0) {
    std::fputs(golden_csv().c_str(), stdout);
    return 0;
  }
  int only = 0;
  if (argc == 3 && std::strcmp(argv[1], "--only") == 0) only = std::atoi(argv[2]);

  int failed = 0;
  for (const Criterion& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
