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

#include "mcb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <limits>
#include <ostream>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "mcb/adversary.hpp"
#include "mcb/csv.hpp"
#include "mcb/rng.hpp"
#include "mcb/routing.hpp"

namespace mcb {

RadioSetup build_radio_setup(const ScenarioConfig& config, const Topology& topology) {
  const auto& o = config.optimizer;
  const double side = topology.grid().side_m;
  RadioSetup s;
  s.station_positions.push_back(topology.node(topology.base_station()).position);
  const Point center{side / 2.0, side / 2.0};
  const double ring = o.small_cell_radius_fraction * side;
  for (int k = 0; k < o.small_cell_count; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / o.small_cell_count + std::numbers::pi / 4.0;
    s.station_positions.push_back({center.x + ring * std::cos(theta), center.y + ring * std::sin(theta)});
  }

  auto& inst = s.instance;
  const std::size_t b = s.station_positions.size();
  inst.gain.assign(b, {});
  for (const auto& n : topology.nodes()) {
    if (n.is_base_station) continue;
    for (std::size_t i = 0; i < b; ++i) {
      const double d = std::max(1.0, distance(s.station_positions[i], n.position));
      inst.gain[i].push_back(channel_gain(d, config.channel));
    }
  }
  const int files = o.file_count;
  for (std::size_t i = 0; i < b; ++i) {
    const bool macro = i == 0;
    inst.is_macro.push_back(macro);
    inst.max_power_w.push_back(dbm_to_watts(macro ? o.macro_max_power_dbm : o.small_max_power_dbm));
    inst.harvest_w.push_back(macro ? o.macro_harvest_w : o.small_harvest_w);
    inst.cache_capacity.push_back(std::min(files, macro ? o.macro_cache : o.small_cache));
  }
  inst.noise_w = config.channel.noise_power_w;
  inst.bandwidth_hz = config.channel.bandwidth_hz;
  inst.bandwidth_share = o.bandwidth_share;
  inst.gamma_min = db_to_linear(o.gamma_min_db);
  inst.eta = o.eta;
  inst.sharing_index = o.sharing_index;
  if (o.fix_edge_snr) inst.noise_w = noise_for_edge_snr(inst, o.edge_snr_db);

  s.catalog = zipf_popularity(files, o.zipf_alpha);
  return s;
}

double noise_for_edge_snr(const RadioInstance& instance, double snr_db) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < instance.user_count(); ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < instance.bs_count(); ++i) {
      best = std::max(best, instance.max_power_w[i] * instance.gain[i][j]);
    }
    worst = std::min(worst, best);
  }
  return worst / db_to_linear(snr_db);
}

namespace {

struct TrafficOutcome {
  int attempted = 0;
  int delivered = 0;
  int hops = 0;
  int cooperative = 0;
  double energy_j = 0.0;
};

TrafficOutcome simulate_traffic(const ScenarioConfig& config, Topology& topology,
                                EvidenceLedger& ledger, std::uint64_t seed) {
  TrafficOutcome out;
  if (config.run.frames == 0) return out;
  DeliveryOptions options;
  options.beamforming = config.run.beamforming;
  options.energy_guard = config.run.energy_guard;
  options.evidence_mode = config.adversary.evidence_mode;

  Rng pick(derive_seed(seed, "traffic"));
  RouteTable routes;
  int since_refresh = config.run.route_refresh_frames;
  for (int f = 0; f < config.run.frames; ++f) {
    if (since_refresh >= config.run.route_refresh_frames) {
      routes = shortest_routes(build_link_costs(topology, config.channel, config.energy, config.relay),
                               topology);
      since_refresh = 0;
    }
    ++since_refresh;
    ++out.attempted;

    std::vector<NodeId> sources;
    for (const auto& n : topology.nodes()) {
      if (!n.is_base_station && n.alive() && !routes.partitioned(n.id)) sources.push_back(n.id);
    }
    if (!sources.empty()) {
      const NodeId src = sources[pick.below(sources.size())];
      const DeliveryResult r = deliver_frame(src, routes, topology, config.channel, config.energy,
                                             config.relay, options, ledger,
                                             derive_seed(seed, "frame", static_cast<std::uint64_t>(f)));
      out.energy_j += r.energy_charged_j;
      out.hops += static_cast<int>(r.reports.size());
      for (const auto& rep : r.reports) {
        if (rep.mode == HopMode::kCooperative) ++out.cooperative;
      }
      const bool died = std::any_of(r.reports.begin(), r.reports.end(), [&](const HopEnergyReport& h) {
        return std::any_of(h.charges.begin(), h.charges.end(),
                           [&](const auto& c) { return !topology.node(c.node).alive(); });
      });
      if (r.status == DeliveryStatus::kDelivered) ++out.delivered;
      if (r.status != DeliveryStatus::kDelivered || died) {
        since_refresh = config.run.route_refresh_frames;
      }
    }

    if (config.topology.mobility) {
      topology = move_nodes(topology, config.topology.mobility_params, config.topology.mobility_step_s,
                            derive_seed(seed, "move", static_cast<std::uint64_t>(f)));
    }
  }
  return out;
}

void check_partitions(const ScenarioConfig& config, const Topology& topology, MetricsRecord& rec) {
  const RouteTable routes =
      shortest_routes(build_link_costs(topology, config.channel, config.energy, config.relay), topology);
  std::vector<NodeId> isolated, connected;
  for (const auto& n : topology.nodes()) {
    if (!n.alive()) continue;
    (routes.partitioned(n.id) ? isolated : connected).push_back(n.id);
  }
  const auto clusters = partition_clusters(isolated, topology, config.channel);
  rec.partitioned_clusters = static_cast<int>(clusters.size());
  rec.heal_success = true;
  for (const auto& c : clusters) {
    if (!heal_partition(c, connected, topology, config.channel, config.energy)) rec.heal_success = false;
  }
}

}  // namespace

MetricsRecord run_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  MetricsRecord rec;
  rec.seed = seed;

  Topology topology = build_grid(config.topology.placement, derive_seed(seed, "topology"));
  check_partitions(config, topology, rec);

  const RadioSetup radio = build_radio_setup(config, topology);
  const RadioInstance& inst = radio.instance;
  const CacheVector cache = optimal_cache(radio.catalog, inst.cache_capacity);
  PrimalState primal;
  switch (config.run.scheme) {
    case Scheme::kMcb: {
      SolverOptions opt;
      opt.max_iter = config.optimizer.max_iter;
      opt.tol = config.optimizer.tol;
      opt.schedule.step0 = config.optimizer.step0;
      opt.local_search = config.optimizer.local_search;
      opt.power_refinement = config.optimizer.power_refinement;
      SolveResult sr = solve(inst, radio.catalog, opt);
      rec.solver_iterations = sr.iterations;
      primal = std::move(sr.primal);
      break;
    }
    case Scheme::kFpa:
      primal = fpa_allocate(inst);
      break;
    case Scheme::kRpa:
      primal = rpa_allocate(inst, derive_seed(seed, "rpa"));
      break;
  }
  rec.objective = association_objective(primal.association, primal.power_w, inst, cache, radio.catalog) -
                  inst.eta * std::accumulate(primal.grid_w.begin(), primal.grid_w.end(), 0.0);

  const RadioMetrics rm = evaluate(primal, inst, cache, radio.catalog);
  const double to_bits = 1.0 / std::numbers::ln2;
  rec.grid_w = rm.grid_w;
  rec.radiated_w = rm.radiated_w;
  rec.sum_rate_bps = rm.sum_rate * to_bits;
  for (double r : rm.user_throughput) rec.user_throughput_bps.push_back(r * to_bits);
  rec.mean_user_throughput_bps = rec.sum_rate_bps / static_cast<double>(inst.user_count());
  double util = 0.0;
  for (double load : rm.backhaul_load) util += load * to_bits / config.optimizer.backhaul_capacity_bps;
  rec.backhaul_utilization_pct = 100.0 * util / static_cast<double>(inst.bs_count());

  EvidenceLedger ledger(config.topology.placement.grid);
  const TrafficOutcome t = simulate_traffic(config, topology, ledger, seed);
  rec.frames_attempted = t.attempted;
  rec.frames_delivered = t.delivered;
  rec.hops = t.hops;
  rec.cooperative_hops = t.cooperative;
  rec.frame_energy_j = t.attempted > 0 ? t.energy_j / t.attempted : 0.0;

  const double sensor_w =
      t.attempted > 0 ? t.energy_j / (t.attempted * config.topology.mobility_step_s) : 0.0;
  const double consumed = sensor_w + inst.eta * rm.grid_w +
                          config.optimizer.circuit_power_w * static_cast<double>(inst.bs_count());
  rec.energy_efficiency_bpj = consumed > 0.0 ? rec.sum_rate_bps / consumed : 0.0;

  const int bs_cell = config.topology.placement.bs_cell;
  const BeliefMap map = belief(ledger, config.adversary.max_hops, bs_cell);
  rec.ledger_empty = ledger.empty();
  rec.evidence_normalization = map.normalized_total;
  if (!ledger.empty()) {
    const AnonymityReport a = anonymity_report(map);
    rec.bs_belief = a.bs_belief;
    rec.argmax_cell = a.argmax_cell;
    rec.argmax_correct = a.argmax_cell == bs_cell && map.evidence_total > 0.0;
    rec.entropy_bits = a.entropy_bits;
  }
  return rec;
}

std::vector<std::string> metric_names() {
  return {"frames_attempted", "frames_delivered", "hops", "cooperative_hops", "frame_energy_j",
          "grid_w", "radiated_w", "sum_rate_bps", "mean_user_throughput_bps",
          "backhaul_utilization_pct", "energy_efficiency_bpj", "objective", "solver_iterations",
          "bs_belief", "argmax_cell", "argmax_correct", "entropy_bits", "evidence_normalization",
          "partitioned_clusters", "heal_success"};
}

std::vector<double> metric_values(const MetricsRecord& r) {
  return {static_cast<double>(r.frames_attempted), static_cast<double>(r.frames_delivered),
          static_cast<double>(r.hops), static_cast<double>(r.cooperative_hops), r.frame_energy_j,
          r.grid_w, r.radiated_w, r.sum_rate_bps, r.mean_user_throughput_bps,
          r.backhaul_utilization_pct, r.energy_efficiency_bpj, r.objective,
          static_cast<double>(r.solver_iterations), r.bs_belief, static_cast<double>(r.argmax_cell),
          r.argmax_correct ? 1.0 : 0.0, r.entropy_bits, r.evidence_normalization,
          static_cast<double>(r.partitioned_clusters), r.heal_success ? 1.0 : 0.0};
}

double metric_value(const MetricsRecord& record, const std::string& name) {
  const auto names = metric_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw InvalidArgument("unknown metric '" + name + "'");
  return metric_values(record)[static_cast<std::size_t>(it - names.begin())];
}

Stat summarize(std::span<const double> samples) {
  Stat s;
  s.n = static_cast<int>(samples.size());
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / s.n;
  s.ci_lo = s.ci_hi = s.mean;
  if (s.n < 2) return s;
  double ss = 0.0;
  for (double v : samples) ss += (v - s.mean) * (v - s.mean);
  s.std_error = std::sqrt(ss / (s.n - 1)) / std::sqrt(static_cast<double>(s.n));
  const boost::math::students_t dist(s.n - 1);
  const double half = boost::math::quantile(dist, 0.95) * s.std_error;
  s.ci_lo = s.mean - half;
  s.ci_hi = s.mean + half;
  return s;
}

const Stat& RunSummary::at(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw InvalidArgument("unknown metric '" + name + "'");
  return stats[static_cast<std::size_t>(it - names.begin())];
}

RunSummary monte_carlo(const ScenarioConfig& config, int replications) {
  if (replications < 1) throw InvalidArgument("replications must be >= 1");
  RunSummary out;
  out.names = metric_names();
  for (int r = 0; r < replications; ++r) {
    out.records.push_back(run_scenario(config, config.run.seed_base + static_cast<std::uint64_t>(r)));
  }
  for (std::size_t m = 0; m < out.names.size(); ++m) {
    std::vector<double> col;
    for (const auto& rec : out.records) col.push_back(metric_values(rec)[m]);
    out.stats.push_back(summarize(col));
  }
  return out;
}

void write_metrics_csv(std::ostream& os, std::span<const MetricsRecord> records) {
  csv::Row header{"seed"};
  for (auto& n : metric_names()) header.push_back(n);
  csv::write_row(os, header);
  for (const auto& r : records) {
    csv::Row row{std::to_string(r.seed)};
    for (double v : metric_values(r)) row.push_back(csv::number(v));
    csv::write_row(os, row);
  }
}

void write_summary_csv(std::ostream& os, const RunSummary& summary) {
  csv::write_row(os, {"metric", "mean", "std_error", "ci_lo", "ci_hi", "n"});
  for (std::size_t m = 0; m < summary.names.size(); ++m) {
    const Stat& s = summary.stats[m];
    csv::write_row(os, {summary.names[m], csv::number(s.mean), csv::number(s.std_error),
                        csv::number(s.ci_lo), csv::number(s.ci_hi), std::to_string(s.n)});
  }
}

namespace {

std::vector<double> range(double lo, double hi, double step) {
  std::vector<double> g;
  for (int k = 0; lo + k * step <= hi + 1e-9; ++k) g.push_back(lo + k * step);
  return g;
}

}  // namespace

std::vector<std::string> experiment_presets() {
  return {"throughput-vs-snr", "sumrate-vs-n", "backhaul-utilization", "ee-vs-n", "ee-vs-mtp"};
}

Experiment experiment(const std::string& preset) {
  if (preset == "throughput-vs-snr") return {preset, "mean_user_throughput_bps", range(-5, 30, 5)};
  if (preset == "sumrate-vs-n") return {preset, "sum_rate_bps", range(20, 200, 20)};
  if (preset == "backhaul-utilization") return {preset, "backhaul_utilization_pct", range(20, 200, 20)};
  if (preset == "ee-vs-n") return {preset, "energy_efficiency_bpj", range(20, 200, 20)};
  if (preset == "ee-vs-mtp") return {preset, "energy_efficiency_bpj", range(10, 43, 3)};
  throw InvalidArgument("unknown preset '" + preset + "'");
}

ScenarioConfig sweep_config(const std::string& preset, const ScenarioConfig& base, double x,
                            Scheme scheme) {
  ScenarioConfig c = base;
  c.run.scheme = scheme;
  if (scheme != Scheme::kMcb) c.run.beamforming = false;
  if (preset == "throughput-vs-snr") {
    c.optimizer.fix_edge_snr = true;
    c.optimizer.edge_snr_db = x;
  } else if (preset == "sumrate-vs-n" || preset == "backhaul-utilization" || preset == "ee-vs-n") {
    c.topology.placement.node_count = static_cast<int>(std::lround(x)) + 1;
  } else if (preset == "ee-vs-mtp") {
    const double tier_gap = base.optimizer.macro_max_power_dbm - base.optimizer.small_max_power_dbm;
    c.optimizer.macro_max_power_dbm = x;
    c.optimizer.small_max_power_dbm = x - tier_gap;
    if (scheme == Scheme::kMcb) c.optimizer.power_refinement = true;
  } else {
    throw InvalidArgument("unknown preset '" + preset + "'");
  }
  c.validate();
  return c;
}

std::vector<SweepPoint> run_experiment(const std::string& preset, const ScenarioConfig& config,
                                       const std::string& out_dir, std::span<const double> grid) {
  const Experiment e = experiment(preset);
  const std::vector<double> xs = grid.empty() ? e.grid : std::vector<double>(grid.begin(), grid.end());
  std::vector<Scheme> schemes{config.run.scheme};
  for (Scheme s : config.run.baselines) {
    if (std::find(schemes.begin(), schemes.end(), s) == schemes.end()) schemes.push_back(s);
  }
  std::vector<SweepPoint> points;
  for (double x : xs) {
    for (Scheme s : schemes) {
      const ScenarioConfig c = sweep_config(preset, config, x, s);
      const RunSummary summary = monte_carlo(c, c.run.replications);
      points.push_back({x, s, summary.at(e.metric)});
    }
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream os(std::filesystem::path(out_dir) / (preset + ".csv"));
    if (!os) throw Error("cannot write to '" + out_dir + "'");
    write_sweep_csv(os, points);
  }
  return points;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points) {
  csv::write_row(os, {"x", "scheme", "mean", "ci_lo", "ci_hi"});
  for (const auto& p : points) {
    csv::write_row(os, {csv::number(p.x), to_string(p.scheme), csv::number(p.stat.mean),
                        csv::number(p.stat.ci_lo), csv::number(p.stat.ci_hi)});
  }
}

std::string config_hash(const ScenarioConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_text(config))));
  return buf;
}

void write_manifest(std::ostream& os, const ScenarioConfig& config, std::uint64_t seed,
                    const std::string& command) {
  nlohmann::ordered_json j;
  j["tool"] = "mcbsim";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["config_format"] = kConfigFormat;
  j["config_hash"] = config_hash(config);
  j["seed"] = seed;
  j["replications"] = config.run.replications;
  j["rng"] = "mt19937_64 + splitmix64 sub-streams";
  os << j.dump(2) << '\n';
}

}  // namespace mcb
