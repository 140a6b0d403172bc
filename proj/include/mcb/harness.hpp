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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mcb/config.hpp"
#include "mcb/optimizer.hpp"
#include "mcb/topology.hpp"

namespace mcb {

inline constexpr const char* kToolVersion = "1.0.0";

struct RadioSetup {
  RadioInstance instance;
  ContentCatalog catalog;
  std::vector<Point> station_positions;  // macro first
};

/// Macro station at the sink, small cells on a ring around the field center,
/// every sensor a user. Gains follow the configured path loss.
RadioSetup build_radio_setup(const ScenarioConfig& config, const Topology& topology);

/// Noise power at which the worst-served user's best-server SNR equals
/// `snr_db` with every station at maximum power.
double noise_for_edge_snr(const RadioInstance& instance, double snr_db);

struct MetricsRecord {
  std::uint64_t seed = 0;
  // traffic
  int frames_attempted = 0;
  int frames_delivered = 0;
  int hops = 0;
  int cooperative_hops = 0;
  double frame_energy_j = 0.0;  // mean per attempted frame
  // radio tier
  double grid_w = 0.0;
  double radiated_w = 0.0;
  double sum_rate_bps = 0.0;
  double mean_user_throughput_bps = 0.0;
  std::vector<double> user_throughput_bps;
  double backhaul_utilization_pct = 0.0;
  double energy_efficiency_bpj = 0.0;
  double objective = 0.0;
  int solver_iterations = 0;
  // adversary
  double bs_belief = 0.0;
  int argmax_cell = 0;
  bool argmax_correct = false;
  double entropy_bits = 0.0;
  double evidence_normalization = 0.0;  // sum of m(V); 0 for an empty ledger
  bool ledger_empty = true;
  // partitions
  int partitioned_clusters = 0;
  bool heal_success = true;
};

/// One replication: topology, optimizer for the configured scheme, frame
/// deliveries with mobility between frames, and every metric. Deterministic
/// in (config, seed). Throws InfeasibleInstance for an unservable user.
MetricsRecord run_scenario(const ScenarioConfig& config, std::uint64_t seed);

/// Names and accessors for the scalar metrics, in CSV column order.
std::vector<std::string> metric_names();
std::vector<double> metric_values(const MetricsRecord& record);
double metric_value(const MetricsRecord& record, const std::string& name);

struct Stat {
  double mean = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  int n = 0;
};

/// Mean, standard error and two-sided 90% Student-t interval. A single
/// sample gives a zero-width interval.
Stat summarize(std::span<const double> samples);

struct RunSummary {
  std::vector<std::string> names;
  std::vector<Stat> stats;
  std::vector<MetricsRecord> records;

  const Stat& at(const std::string& name) const;
};

/// Replications with seeds seed_base + r, r = 0..replications-1.
RunSummary monte_carlo(const ScenarioConfig& config, int replications);

void write_metrics_csv(std::ostream& os, std::span<const MetricsRecord> records);
void write_summary_csv(std::ostream& os, const RunSummary& summary);

struct SweepPoint {
  double x = 0.0;
  Scheme scheme = Scheme::kMcb;
  Stat stat;
};

struct Experiment {
  std::string preset;
  std::string metric;
  std::vector<double> grid;
};

/// Known presets: throughput-vs-snr, sumrate-vs-n, backhaul-utilization,
/// ee-vs-n, ee-vs-mtp.
std::vector<std::string> experiment_presets();
Experiment experiment(const std::string& preset);

/// The config used at sweep point `x` for `scheme`.
ScenarioConfig sweep_config(const std::string& preset, const ScenarioConfig& base, double x,
                            Scheme scheme);

/// Runs the preset over `grid` (the preset's default grid when empty) for the
/// configured scheme and its baselines, writing <out_dir>/<preset>.csv with
/// columns x,scheme,mean,ci_lo,ci_hi.
std::vector<SweepPoint> run_experiment(const std::string& preset, const ScenarioConfig& config,
                                       const std::string& out_dir,
                                       std::span<const double> grid = {});

void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points);

/// JSON manifest: tool version, command, seed, replications, config hash.
void write_manifest(std::ostream& os, const ScenarioConfig& config, std::uint64_t seed,
                    const std::string& command);

/// FNV-1a of the canonical config text, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

}  // namespace mcb
