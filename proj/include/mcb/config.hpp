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
#include <string>
#include <vector>

#include "mcb/adversary.hpp"
#include "mcb/beamforming.hpp"
#include "mcb/topology.hpp"

namespace mcb {

inline constexpr const char* kConfigFormat = "mcbmsn-config/1";

struct TopologyConfig {
  PlacementConfig placement;
  bool mobility = true;
  MobilityParams mobility_params;
  double mobility_step_s = 1.0;  // simulated time between frames
};

struct AdversaryConfig {
  int max_hops = 4;
  EvidenceMode evidence_mode = EvidenceMode::kFractional;
};

/// Radio tier fed to the association/caching/power optimizer. The macro
/// station sits at the sink; small cells ring the field center.
struct OptimizerConfig {
  int small_cell_count = 4;
  double small_cell_radius_fraction = 0.25;  // ring radius / side_m
  int file_count = 100;
  double zipf_alpha = 0.8;
  int macro_cache = 100;  // L_M
  int small_cache = 20;   // L_S
  double gamma_min_db = -10.0;
  double eta = 1.0;
  double sharing_index = 0.8;
  double bandwidth_share = 1.0;
  double macro_max_power_dbm = 43.0;
  double small_max_power_dbm = 30.0;
  double macro_harvest_w = 10.0;
  double small_harvest_w = 0.5;
  double circuit_power_w = 1.0;  // static draw per station, counted in energy efficiency
  double backhaul_capacity_bps = 20e6;
  /// When set, radio noise is chosen per replication so the worst user's
  /// best-server SNR equals edge_snr_db; otherwise channel.noise_power_w.
  bool fix_edge_snr = false;
  double edge_snr_db = 10.0;

  int max_iter = 2000;
  double tol = 1e-6;
  double step0 = 0.1;
  bool local_search = true;
  bool power_refinement = false;
};

enum class Scheme { kMcb, kFpa, kRpa };

const char* to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);

struct RunConfig {
  int frames = 40;
  int replications = 30;
  std::uint64_t seed_base = 1;
  bool beamforming = true;
  bool energy_guard = true;
  Scheme scheme = Scheme::kMcb;
  std::vector<Scheme> baselines{Scheme::kFpa, Scheme::kRpa};
  int route_refresh_frames = 1;  // rebuild costs and routes every N mobility steps
};

struct ScenarioConfig {
  TopologyConfig topology;
  ChannelModel channel;
  EnergyModel energy;
  RelaySelectionParams relay;
  AdversaryConfig adversary;
  OptimizerConfig optimizer;
  RunConfig run;

  // Listed in the parameter table but not simulated.
  std::string codec = "adaptive-multi-rate";
  std::string fairness_index = "security/throughput";

  /// Throws InvalidArgument naming the first offending field.
  void validate() const;
};

/// Parse failure with the 1-based line it occurred on.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// `key = value` lines, '#' comments, dotted keys (e.g. topology.node_count).
/// An optional `format = mcbmsn-config/1` line pins the schema version.
/// Unknown keys and duplicate keys are rejected.
ScenarioConfig parse_config(std::istream& is);
ScenarioConfig load_config(const std::string& path);

/// Applies one `key = value` override on top of an existing config.
void set_config_value(ScenarioConfig& config, const std::string& key, const std::string& value);

/// Canonical text form; parse_config(write_config(c)) == c field for field.
void write_config(std::ostream& os, const ScenarioConfig& config);
std::string config_text(const ScenarioConfig& config);

/// Every accepted key, in canonical order.
std::vector<std::string> config_keys();

}  // namespace mcb
