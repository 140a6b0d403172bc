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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mcb/common.hpp"

namespace mcb {

/// Square field partitioned into cells_per_side x cells_per_side cells.
struct GridSpec {
  double side_m = 880.0;
  int cells_per_side = 6;

  double cell_side_m() const { return side_m / cells_per_side; }
  int cell_count() const { return cells_per_side * cells_per_side; }
  /// Center of a row-major cell index.
  Point cell_center(int cell) const;
  void validate() const;
};

/// Row-major cell index of a position: row = floor(y / cell), col = floor(x / cell).
/// Points on the far edge (x == side_m or y == side_m) belong to the last row/column.
int cell_of(const Point& position, const GridSpec& grid);

enum class PathLossModel { kLogDistance, kOkumuraHata };

struct ChannelModel {
  PathLossModel model_kind = PathLossModel::kLogDistance;
  double path_loss_exponent = 3.0;
  /// Loss at 1 m for the log-distance model. The default calibrates a
  /// 30 dBm transmitter to reach ~170 m at -100 dBm once the link-budget
  /// terms below are applied.
  double reference_loss_db = 50.6;
  double noise_power_w = 1e-14;  // sigma^2
  double bandwidth_hz = 1e6;
  double rx_sensitivity_dbm = -100.0;
  double min_snr_db = 10.0;

  // Link-budget terms, all additive dB.
  double tx_loss_db = 3.0;
  double rx_loss_db = 3.0;
  double tx_backoff_db = 1.5;
  double link_margin_db = 5.0;

  // Okumura-Hata (urban, small/medium city correction).
  double hata_frequency_mhz = 900.0;
  double hata_bs_height_m = 30.0;
  double hata_ms_height_m = 1.5;

  void validate() const;
  double budget_overhead_db() const {
    return tx_loss_db + rx_loss_db + tx_backoff_db + link_margin_db;
  }
  /// max(rx sensitivity, noise + min SNR) in dBm.
  double required_rx_dbm() const;
};

/// Reference loss making `max_power_dbm` reach exactly `range_m` under the
/// log-distance model with `channel`'s exponent and budget terms.
double calibrated_reference_loss_db(const ChannelModel& channel, double max_power_dbm,
                                    double range_m);

double path_loss_db(double distance_m, const ChannelModel& channel);

/// Linear channel power gain 10^(-PL/10).
double channel_gain(double distance_m, const ChannelModel& channel);

/// Unclamped link budget: the transmit power needed at `distance_m`.
double link_budget_dbm(double distance_m, const ChannelModel& channel);

/// Throws LinkInfeasible if the link budget exceeds `max_tx_power_dbm`.
double required_tx_power_dbm(double distance_m, const ChannelModel& channel,
                             double max_tx_power_dbm);

/// Largest distance a transmitter at `tx_power_dbm` can close. Found by
/// bisection on the (monotone) link budget.
double max_range_m(double tx_power_dbm, const ChannelModel& channel);

struct NodeState {
  NodeId id;
  Point position;
  double residual_energy_j = 0.0;
  double max_tx_power_dbm = 30.0;
  bool is_base_station = false;

  // Random-waypoint state; unused for the base station.
  Point waypoint;
  double speed_mps = 0.0;
  double pause_left_s = 0.0;

  bool alive() const { return is_base_station || residual_energy_j > 0.0; }
};

enum class Placement { kUniform, kHotspot };

struct PlacementConfig {
  int node_count = 150;  // S_U, base station included
  GridSpec grid;
  int bs_cell = 35;
  Placement placement = Placement::kUniform;
  int hotspot_count = 4;
  double hotspot_sigma_m = 60.0;
  double initial_energy_j = 5.0;
  double node_max_power_dbm = 30.0;
  double bs_max_power_dbm = 43.0;

  void validate() const;
};

class Topology {
 public:
  Topology(std::vector<NodeState> nodes, GridSpec grid);

  std::span<const NodeState> nodes() const { return nodes_; }
  const NodeState& node(NodeId id) const { return nodes_.at(id.value); }
  NodeState& mutable_node(NodeId id) { return nodes_.at(id.value); }
  std::size_t size() const { return nodes_.size(); }
  const GridSpec& grid() const { return grid_; }
  NodeId base_station() const { return base_station_; }
  /// Nodes per square meter over the whole field.
  double density() const;

 private:
  std::vector<NodeState> nodes_;
  GridSpec grid_;
  NodeId base_station_;
};

/// Places config.node_count nodes: the base station (id 0) at the center of
/// config.bs_cell and the sensors uniformly or around Gaussian hotspots.
Topology build_grid(const PlacementConfig& config, std::uint64_t seed);

struct MobilityParams {
  double speed_min_mps = 0.5;
  double speed_max_mps = 2.0;
  double pause_s = 5.0;

  void validate() const;
};

/// Advances every sensor by `dt_s` of random-waypoint motion. A node that
/// reaches its waypoint pauses, then draws a new waypoint and speed; any
/// leftover time in the step is spent on the next leg, so one step of 2*dt
/// and two steps of dt generally consume different random draws.
Topology move_nodes(const Topology& topology, const MobilityParams& mobility, double dt_s,
                    std::uint64_t seed);

}  // namespace mcb
