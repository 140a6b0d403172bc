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

#include "mcb/topology.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcb/rng.hpp"

namespace mcb {

Point GridSpec::cell_center(int cell) const {
  if (cell < 0 || cell >= cell_count()) {
    throw InvalidArgument("cell index " + std::to_string(cell) + " out of range");
  }
  const double s = cell_side_m();
  return {(cell % cells_per_side + 0.5) * s, (cell / cells_per_side + 0.5) * s};
}

void GridSpec::validate() const {
  if (!(side_m > 0.0) || !std::isfinite(side_m)) {
    throw InvalidArgument("grid side_m must be > 0");
  }
  if (cells_per_side < 1) {
    throw InvalidArgument("grid cells_per_side must be >= 1");
  }
}

int cell_of(const Point& position, const GridSpec& grid) {
  if (!(position.x >= 0.0 && position.x <= grid.side_m && position.y >= 0.0 &&
        position.y <= grid.side_m)) {
    throw InvalidArgument("position outside field");
  }
  const double s = grid.cell_side_m();
  const int last = grid.cells_per_side - 1;
  const int col = std::min(static_cast<int>(position.x / s), last);
  const int row = std::min(static_cast<int>(position.y / s), last);
  return row * grid.cells_per_side + col;
}

// --- channel ---------------------------------------------------------------

void ChannelModel::validate() const {
  if (model_kind == PathLossModel::kLogDistance && !(path_loss_exponent >= 2.0)) {
    throw InvalidArgument("channel path_loss_exponent must be >= 2");
  }
  if (!(bandwidth_hz > 0.0)) throw InvalidArgument("channel bandwidth_hz must be > 0");
  if (!(noise_power_w > 0.0)) throw InvalidArgument("channel noise_power_w must be > 0");
  if (model_kind == PathLossModel::kOkumuraHata) {
    if (!(hata_frequency_mhz > 0.0) || !(hata_bs_height_m > 0.0) || !(hata_ms_height_m > 0.0)) {
      throw InvalidArgument("channel Okumura-Hata parameters must be > 0");
    }
  }
}

double ChannelModel::required_rx_dbm() const {
  return std::max(rx_sensitivity_dbm, watts_to_dbm(noise_power_w) + min_snr_db);
}

double calibrated_reference_loss_db(const ChannelModel& channel, double max_power_dbm,
                                    double range_m) {
  const double loss_at_range =
      max_power_dbm - channel.budget_overhead_db() - channel.required_rx_dbm();
  return loss_at_range - 10.0 * channel.path_loss_exponent * std::log10(range_m);
}

namespace {

double hata_urban_db(double distance_m, const ChannelModel& c) {
  const double lf = std::log10(c.hata_frequency_mhz);
  const double lhb = std::log10(c.hata_bs_height_m);
  const double a_hm = (1.1 * lf - 0.7) * c.hata_ms_height_m - (1.56 * lf - 0.8);
  return 69.55 + 26.16 * lf - 13.82 * lhb - a_hm +
         (44.9 - 6.55 * lhb) * std::log10(distance_m / 1000.0);
}

}  // namespace

double path_loss_db(double distance_m, const ChannelModel& channel) {
  if (!(distance_m > 0.0)) throw InvalidArgument("path loss distance must be > 0");
  double loss = 0.0;
  switch (channel.model_kind) {
    case PathLossModel::kLogDistance:
      loss = channel.reference_loss_db +
             10.0 * channel.path_loss_exponent * std::log10(distance_m);
      break;
    case PathLossModel::kOkumuraHata:
      loss = hata_urban_db(distance_m, channel);
      break;
  }
  return std::max(0.0, loss);
}

double channel_gain(double distance_m, const ChannelModel& channel) {
  return db_to_linear(-path_loss_db(distance_m, channel));
}

double link_budget_dbm(double distance_m, const ChannelModel& channel) {
  return channel.required_rx_dbm() + path_loss_db(distance_m, channel) +
         channel.budget_overhead_db();
}

double required_tx_power_dbm(double distance_m, const ChannelModel& channel,
                             double max_tx_power_dbm) {
  const double p = link_budget_dbm(distance_m, channel);
  if (p > max_tx_power_dbm) throw LinkInfeasible(p, max_tx_power_dbm);
  return p;
}

double max_range_m(double tx_power_dbm, const ChannelModel& channel) {
  double lo = 1e-6;
  double hi = 1.0;
  if (link_budget_dbm(lo, channel) > tx_power_dbm) return 0.0;
  while (link_budget_dbm(hi, channel) <= tx_power_dbm) {
    hi *= 2.0;
    if (hi > 1e9) return hi;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-9 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (link_budget_dbm(mid, channel) <= tx_power_dbm ? lo : hi) = mid;
  }
  return lo;
}

// --- topology --------------------------------------------------------------

void PlacementConfig::validate() const {
  grid.validate();
  if (node_count < 2) throw InvalidArgument("topology node_count must be >= 2");
  if (bs_cell < 0 || bs_cell >= grid.cell_count()) {
    throw InvalidArgument("topology bs_cell " + std::to_string(bs_cell) + " out of range");
  }
  if (placement == Placement::kHotspot && (hotspot_count < 1 || !(hotspot_sigma_m > 0.0))) {
    throw InvalidArgument("topology hotspot_count must be >= 1 and hotspot_sigma_m > 0");
  }
  if (!(initial_energy_j >= 0.0)) throw InvalidArgument("topology initial_energy_j must be >= 0");
}

Topology::Topology(std::vector<NodeState> nodes, GridSpec grid)
    : nodes_(std::move(nodes)), grid_(grid) {
  grid_.validate();
  if (nodes_.size() < 2) throw InvalidArgument("topology needs at least 2 nodes");
  int bs_count = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.id.value != i) throw InvalidArgument("node ids must be dense indices");
    if (n.position.x < 0.0 || n.position.x > grid_.side_m || n.position.y < 0.0 ||
        n.position.y > grid_.side_m) {
      throw InvalidArgument("node " + std::to_string(i) + " outside field");
    }
    if (n.residual_energy_j < 0.0) throw InvalidArgument("negative residual energy");
    if (n.is_base_station) {
      ++bs_count;
      base_station_ = n.id;
    }
  }
  if (bs_count != 1) throw InvalidArgument("topology must contain exactly one base station");
}

double Topology::density() const {
  return static_cast<double>(nodes_.size()) / (grid_.side_m * grid_.side_m);
}

namespace {

double clamp_reflect(double v, double side) {
  // Reflect once, then clamp for anything further out.
  if (v < 0.0) v = -v;
  if (v > side) v = 2.0 * side - v;
  return std::clamp(v, 0.0, side);
}

}  // namespace

Topology build_grid(const PlacementConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(derive_seed(seed, "placement"));
  const double side = config.grid.side_m;

  std::vector<NodeState> nodes;
  nodes.reserve(static_cast<std::size_t>(config.node_count));

  NodeState bs;
  bs.id = NodeId{0};
  bs.position = config.grid.cell_center(config.bs_cell);
  bs.waypoint = bs.position;
  bs.is_base_station = true;
  bs.max_tx_power_dbm = config.bs_max_power_dbm;
  bs.residual_energy_j = config.initial_energy_j;
  nodes.push_back(bs);

  std::vector<Point> hotspots;
  if (config.placement == Placement::kHotspot) {
    for (int h = 0; h < config.hotspot_count; ++h) {
      hotspots.push_back({rng.uniform(0.0, side), rng.uniform(0.0, side)});
    }
  }

  for (int i = 1; i < config.node_count; ++i) {
    NodeState n;
    n.id = NodeId{static_cast<std::uint32_t>(i)};
    if (hotspots.empty()) {
      n.position = {rng.uniform(0.0, side), rng.uniform(0.0, side)};
    } else {
      const Point& c = hotspots[rng.below(hotspots.size())];
      n.position = {clamp_reflect(c.x + config.hotspot_sigma_m * rng.normal(), side),
                    clamp_reflect(c.y + config.hotspot_sigma_m * rng.normal(), side)};
    }
    n.waypoint = n.position;
    n.residual_energy_j = config.initial_energy_j;
    n.max_tx_power_dbm = config.node_max_power_dbm;
    nodes.push_back(n);
  }
  return Topology(std::move(nodes), config.grid);
}

void MobilityParams::validate() const {
  if (!(speed_min_mps >= 0.0) || !(speed_max_mps >= speed_min_mps)) {
    throw InvalidArgument("mobility speeds must satisfy 0 <= speed_min <= speed_max");
  }
  if (!(pause_s >= 0.0)) throw InvalidArgument("mobility pause_s must be >= 0");
}

Topology move_nodes(const Topology& topology, const MobilityParams& mobility, double dt_s,
                    std::uint64_t seed) {
  if (!(dt_s > 0.0)) throw InvalidArgument("mobility dt must be > 0");
  mobility.validate();
  Rng rng(derive_seed(seed, "mobility"));
  const double side = topology.grid().side_m;

  std::vector<NodeState> nodes(topology.nodes().begin(), topology.nodes().end());
  for (auto& n : nodes) {
    if (n.is_base_station) continue;
    double budget = dt_s;
    // Bounded so a zero-length leg with zero pause cannot spin forever.
    for (int legs = 0; budget > 0.0 && legs < 64; ++legs) {
      if (n.pause_left_s > 0.0) {
        const double p = std::min(budget, n.pause_left_s);
        n.pause_left_s -= p;
        budget -= p;
        continue;
      }
      const double remaining = distance(n.position, n.waypoint);
      if (remaining <= 0.0) {
        n.waypoint = {rng.uniform(0.0, side), rng.uniform(0.0, side)};
        n.speed_mps = rng.uniform(mobility.speed_min_mps, mobility.speed_max_mps);
        n.pause_left_s = mobility.pause_s;
        continue;
      }
      if (n.speed_mps <= 0.0) break;
      const double reach = n.speed_mps * budget;
      if (reach >= remaining) {
        n.position = n.waypoint;
        budget -= remaining / n.speed_mps;
      } else {
        const double f = reach / remaining;
        n.position = {clamp_reflect(n.position.x + f * (n.waypoint.x - n.position.x), side),
                      clamp_reflect(n.position.y + f * (n.waypoint.y - n.position.y), side)};
        budget = 0.0;
      }
    }
  }
  return Topology(std::move(nodes), topology.grid());
}

}  // namespace mcb
