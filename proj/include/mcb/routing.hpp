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
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "mcb/adversary.hpp"
#include "mcb/beamforming.hpp"
#include "mcb/topology.hpp"

namespace mcb {

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

/// Beam-aware link costs: cost = relay-request energy / |L_A|, or +inf when
/// no auxiliary relay is available or the link is out of range.
class LinkCostTable {
 public:
  explicit LinkCostTable(std::size_t node_count);

  std::size_t size() const { return n_; }
  double cost(NodeId from, NodeId to) const { return cost_[index(from, to)]; }
  int available_relays(NodeId from, NodeId to) const { return available_[index(from, to)]; }
  double rr_energy(NodeId from, NodeId to) const { return rr_energy_[index(from, to)]; }

  void set(NodeId from, NodeId to, double cost, int available, double rr_energy);

 private:
  std::size_t index(NodeId from, NodeId to) const;

  std::size_t n_;
  std::vector<double> cost_;
  std::vector<int> available_;
  std::vector<double> rr_energy_;
};

/// cost for a link with the given relay-request energy and relay count.
double beam_link_cost(double rr_energy_j, int available_relays);

LinkCostTable build_link_costs(const Topology& topology, const ChannelModel& channel,
                               const EnergyModel& energy, const RelaySelectionParams& params);

struct Route {
  std::vector<NodeId> hops;  // source ... base station
  double total_cost = 0.0;

  std::size_t hop_count() const { return hops.empty() ? 0 : hops.size() - 1; }
};

class RouteTable {
 public:
  RouteTable() = default;
  explicit RouteTable(std::vector<std::optional<Route>> routes) : routes_(std::move(routes)) {}

  const std::optional<Route>& route(NodeId node) const { return routes_.at(node.value); }
  bool partitioned(NodeId node) const { return !routes_.at(node.value).has_value(); }
  std::size_t size() const { return routes_.size(); }
  std::vector<NodeId> partitioned_nodes() const;

 private:
  std::vector<std::optional<Route>> routes_;
};

/// Minimum-cost path from every node to the base station. Path cost is the
/// sum of link costs accumulated from the base station outwards
/// (c1 + (c2 + (... + ck))). Ties go to fewer hops, then the lowest next-hop id.
/// Dead nodes are never used.
RouteTable shortest_routes(const LinkCostTable& costs, const Topology& topology);

void write_routes_csv(std::ostream& os, const RouteTable& routes);

struct DeliveryOptions {
  bool beamforming = true;
  /// Fall back to the plain hop when the cooperative hop would cost more.
  bool energy_guard = true;
  EvidenceMode evidence_mode = EvidenceMode::kFractional;
};

enum class DeliveryStatus { kDelivered, kStaleRoute, kEnergyExhausted };

struct DeliveryResult {
  DeliveryStatus status = DeliveryStatus::kDelivered;
  std::vector<HopEnergyReport> reports;
  double energy_charged_j = 0.0;
  /// Hop index at which delivery stopped (== reports.size() when delivered).
  std::size_t stopped_at = 0;
};

/// Sends one frame from `source` along its route. Every hop's energy is
/// charged to the participating nodes and every constituent transmission is
/// recorded in `ledger`. A node whose residual energy reaches zero is dead.
DeliveryResult deliver_frame(NodeId source, const RouteTable& routes, Topology& topology,
                             const ChannelModel& channel, const EnergyModel& energy,
                             const RelaySelectionParams& params, const DeliveryOptions& options,
                             EvidenceLedger& ledger, std::uint64_t seed);

/// Splits nodes into clusters connected by single-node feasible links.
std::vector<std::vector<NodeId>> partition_clusters(std::span<const NodeId> nodes,
                                                    const Topology& topology,
                                                    const ChannelModel& channel);

/// Beam group letting `cluster` reach the nearest node of `connected`, if the
/// combined 10 log10(c) dB of the cluster closes the link budget from its
/// best-placed member. Coordination inside the cluster is free.
std::optional<BeamGroup> heal_partition(std::span<const NodeId> cluster,
                                        std::span<const NodeId> connected,
                                        const Topology& topology, const ChannelModel& channel,
                                        const EnergyModel& energy);

}  // namespace mcb
