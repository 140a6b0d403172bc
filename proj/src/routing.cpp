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

#include "mcb/routing.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

#include "mcb/csv.hpp"
#include "mcb/rng.hpp"

namespace mcb {

LinkCostTable::LinkCostTable(std::size_t node_count)
    : n_(node_count),
      cost_(node_count * node_count, kInfiniteCost),
      available_(node_count * node_count, 0),
      rr_energy_(node_count * node_count, 0.0) {}

std::size_t LinkCostTable::index(NodeId from, NodeId to) const {
  if (from.value >= n_ || to.value >= n_) throw InvalidArgument("link cost index out of range");
  return static_cast<std::size_t>(from.value) * n_ + to.value;
}

void LinkCostTable::set(NodeId from, NodeId to, double cost, int available, double rr_energy) {
  if (!(cost >= 0.0)) throw InvalidArgument("link cost must be >= 0");
  const auto i = index(from, to);
  cost_[i] = cost;
  available_[i] = available;
  rr_energy_[i] = rr_energy;
}

double beam_link_cost(double rr_energy_j, int available_relays) {
  if (available_relays <= 0) return kInfiniteCost;
  return rr_energy_j / static_cast<double>(available_relays);
}

LinkCostTable build_link_costs(const Topology& topology, const ChannelModel& channel,
                               const EnergyModel& energy, const RelaySelectionParams& params) {
  params.validate();
  energy.validate();
  const auto nodes = topology.nodes();
  const std::size_t n = nodes.size();
  LinkCostTable table(n);

  for (const auto& u : nodes) {
    if (!u.alive()) continue;
    for (const auto& v : nodes) {
      if (u.id == v.id || !v.alive()) continue;
      const double d = distance(u.position, v.position);
      if (!(d > 0.0)) continue;
      const double direct = link_budget_dbm(d, channel);
      if (direct > u.max_tx_power_dbm) continue;

      const double radius = d / params.delta_init;
      const double broadcast = link_budget_dbm(radius, channel);
      if (!(broadcast < direct)) continue;
      const double eps_sr = energy_per_bit(dbm_to_watts(broadcast), energy.rate_bps);

      int available = 0;
      double acks = 0.0;
      for (const auto& w : nodes) {
        if (w.id == u.id || w.id == v.id || w.is_base_station) continue;
        if (!(w.residual_energy_j > params.responder_energy_floor_j)) continue;
        const double dw = distance(w.position, u.position);
        if (dw > radius) continue;
        ++available;
        const double back = dw > 0.0 ? link_budget_dbm(dw, channel) : channel.required_rx_dbm();
        acks += energy_per_bit(dbm_to_watts(back), energy.rate_bps);
      }
      const double rr = eps_sr * energy.gamma_rr_bits + energy.gamma_ack_bits * acks;
      table.set(u.id, v.id, beam_link_cost(rr, available), available, rr);
    }
  }
  return table;
}

std::vector<NodeId> RouteTable::partitioned_nodes() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < routes_.size(); ++i) {
    if (!routes_[i]) out.push_back(NodeId{static_cast<std::uint32_t>(i)});
  }
  return out;
}

RouteTable shortest_routes(const LinkCostTable& costs, const Topology& topology) {
  const std::size_t n = topology.size();
  if (costs.size() != n) throw InvalidArgument("cost table does not match topology");

  struct Label {
    double cost = kInfiniteCost;
    std::size_t hops = 0;
    std::uint32_t next = UINT32_MAX;
  };
  auto key = [](const Label& l) { return std::tie(l.cost, l.hops, l.next); };

  std::vector<Label> label(n);
  std::vector<char> settled(n, 0);
  const NodeId bs = topology.base_station();
  label[bs.value] = {0.0, 0, bs.value};

  for (;;) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (settled[i] || !std::isfinite(label[i].cost)) continue;
      if (best == n || key(label[i]) < key(label[best])) best = i;
    }
    if (best == n) break;
    settled[best] = 1;
    const NodeId via{static_cast<std::uint32_t>(best)};
    for (std::size_t u = 0; u < n; ++u) {
      if (settled[u]) continue;
      const NodeId from{static_cast<std::uint32_t>(u)};
      if (!topology.node(from).alive()) continue;
      const double c = costs.cost(from, via);
      if (!std::isfinite(c)) continue;
      const Label cand{c + label[best].cost, label[best].hops + 1, via.value};
      if (key(cand) < key(label[u])) label[u] = cand;
    }
  }

  std::vector<std::optional<Route>> routes(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(label[i].cost)) continue;
    Route r;
    r.total_cost = label[i].cost;
    NodeId cur{static_cast<std::uint32_t>(i)};
    r.hops.push_back(cur);
    while (cur != bs) {
      cur = NodeId{label[cur.value].next};
      r.hops.push_back(cur);
    }
    routes[i] = std::move(r);
  }
  return RouteTable(std::move(routes));
}

void write_routes_csv(std::ostream& os, const RouteTable& routes) {
  csv::write_row(os, {"node", "next_hop", "hops", "total_cost", "partitioned"});
  for (std::size_t i = 0; i < routes.size(); ++i) {
    const auto& r = routes.route(NodeId{static_cast<std::uint32_t>(i)});
    if (!r) {
      csv::write_row(os, {std::to_string(i), "", "", "inf", "1"});
      continue;
    }
    const std::string next = r->hops.size() > 1 ? std::to_string(r->hops[1].value) : "";
    csv::write_row(os, {std::to_string(i), next, std::to_string(r->hop_count()),
                        csv::number(r->total_cost), "0"});
  }
}

namespace {

double eps_for(double distance_m, const ChannelModel& channel, const EnergyModel& energy) {
  const double dbm = distance_m > 0.0 ? link_budget_dbm(distance_m, channel)
                                      : channel.required_rx_dbm();
  return energy_per_bit(dbm_to_watts(dbm), energy.rate_bps);
}

void record_rounds(EvidenceLedger& ledger, const Topology& topology, NodeId source,
                   std::span<const SelectionRound> rounds) {
  const Point& s = topology.node(source).position;
  for (const auto& round : rounds) {
    std::vector<Point> rx;
    for (NodeId r : round.responders) rx.push_back(topology.node(r).position);
    record_broadcast(ledger, s, rx);
    for (const auto& p : rx) record_transmission(ledger, p, s);
  }
}

void add_round_charges(HopEnergyReport& report, NodeId source, const SelectionRound& round,
                       double& wasted) {
  report.charges.push_back({source, round.request_j});
  wasted += round.request_j;
  for (std::size_t k = 0; k < round.responders.size(); ++k) {
    report.charges.push_back({round.responders[k], round.responder_ack_j[k]});
    wasted += round.responder_ack_j[k];
  }
}

}  // namespace

DeliveryResult deliver_frame(NodeId source, const RouteTable& routes, Topology& topology,
                             const ChannelModel& channel, const EnergyModel& energy,
                             const RelaySelectionParams& params, const DeliveryOptions& options,
                             EvidenceLedger& ledger, std::uint64_t seed) {
  const auto& route = routes.route(source);
  if (!route) throw InvalidArgument("deliver_frame: source has no route");
  DeliveryResult result;
  const auto& hops = route->hops;

  for (std::size_t h = 0; h + 1 < hops.size(); ++h) {
    result.stopped_at = h;
    const NodeId u = hops[h];
    const NodeId v = hops[h + 1];
    const NodeState& su = topology.node(u);
    const NodeState& sv = topology.node(v);
    if (!su.alive() || !sv.alive()) {
      result.status = DeliveryStatus::kStaleRoute;
      return result;
    }
    const double d = distance(su.position, sv.position);
    if (!(d > 0.0) || link_budget_dbm(d, channel) > su.max_tx_power_dbm) {
      result.status = DeliveryStatus::kStaleRoute;
      return result;
    }
    const double eps_sd = eps_for(d, channel, energy);
    const HopEnergyReport plain = baseline_hop_report(u, eps_sd, energy);

    HopEnergyReport report = plain;
    bool cooperative = false;
    SelectionResult sel;
    if (options.beamforming) {
      const CsiMap csi =
          csi_towards(v, topology, channel, params.csi_noise_db, derive_seed(seed, "hop", h));
      sel = select_relays(u, v, topology, channel, params, csi, energy);
    }

    if (sel.succeeded()) {
      const SelectionRound& last = sel.rounds.back();
      BeamGroup group;
      group.source = u;
      group.destination = v;
      group.eps_source_relay = energy_per_bit(dbm_to_watts(last.broadcast_dbm), energy.rate_bps);
      group.eps_source_dest = eps_sd;
      group.eps_dest_source = eps_sd;
      const double share = 1.0 / (static_cast<double>(sel.relays.size()) + 1.0);
      bool relays_in_range = true;
      for (NodeId r : sel.relays) {
        const auto& sr = topology.node(r);
        const double d_rd = distance(sr.position, sv.position);
        const double need = dbm_to_watts(d_rd > 0.0 ? link_budget_dbm(d_rd, channel)
                                                    : channel.required_rx_dbm());
        if (need * share > dbm_to_watts(sr.max_tx_power_dbm)) relays_in_range = false;
        group.relays.push_back({r, eps_for(distance(sr.position, su.position), channel, energy),
                                eps_for(d_rd, channel, energy)});
      }
      HopEnergyReport coop = diban_hop_energy(group, energy);
      // Earlier rounds and the unselected responders of the final round
      // spent their energy without contributing to L.
      double wasted = 0.0;
      for (std::size_t k = 0; k + 1 < sel.rounds.size(); ++k) {
        add_round_charges(coop, u, sel.rounds[k], wasted);
      }
      for (std::size_t k = 0; k < last.responders.size(); ++k) {
        if (std::find(sel.relays.begin(), sel.relays.end(), last.responders[k]) ==
            sel.relays.end()) {
          coop.charges.push_back({last.responders[k], last.responder_ack_j[k]});
          wasted += last.responder_ack_j[k];
        }
      }
      coop.breakdown.wasted_requests = wasted;
      coop.total_joules = coop.breakdown.sum();

      const double fallback = plain.total_joules + sel.request_energy_j;
      if (relays_in_range && (!options.energy_guard || coop.total_joules < fallback)) {
        report = std::move(coop);
        cooperative = true;
      }
    }
    if (options.beamforming && !cooperative && !sel.rounds.empty()) {
      double wasted = 0.0;
      for (const auto& round : sel.rounds) add_round_charges(report, u, round, wasted);
      report.breakdown.wasted_requests = wasted;
      report.total_joules = report.breakdown.sum();
      if (!sel.succeeded()) report.mode = HopMode::kFailedSelection;
    }

    // Ledger: handshake rounds, body hand-off, beamformed burst, final ack.
    const Point& pu = su.position;
    const Point& pv = sv.position;
    if (options.beamforming) record_rounds(ledger, topology, u, sel.rounds);
    if (cooperative) {
      std::vector<Point> relay_pos;
      for (NodeId r : sel.relays) relay_pos.push_back(topology.node(r).position);
      record_broadcast(ledger, pu, relay_pos);
      std::vector<Point> tx{pu};
      tx.insert(tx.end(), relay_pos.begin(), relay_pos.end());
      record_beamformed(ledger, tx, pv, options.evidence_mode);
      record_transmission(ledger, pv, pu);
    } else {
      record_transmission(ledger, pu, pv);
    }

    for (const auto& c : report.charges) {
      auto& node = topology.mutable_node(c.node);
      node.residual_energy_j = std::max(0.0, node.residual_energy_j - c.joules);
      result.energy_charged_j += c.joules;
    }
    result.reports.push_back(std::move(report));

    for (std::size_t k = h + 1; k < hops.size(); ++k) {
      if (!topology.node(hops[k]).alive()) {
        result.status = DeliveryStatus::kEnergyExhausted;
        result.stopped_at = h + 1;
        return result;
      }
    }
  }
  result.stopped_at = result.reports.size();
  result.status = DeliveryStatus::kDelivered;
  return result;
}

std::vector<std::vector<NodeId>> partition_clusters(std::span<const NodeId> nodes,
                                                    const Topology& topology,
                                                    const ChannelModel& channel) {
  std::vector<std::vector<NodeId>> clusters;
  std::vector<char> done(nodes.size(), 0);
  for (std::size_t s = 0; s < nodes.size(); ++s) {
    if (done[s]) continue;
    std::vector<NodeId> cluster{nodes[s]};
    done[s] = 1;
    for (std::size_t head = 0; head < cluster.size(); ++head) {
      const auto& a = topology.node(cluster[head]);
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (done[k]) continue;
        const auto& b = topology.node(nodes[k]);
        const double d = distance(a.position, b.position);
        const bool linked = d <= 0.0 || link_budget_dbm(d, channel) <=
                                            std::min(a.max_tx_power_dbm, b.max_tx_power_dbm);
        if (linked) {
          done[k] = 1;
          cluster.push_back(nodes[k]);
        }
      }
    }
    std::sort(cluster.begin(), cluster.end());
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

std::optional<BeamGroup> heal_partition(std::span<const NodeId> cluster,
                                        std::span<const NodeId> connected,
                                        const Topology& topology, const ChannelModel& channel,
                                        const EnergyModel& energy) {
  if (cluster.empty() || connected.empty()) return std::nullopt;
  NodeId best_src = cluster.front();
  NodeId best_dst = connected.front();
  double best_d = kInfiniteCost;
  for (NodeId m : cluster) {
    for (NodeId t : connected) {
      const double d = distance(topology.node(m).position, topology.node(t).position);
      if (d < best_d) {
        best_d = d;
        best_src = m;
        best_dst = t;
      }
    }
  }
  const double gain = combining_gain_db(cluster.size() - 1);
  const double need = best_d > 0.0 ? link_budget_dbm(best_d, channel) : channel.required_rx_dbm();
  constexpr double kTolDb = 1e-9;
  if (need > topology.node(best_src).max_tx_power_dbm + gain + kTolDb) return std::nullopt;

  BeamGroup g;
  g.source = best_src;
  g.destination = best_dst;
  g.eps_source_relay = 0.0;
  g.eps_source_dest = energy_per_bit(dbm_to_watts(need), energy.rate_bps);
  g.eps_dest_source = g.eps_source_dest;
  const Point& dst = topology.node(best_dst).position;
  const Point& src = topology.node(best_src).position;
  for (NodeId m : cluster) {
    if (m == best_src) continue;
    const Point& p = topology.node(m).position;
    g.relays.push_back({m, eps_for(distance(p, src), channel, energy),
                        eps_for(distance(p, dst), channel, energy)});
  }
  return g;
}

}  // namespace mcb
