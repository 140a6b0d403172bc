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

#include "mcb/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mcb/rng.hpp"

namespace mcb {

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void EnergyModel::validate() const {
  for (double v : {gamma_rr_bits, gamma_data_bits, gamma_ack_bits, k_est_bits, rate_bps,
                   body_bits}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("energy model fields must be > 0");
    }
  }
}

void BeamGroup::validate() const {
  if (source == destination) throw InvalidArgument("beam group source == destination");
  std::set<NodeId> seen;
  for (const auto& r : relays) {
    if (r.id == source || r.id == destination) {
      throw InvalidArgument("beam group relay coincides with source or destination");
    }
    if (!seen.insert(r.id).second) throw InvalidArgument("duplicate relay in beam group");
    if (!finite_nonneg(r.eps_to_source) || !finite_nonneg(r.eps_to_dest)) {
      throw InvalidArgument("missing link energy for relay " + std::to_string(r.id.value));
    }
  }
  if (!finite_nonneg(eps_source_dest) || !finite_nonneg(eps_dest_source)) {
    throw InvalidArgument("missing source/destination link energy");
  }
  if (!relays.empty() && !finite_nonneg(eps_source_relay)) {
    throw InvalidArgument("missing source->relay link energy");
  }
}

void RelaySelectionParams::validate() const {
  if (!(delta_min > 1.0)) throw InvalidArgument("relay delta_min must be > 1");
  if (!(delta_init >= delta_min)) throw InvalidArgument("relay delta_init must be >= delta_min");
  if (!(delta_step > 0.0)) throw InvalidArgument("relay delta_step must be > 0");
  if (max_rounds < 1) throw InvalidArgument("relay max_rounds must be >= 1");
  if (!(csi_noise_db >= 0.0)) throw InvalidArgument("relay csi_noise_db must be >= 0");
}

const char* to_string(HopMode mode) {
  switch (mode) {
    case HopMode::kBaseline:
      return "baseline";
    case HopMode::kCooperative:
      return "cooperative";
    case HopMode::kFailedSelection:
      return "failed-selection";
  }
  return "?";
}

double combining_gain_db(std::size_t num_relays) {
  return 10.0 * std::log10(static_cast<double>(num_relays) + 1.0);
}

double received_power_w(std::span<const double> per_node_tx_w,
                        std::span<const double> link_gains) {
  if (per_node_tx_w.size() != link_gains.size()) {
    throw InvalidArgument("received_power_w: power/gain size mismatch");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < per_node_tx_w.size(); ++j) {
    if (per_node_tx_w[j] < 0.0) throw InvalidArgument("negative transmit power");
    total += per_node_tx_w[j] * link_gains[j];
  }
  return total;
}

double energy_per_bit(double mean_tx_power_w, double rate_bps) {
  if (!(rate_bps > 0.0)) throw InvalidArgument("energy_per_bit: rate must be > 0");
  if (mean_tx_power_w < 0.0) throw InvalidArgument("energy_per_bit: negative power");
  return mean_tx_power_w / rate_bps;
}

double baseline_hop_energy(double eps_b_source_dest, const EnergyModel& model) {
  return eps_b_source_dest * model.body_bits;
}

HopEnergyReport baseline_hop_report(NodeId source, double eps_b_source_dest,
                                    const EnergyModel& model) {
  HopEnergyReport r;
  r.mode = HopMode::kBaseline;
  r.breakdown.data_from_source = baseline_hop_energy(eps_b_source_dest, model);
  r.total_joules = r.breakdown.sum();
  r.charges.push_back({source, r.total_joules});
  return r;
}

HopEnergyReport diban_hop_energy(const BeamGroup& group, const EnergyModel& model) {
  group.validate();
  if (group.relays.empty()) {
    return baseline_hop_report(group.source, group.eps_source_dest, model);
  }
  const double n = static_cast<double>(group.relays.size()) + 1.0;
  const double body = model.body_bits;

  HopEnergyReport r;
  r.mode = HopMode::kCooperative;
  r.relays_used = group.relays.size();
  auto& b = r.breakdown;
  b.relay_request = group.eps_source_relay * model.gamma_rr_bits;
  b.channel_estimation = group.eps_source_relay * model.k_est_bits;
  b.data_to_relays = group.eps_source_relay * (model.gamma_data_bits + body);
  b.data_from_source = group.eps_source_dest * body / n;
  b.destination_ack = group.eps_dest_source * model.gamma_ack_bits;

  r.charges.push_back({group.source, b.relay_request + b.channel_estimation +
                                         b.data_to_relays + b.data_from_source});
  for (const auto& relay : group.relays) {
    const double ack = relay.eps_to_source * model.gamma_ack_bits;
    const double data = relay.eps_to_dest * body / n;
    b.relay_acks += ack;
    b.data_from_relays += data;
    r.charges.push_back({relay.id, ack + data});
  }
  r.charges.push_back({group.destination, b.destination_ack});
  r.total_joules = b.sum();
  return r;
}

double relay_request_energy(double eps_b_source_relay, std::size_t responders, int rounds,
                            const EnergyModel& model, double eps_b_relay_source) {
  if (rounds < 1) throw InvalidArgument("relay_request_energy: rounds must be >= 1");
  const double per_round = eps_b_source_relay * model.gamma_rr_bits +
                           model.gamma_ack_bits * static_cast<double>(responders) *
                               eps_b_relay_source;
  return per_round * rounds;
}

double relay_request_energy(std::span<const RequestRound> rounds, const EnergyModel& model) {
  double total = 0.0;
  for (const auto& round : rounds) {
    double acks = 0.0;
    for (double e : round.eps_responders_to_source) acks += e;
    total += round.eps_source_relay * model.gamma_rr_bits + model.gamma_ack_bits * acks;
  }
  return total;
}

double SelectionRound::energy_j() const {
  double total = request_j;
  for (double a : responder_ack_j) total += a;
  return total;
}

double expected_candidates(double density_lambda, double d_source_dest_m, double delta) {
  if (!(delta > 1.0)) {
    throw DomainError("delta must be > 1: delta = 1 means the broadcast reaches the destination");
  }
  if (!(d_source_dest_m > 0.0)) throw InvalidArgument("source-destination distance must be > 0");
  if (density_lambda < 0.0) throw InvalidArgument("density must be >= 0");
  const double r = d_source_dest_m / delta;
  return density_lambda * M_PI * r * r / 8.0;
}

SelectionResult select_relays(NodeId source, NodeId dest, const Topology& topology,
                              const ChannelModel& channel, const RelaySelectionParams& params,
                              const CsiMap& csi_quality, const EnergyModel& model) {
  params.validate();
  if (source == dest) throw InvalidArgument("select_relays: source == destination");
  SelectionResult result;
  const NodeState& src = topology.node(source);
  const NodeState& dst = topology.node(dest);
  const double d = distance(src.position, dst.position);
  if (!(d > 0.0)) return result;

  result.source_dest_dbm = link_budget_dbm(d, channel);
  // |L_D| is fixed by the initial delta; later rounds only widen the radius.
  const double expected = expected_candidates(topology.density(), d, params.delta_init);
  result.target = static_cast<std::size_t>(std::ceil(expected - 1e-9));
  if (result.target == 0) result.target = 1;

  std::vector<RequestRound> energy_rounds;
  double delta = params.delta_init;
  for (int round = 0; round < params.max_rounds; ++round) {
    const double radius = d / delta;
    const double broadcast = link_budget_dbm(radius, channel);
    if (!(broadcast < result.source_dest_dbm) || broadcast > src.max_tx_power_dbm) break;

    SelectionRound sr{delta, radius, broadcast, {}, 0.0, {}};
    RequestRound er{energy_per_bit(dbm_to_watts(broadcast), model.rate_bps), {}};
    sr.request_j = er.eps_source_relay * model.gamma_rr_bits;
    for (const auto& n : topology.nodes()) {
      if (n.id == source || n.id == dest || n.is_base_station) continue;
      if (!(n.residual_energy_j > params.responder_energy_floor_j)) continue;
      const double dn = distance(n.position, src.position);
      if (dn > radius) continue;
      sr.responders.push_back(n.id);
      const double back = dn > 0.0 ? link_budget_dbm(dn, channel) : channel.required_rx_dbm();
      er.eps_responders_to_source.push_back(energy_per_bit(dbm_to_watts(back), model.rate_bps));
      sr.responder_ack_j.push_back(er.eps_responders_to_source.back() * model.gamma_ack_bits);
    }
    result.rounds.push_back(sr);
    energy_rounds.push_back(std::move(er));

    if (sr.responders.size() >= result.target) {
      std::vector<NodeId> ranked = sr.responders;
      auto score = [&](NodeId id) {
        auto it = csi_quality.find(id);
        return it == csi_quality.end() ? -std::numeric_limits<double>::infinity() : it->second;
      };
      std::stable_sort(ranked.begin(), ranked.end(), [&](NodeId a, NodeId b) {
        const double sa = score(a), sb = score(b);
        if (sa != sb) return sa > sb;
        return a < b;
      });
      ranked.resize(result.target);
      result.relays = std::move(ranked);
      break;
    }
    if (delta <= params.delta_min + 1e-12) break;
    delta = std::max(delta - params.delta_step, params.delta_min);
  }
  result.request_energy_j = relay_request_energy(energy_rounds, model);
  return result;
}

CsiMap csi_towards(NodeId dest, const Topology& topology, const ChannelModel& channel,
                   double csi_noise_db, std::uint64_t seed) {
  CsiMap csi;
  Rng rng(derive_seed(seed, "csi", dest.value));
  const Point& d = topology.node(dest).position;
  for (const auto& n : topology.nodes()) {
    if (n.id == dest) continue;
    const double dist = distance(n.position, d);
    double score = dist > 0.0 ? -path_loss_db(dist, channel) : 0.0;
    if (csi_noise_db > 0.0) score += csi_noise_db * rng.normal();
    csi.emplace(n.id, score);
  }
  return csi;
}

}  // namespace mcb
