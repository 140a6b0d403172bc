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
#include <span>
#include <unordered_map>
#include <vector>

#include "mcb/common.hpp"
#include "mcb/topology.hpp"

namespace mcb {

/// Frame/header sizes and radio rate driving the cooperative hop energy.
struct EnergyModel {
  double gamma_rr_bits = 160.0;    // relay request header
  double gamma_data_bits = 160.0;  // multihop data header
  double gamma_ack_bits = 96.0;    // ack / nack header
  double k_est_bits = 25.0;        // channel estimation, K = t * r
  double rate_bps = 250e3;
  double body_bits = 4096.0;       // average frame body

  void validate() const;
};

/// Per-bit energies of one relay in a beam group.
struct RelayLink {
  NodeId id;
  double eps_to_source = 0.0;  // J/bit, relay -> source (acks)
  double eps_to_dest = 0.0;    // J/bit, relay -> destination at full single-node power
};

/// Source, auxiliary relays and destination of a cooperative hop, with the
/// per-bit energies of every link the protocol uses.
struct BeamGroup {
  NodeId source;
  NodeId destination;
  std::vector<RelayLink> relays;
  double eps_source_relay = 0.0;  // J/bit of the relay-request broadcast power
  double eps_source_dest = 0.0;
  double eps_dest_source = 0.0;

  void validate() const;
};

struct RelaySelectionParams {
  double delta_init = 3.0;
  double delta_step = 0.25;
  double delta_min = 1.25;
  int max_rounds = 8;
  double responder_energy_floor_j = 0.0;
  /// Standard deviation (dB) of the noise added to each csi score.
  double csi_noise_db = 0.0;

  void validate() const;
};

enum class HopMode { kBaseline, kCooperative, kFailedSelection };

const char* to_string(HopMode mode);

struct HopEnergyBreakdown {
  double relay_request = 0.0;       // gamma_RR at broadcast power
  double channel_estimation = 0.0;  // K at broadcast power
  double data_to_relays = 0.0;      // gamma_data + body at broadcast power
  double data_from_source = 0.0;    // source's share of the beamformed body
  double data_from_relays = 0.0;    // relays' share of the beamformed body
  double relay_acks = 0.0;
  double destination_ack = 0.0;
  double wasted_requests = 0.0;     // relay-request rounds that did not produce L

  double sum() const {
    return relay_request + channel_estimation + data_to_relays + data_from_source +
           data_from_relays + relay_acks + destination_ack + wasted_requests;
  }
};

struct EnergyCharge {
  NodeId node;
  double joules = 0.0;
};

struct HopEnergyReport {
  HopMode mode = HopMode::kBaseline;
  double total_joules = 0.0;
  HopEnergyBreakdown breakdown;
  std::size_t relays_used = 0;
  /// Who pays what; sums to total_joules.
  std::vector<EnergyCharge> charges;
};

/// 10 log10(|L| + 1).
double combining_gain_db(std::size_t num_relays);

/// Ideal power-domain combining at the destination: sum_j P_j g_j. With
/// every one of n transmitters at P/n over equal gains g, this is P g.
double received_power_w(std::span<const double> per_node_tx_w,
                        std::span<const double> link_gains);

/// epsilon_b = mean transmit power / rate.
double energy_per_bit(double mean_tx_power_w, double rate_bps);

/// Non-cooperative hop: epsilon_b(S->D) * body.
double baseline_hop_energy(double eps_b_source_dest, const EnergyModel& model);

/// Baseline report charging `source`.
HopEnergyReport baseline_hop_report(NodeId source, double eps_b_source_dest,
                                    const EnergyModel& model);

/// Cooperative hop energy, summed term by term. For |L| = 0 the report is
/// the baseline hop.
HopEnergyReport diban_hop_energy(const BeamGroup& group, const EnergyModel& model);

/// Relay-request energy of `rounds` identical rounds, each with
/// `responders` acks at `eps_b_relay_source`.
double relay_request_energy(double eps_b_source_relay, std::size_t responders,
                            int rounds, const EnergyModel& model,
                            double eps_b_relay_source);

/// Same, for rounds with heterogeneous responders: one entry per round
/// holding each responder's relay->source J/bit.
struct RequestRound {
  double eps_source_relay = 0.0;
  std::vector<double> eps_responders_to_source;
};
double relay_request_energy(std::span<const RequestRound> rounds, const EnergyModel& model);

/// Expected candidates in the half disc of radius d/delta:
/// lambda * pi * (d/delta)^2 / 8. Throws DomainError for delta <= 1.
double expected_candidates(double density_lambda, double d_source_dest_m, double delta);

struct SelectionRound {
  double delta = 0.0;
  double radius_m = 0.0;
  double broadcast_dbm = 0.0;
  std::vector<NodeId> responders;
  double request_j = 0.0;                // source: gamma_RR at broadcast power
  std::vector<double> responder_ack_j;   // parallel to responders

  double energy_j() const;
};

struct SelectionResult {
  std::vector<NodeId> relays;
  /// Target |L_D|, fixed from delta_init.
  std::size_t target = 0;
  std::vector<SelectionRound> rounds;
  double source_dest_dbm = 0.0;
  /// Relay-request energy over every attempted round.
  double request_energy_j = 0.0;

  bool succeeded() const { return !relays.empty(); }
  int rounds_used() const { return static_cast<int>(rounds.size()); }
};

/// csi score per node; larger is better. Nodes absent from the map score
/// -infinity.
using CsiMap = std::unordered_map<NodeId, double>;

/// Iterated relay selection. Starts at delta_init, broadcasts a relay request
/// reaching d/delta, and shrinks delta by delta_step while fewer than |L_D|
/// nodes respond; gives up (empty L) after the round at delta_min. Surplus
/// responders are ranked by csi, ties to the lowest id. The broadcast power
/// is always strictly below the direct source->destination power.
SelectionResult select_relays(NodeId source, NodeId dest, const Topology& topology,
                              const ChannelModel& channel, const RelaySelectionParams& params,
                              const CsiMap& csi_quality, const EnergyModel& model);

/// csi score used by the simulator: channel gain to `dest` in dB plus
/// N(0, csi_noise_db^2) noise per candidate.
CsiMap csi_towards(NodeId dest, const Topology& topology, const ChannelModel& channel,
                   double csi_noise_db, std::uint64_t seed);

}  // namespace mcb
