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

#include "mcb/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "mcb/csv.hpp"

namespace mcb {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw InvalidArgument(key + ": expected a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw InvalidArgument(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw InvalidArgument(key + ": expected an unsigned integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw InvalidArgument(key + ": expected true or false, got '" + v + "'");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

struct Field {
  std::string key;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, const std::string&)> set;
};

template <class Ref>
Field real(std::string key, Ref ref) {
  return {key, [ref](const ScenarioConfig& c) { return csv::number(ref(c)); },
          [ref, key](ScenarioConfig& c, const std::string& v) { ref(c) = to_double(key, v); }};
}

template <class Ref>
Field integer(std::string key, Ref ref) {
  return {key, [ref](const ScenarioConfig& c) { return std::to_string(ref(c)); },
          [ref, key](ScenarioConfig& c, const std::string& v) {
            ref(c) = static_cast<int>(to_int(key, v));
          }};
}

template <class Ref>
Field boolean(std::string key, Ref ref) {
  return {key, [ref](const ScenarioConfig& c) { return from_bool(ref(c)); },
          [ref, key](ScenarioConfig& c, const std::string& v) { ref(c) = to_bool(key, v); }};
}

template <class Ref>
Field text(std::string key, Ref ref) {
  return {key, [ref](const ScenarioConfig& c) { return ref(c); },
          [ref](ScenarioConfig& c, const std::string& v) { ref(c) = v; }};
}

#define MCB_REF(expr) [](auto& c) -> auto& { return c.expr; }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    // topology
    f.push_back(integer("topology.node_count", MCB_REF(topology.placement.node_count)));
    f.push_back(real("topology.side_m", MCB_REF(topology.placement.grid.side_m)));
    f.push_back(integer("topology.cells_per_side", MCB_REF(topology.placement.grid.cells_per_side)));
    f.push_back(integer("topology.bs_cell", MCB_REF(topology.placement.bs_cell)));
    f.push_back({"topology.placement",
                 [](const ScenarioConfig& c) -> std::string {
                   return c.topology.placement.placement == Placement::kUniform ? "uniform" : "hotspot";
                 },
                 [](ScenarioConfig& c, const std::string& v) {
                   if (v == "uniform") {
                     c.topology.placement.placement = Placement::kUniform;
                   } else if (v == "hotspot") {
                     c.topology.placement.placement = Placement::kHotspot;
                   } else {
                     throw InvalidArgument("topology.placement: expected uniform or hotspot");
                   }
                 }});
    f.push_back(integer("topology.hotspot_count", MCB_REF(topology.placement.hotspot_count)));
    f.push_back(real("topology.hotspot_sigma_m", MCB_REF(topology.placement.hotspot_sigma_m)));
    f.push_back(real("topology.initial_energy_j", MCB_REF(topology.placement.initial_energy_j)));
    f.push_back(real("topology.node_max_power_dbm", MCB_REF(topology.placement.node_max_power_dbm)));
    f.push_back(real("topology.bs_max_power_dbm", MCB_REF(topology.placement.bs_max_power_dbm)));
    f.push_back(boolean("topology.mobility", MCB_REF(topology.mobility)));
    f.push_back(real("topology.speed_min_mps", MCB_REF(topology.mobility_params.speed_min_mps)));
    f.push_back(real("topology.speed_max_mps", MCB_REF(topology.mobility_params.speed_max_mps)));
    f.push_back(real("topology.pause_s", MCB_REF(topology.mobility_params.pause_s)));
    f.push_back(real("topology.mobility_step_s", MCB_REF(topology.mobility_step_s)));
    // channel
    f.push_back({"channel.model",
                 [](const ScenarioConfig& c) -> std::string {
                   return c.channel.model_kind == PathLossModel::kLogDistance ? "log-distance"
                                                                              : "okumura-hata";
                 },
                 [](ScenarioConfig& c, const std::string& v) {
                   if (v == "log-distance") {
                     c.channel.model_kind = PathLossModel::kLogDistance;
                   } else if (v == "okumura-hata") {
                     c.channel.model_kind = PathLossModel::kOkumuraHata;
                   } else {
                     throw InvalidArgument("channel.model: expected log-distance or okumura-hata");
                   }
                 }});
    f.push_back(real("channel.path_loss_exponent", MCB_REF(channel.path_loss_exponent)));
    f.push_back(real("channel.reference_loss_db", MCB_REF(channel.reference_loss_db)));
    f.push_back(real("channel.noise_power_w", MCB_REF(channel.noise_power_w)));
    f.push_back(real("channel.bandwidth_hz", MCB_REF(channel.bandwidth_hz)));
    f.push_back(real("channel.rx_sensitivity_dbm", MCB_REF(channel.rx_sensitivity_dbm)));
    f.push_back(real("channel.min_snr_db", MCB_REF(channel.min_snr_db)));
    f.push_back(real("channel.tx_loss_db", MCB_REF(channel.tx_loss_db)));
    f.push_back(real("channel.rx_loss_db", MCB_REF(channel.rx_loss_db)));
    f.push_back(real("channel.tx_backoff_db", MCB_REF(channel.tx_backoff_db)));
    f.push_back(real("channel.link_margin_db", MCB_REF(channel.link_margin_db)));
    f.push_back(real("channel.hata_frequency_mhz", MCB_REF(channel.hata_frequency_mhz)));
    f.push_back(real("channel.hata_bs_height_m", MCB_REF(channel.hata_bs_height_m)));
    f.push_back(real("channel.hata_ms_height_m", MCB_REF(channel.hata_ms_height_m)));
    // energy
    f.push_back(real("energy.gamma_rr_bits", MCB_REF(energy.gamma_rr_bits)));
    f.push_back(real("energy.gamma_data_bits", MCB_REF(energy.gamma_data_bits)));
    f.push_back(real("energy.gamma_ack_bits", MCB_REF(energy.gamma_ack_bits)));
    f.push_back(real("energy.k_est_bits", MCB_REF(energy.k_est_bits)));
    f.push_back(real("energy.rate_bps", MCB_REF(energy.rate_bps)));
    f.push_back(real("energy.body_bits", MCB_REF(energy.body_bits)));
    // relay selection
    f.push_back(real("relay.delta_init", MCB_REF(relay.delta_init)));
    f.push_back(real("relay.delta_step", MCB_REF(relay.delta_step)));
    f.push_back(real("relay.delta_min", MCB_REF(relay.delta_min)));
    f.push_back(integer("relay.max_rounds", MCB_REF(relay.max_rounds)));
    f.push_back(real("relay.responder_energy_floor_j", MCB_REF(relay.responder_energy_floor_j)));
    f.push_back(real("relay.csi_noise_db", MCB_REF(relay.csi_noise_db)));
    // adversary
    f.push_back(integer("adversary.max_hops", MCB_REF(adversary.max_hops)));
    f.push_back({"adversary.evidence_mode",
                 [](const ScenarioConfig& c) -> std::string {
                   return c.adversary.evidence_mode == EvidenceMode::kFractional ? "fractional"
                                                                                 : "threshold";
                 },
                 [](ScenarioConfig& c, const std::string& v) {
                   if (v == "fractional") {
                     c.adversary.evidence_mode = EvidenceMode::kFractional;
                   } else if (v == "threshold") {
                     c.adversary.evidence_mode = EvidenceMode::kThreshold;
                   } else {
                     throw InvalidArgument("adversary.evidence_mode: expected fractional or threshold");
                   }
                 }});
    // optimizer
    f.push_back(integer("optimizer.small_cell_count", MCB_REF(optimizer.small_cell_count)));
    f.push_back(real("optimizer.small_cell_radius_fraction", MCB_REF(optimizer.small_cell_radius_fraction)));
    f.push_back(integer("optimizer.file_count", MCB_REF(optimizer.file_count)));
    f.push_back(real("optimizer.zipf_alpha", MCB_REF(optimizer.zipf_alpha)));
    f.push_back(integer("optimizer.macro_cache", MCB_REF(optimizer.macro_cache)));
    f.push_back(integer("optimizer.small_cache", MCB_REF(optimizer.small_cache)));
    f.push_back(real("optimizer.gamma_min_db", MCB_REF(optimizer.gamma_min_db)));
    f.push_back(real("optimizer.eta", MCB_REF(optimizer.eta)));
    f.push_back(real("optimizer.sharing_index", MCB_REF(optimizer.sharing_index)));
    f.push_back(real("optimizer.bandwidth_share", MCB_REF(optimizer.bandwidth_share)));
    f.push_back(real("optimizer.macro_max_power_dbm", MCB_REF(optimizer.macro_max_power_dbm)));
    f.push_back(real("optimizer.small_max_power_dbm", MCB_REF(optimizer.small_max_power_dbm)));
    f.push_back(real("optimizer.macro_harvest_w", MCB_REF(optimizer.macro_harvest_w)));
    f.push_back(real("optimizer.small_harvest_w", MCB_REF(optimizer.small_harvest_w)));
    f.push_back(real("optimizer.circuit_power_w", MCB_REF(optimizer.circuit_power_w)));
    f.push_back(real("optimizer.backhaul_capacity_bps", MCB_REF(optimizer.backhaul_capacity_bps)));
    f.push_back(boolean("optimizer.fix_edge_snr", MCB_REF(optimizer.fix_edge_snr)));
    f.push_back(real("optimizer.edge_snr_db", MCB_REF(optimizer.edge_snr_db)));
    f.push_back(integer("optimizer.max_iter", MCB_REF(optimizer.max_iter)));
    f.push_back(real("optimizer.tol", MCB_REF(optimizer.tol)));
    f.push_back(real("optimizer.step0", MCB_REF(optimizer.step0)));
    f.push_back(boolean("optimizer.local_search", MCB_REF(optimizer.local_search)));
    f.push_back(boolean("optimizer.power_refinement", MCB_REF(optimizer.power_refinement)));
    // run
    f.push_back(integer("run.frames", MCB_REF(run.frames)));
    f.push_back(integer("run.replications", MCB_REF(run.replications)));
    f.push_back({"run.seed_base",
                 [](const ScenarioConfig& c) { return std::to_string(c.run.seed_base); },
                 [](ScenarioConfig& c, const std::string& v) {
                   c.run.seed_base = to_u64("run.seed_base", v);
                 }});
    f.push_back(boolean("run.beamforming", MCB_REF(run.beamforming)));
    f.push_back(boolean("run.energy_guard", MCB_REF(run.energy_guard)));
    f.push_back({"run.scheme", [](const ScenarioConfig& c) -> std::string { return to_string(c.run.scheme); },
                 [](ScenarioConfig& c, const std::string& v) { c.run.scheme = parse_scheme(v); }});
    f.push_back({"run.baselines",
                 [](const ScenarioConfig& c) {
                   std::string out;
                   for (Scheme s : c.run.baselines) {
                     if (!out.empty()) out += ',';
                     out += to_string(s);
                   }
                   return out;
                 },
                 [](ScenarioConfig& c, const std::string& v) {
                   c.run.baselines.clear();
                   std::stringstream ss(v);
                   std::string item;
                   while (std::getline(ss, item, ',')) {
                     item = trim(item);
                     if (!item.empty()) c.run.baselines.push_back(parse_scheme(item));
                   }
                 }});
    f.push_back(integer("run.route_refresh_frames", MCB_REF(run.route_refresh_frames)));
    // inert metadata
    f.push_back(text("meta.codec", MCB_REF(codec)));
    f.push_back(text("meta.fairness_index", MCB_REF(fairness_index)));
    return f;
  }();
  return table;
}

#undef MCB_REF

const Field* find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

void require(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) throw InvalidArgument(field + " " + rule);
}

}  // namespace

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kMcb: return "mcb-msn";
    case Scheme::kFpa: return "fpa";
    case Scheme::kRpa: return "rpa";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "mcb-msn" || name == "mcb") return Scheme::kMcb;
  if (name == "fpa") return Scheme::kFpa;
  if (name == "rpa") return Scheme::kRpa;
  throw InvalidArgument("unknown scheme '" + name + "' (expected mcb-msn, fpa or rpa)");
}

void ScenarioConfig::validate() const {
  const auto& p = topology.placement;
  require(p.node_count >= 2, "topology.node_count", "must be >= 2");
  require(p.grid.side_m > 0.0, "topology.side_m", "must be > 0");
  require(p.grid.cells_per_side >= 1, "topology.cells_per_side", "must be >= 1");
  require(p.bs_cell >= 0 && p.bs_cell < p.grid.cell_count(), "topology.bs_cell", "must name a grid cell");
  require(p.hotspot_count >= 1, "topology.hotspot_count", "must be >= 1");
  require(p.hotspot_sigma_m > 0.0, "topology.hotspot_sigma_m", "must be > 0");
  require(p.initial_energy_j >= 0.0, "topology.initial_energy_j", "must be >= 0");
  require(topology.mobility_step_s > 0.0, "topology.mobility_step_s", "must be > 0");
  const auto& m = topology.mobility_params;
  require(m.speed_min_mps >= 0.0 && m.speed_min_mps <= m.speed_max_mps, "topology.speed_min_mps",
          "must satisfy 0 <= speed_min_mps <= speed_max_mps");
  require(m.pause_s >= 0.0, "topology.pause_s", "must be >= 0");
  p.validate();
  channel.validate();
  energy.validate();
  relay.validate();

  require(adversary.max_hops >= 1, "adversary.max_hops", "must be >= 1");

  const auto& o = optimizer;
  require(o.small_cell_count >= 0, "optimizer.small_cell_count", "must be >= 0");
  require(o.small_cell_radius_fraction >= 0.0 && o.small_cell_radius_fraction <= 0.5,
          "optimizer.small_cell_radius_fraction", "must lie in [0, 0.5]");
  require(o.file_count >= 1, "optimizer.file_count", "must be >= 1");
  require(o.zipf_alpha >= 0.0, "optimizer.zipf_alpha", "must be >= 0");
  require(o.macro_cache >= 0, "optimizer.macro_cache", "must be >= 0");
  require(o.small_cache >= 0, "optimizer.small_cache", "must be >= 0");
  require(o.eta >= 0.0, "optimizer.eta", "must be >= 0");
  require(o.sharing_index >= 0.0 && o.sharing_index <= 1.0, "optimizer.sharing_index",
          "must lie in [0, 1]");
  require(o.bandwidth_share > 0.0 && o.bandwidth_share <= 1.0, "optimizer.bandwidth_share",
          "must lie in (0, 1]");
  require(o.macro_harvest_w >= 0.0, "optimizer.macro_harvest_w", "must be >= 0");
  require(o.small_harvest_w >= 0.0, "optimizer.small_harvest_w", "must be >= 0");
  require(o.circuit_power_w >= 0.0, "optimizer.circuit_power_w", "must be >= 0");
  require(o.backhaul_capacity_bps > 0.0, "optimizer.backhaul_capacity_bps", "must be > 0");
  require(o.max_iter >= 1, "optimizer.max_iter", "must be >= 1");
  require(o.tol >= 0.0, "optimizer.tol", "must be >= 0");
  require(o.step0 > 0.0, "optimizer.step0", "must be > 0");

  require(run.frames >= 0, "run.frames", "must be >= 0");
  require(run.replications >= 1, "run.replications", "must be >= 1");
  require(run.route_refresh_frames >= 1, "run.route_refresh_frames", "must be >= 1");
}

ConfigError::ConfigError(int line, const std::string& what)
    : InvalidArgument("line " + std::to_string(line) + ": " + what), line_(line) {}

void set_config_value(ScenarioConfig& config, const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) throw InvalidArgument("unknown key '" + key + "'");
  f->set(config, value);
}

ScenarioConfig parse_config(std::istream& is) {
  ScenarioConfig c;
  std::set<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "missing key");
    if (!seen.insert(key).second) throw ConfigError(line, "duplicate key '" + key + "'");
    if (key == "format") {
      if (value != kConfigFormat) {
        throw ConfigError(line, "unsupported format '" + value + "' (expected " + kConfigFormat + ")");
      }
      continue;
    }
    try {
      set_config_value(c, key, value);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(line, e.what());
    }
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& os, const ScenarioConfig& config) {
  os << "format = " << kConfigFormat << '\n';
  for (const auto& f : fields()) os << f.key << " = " << f.get(config) << '\n';
}

std::string config_text(const ScenarioConfig& config) {
  std::ostringstream os;
  write_config(os, config);
  return os.str();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

}  // namespace mcb
