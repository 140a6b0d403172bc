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

#include "mcb/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "mcb/csv.hpp"

namespace mcb {

void EvidenceLedger::add(int tx_cell, int rx_cell, double amount) {
  const int n = grid_.cell_count();
  if (tx_cell < 0 || tx_cell >= n || rx_cell < 0 || rx_cell >= n) {
    throw InvalidArgument("ledger cell index out of range");
  }
  if (!(amount >= 0.0)) throw InvalidArgument("ledger evidence must be >= 0");
  if (amount == 0.0) return;
  links_[{tx_cell, rx_cell}] += amount;
}

double EvidenceLedger::count(int tx_cell, int rx_cell) const {
  auto it = links_.find({tx_cell, rx_cell});
  return it == links_.end() ? 0.0 : it->second;
}

double EvidenceLedger::total() const {
  double t = 0.0;
  for (const auto& [link, c] : links_) t += c;
  return t;
}

void record_transmission(EvidenceLedger& ledger, const Point& tx, const Point& rx) {
  ledger.add(cell_of(tx, ledger.grid()), cell_of(rx, ledger.grid()), 1.0);
}

void record_broadcast(EvidenceLedger& ledger, const Point& tx, std::span<const Point> receivers) {
  if (receivers.empty()) return;
  const int from = cell_of(tx, ledger.grid());
  const double share = 1.0 / static_cast<double>(receivers.size());
  for (const auto& rx : receivers) ledger.add(from, cell_of(rx, ledger.grid()), share);
}

void record_beamformed(EvidenceLedger& ledger, std::span<const Point> transmitters,
                       const Point& rx, EvidenceMode mode) {
  if (transmitters.empty() || mode == EvidenceMode::kThreshold) return;
  const int to = cell_of(rx, ledger.grid());
  const double share = 1.0 / static_cast<double>(transmitters.size());
  for (const auto& tx : transmitters) ledger.add(cell_of(tx, ledger.grid()), to, share);
}

namespace {

struct Edge {
  int to;
  double count;
};

std::vector<std::vector<Edge>> chaining_graph(const EvidenceLedger& ledger) {
  std::vector<std::vector<Edge>> adj(static_cast<std::size_t>(ledger.grid().cell_count()));
  // std::map iteration is ordered, so edges come out sorted by (tx, rx).
  for (const auto& [link, c] : ledger.links()) {
    if (!(c > 0.0)) continue;
    adj[static_cast<std::size_t>(link.first)].push_back({link.second, c});
  }
  return adj;
}

// Depth-first walk over simple paths. `visit(path, evidence)` sees every
// path of 1..max_hops links exactly once. A self-loop is a one-link path
// [c, c] and never extends.
template <typename Visit>
void walk_paths(const std::vector<std::vector<Edge>>& adj, int max_hops, Visit&& visit) {
  const int n = static_cast<int>(adj.size());
  std::vector<char> on_path(adj.size(), 0);
  std::vector<int> path;
  auto dfs = [&](auto&& self, int u, double min_so_far) -> void {
    for (const auto& e : adj[static_cast<std::size_t>(u)]) {
      if (e.to == u) {
        if (path.size() == 1) {
          path.push_back(u);
          visit(path, e.count);
          path.pop_back();
        }
        continue;
      }
      if (on_path[static_cast<std::size_t>(e.to)]) continue;
      const double ev = std::min(min_so_far, e.count);
      path.push_back(e.to);
      visit(path, ev);
      if (static_cast<int>(path.size()) - 1 < max_hops) {
        on_path[static_cast<std::size_t>(e.to)] = 1;
        self(self, e.to, ev);
        on_path[static_cast<std::size_t>(e.to)] = 0;
      }
      path.pop_back();
    }
  };
  for (int s = 0; s < n; ++s) {
    if (adj[static_cast<std::size_t>(s)].empty()) continue;
    path.assign(1, s);
    on_path[static_cast<std::size_t>(s)] = 1;
    dfs(dfs, s, std::numeric_limits<double>::infinity());
    on_path[static_cast<std::size_t>(s)] = 0;
  }
}

}  // namespace

std::vector<PathHypothesis> enumerate_paths(const EvidenceLedger& ledger, int max_hops) {
  if (max_hops < 1) throw InvalidArgument("max_hops must be >= 1");
  std::vector<PathHypothesis> out;
  walk_paths(chaining_graph(ledger), max_hops, [&](const std::vector<int>& path, double ev) {
    out.push_back({path, ev, 0.0});
  });
  double total = 0.0;
  for (const auto& h : out) total += h.evidence;
  if (total > 0.0) {
    for (auto& h : out) h.normalized = h.evidence / total;
  }
  return out;
}

double path_evidence(std::span<const int> cells, const EvidenceLedger& ledger) {
  if (cells.size() < 2) throw InvalidArgument("a path needs at least 2 cells");
  double ev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
    auto it = ledger.links().find({cells[i], cells[i + 1]});
    if (it == ledger.links().end()) {
      throw InvalidArgument("path uses a link absent from the ledger");
    }
    ev = std::min(ev, it->second);
  }
  return ev;
}

BeliefMap belief(const EvidenceLedger& ledger, int max_hops, int bs_cell) {
  if (max_hops < 1) throw InvalidArgument("max_hops must be >= 1");
  BeliefMap map;
  map.bs_cell = bs_cell;
  map.belief.assign(static_cast<std::size_t>(ledger.grid().cell_count()), 0.0);
  const auto adj = chaining_graph(ledger);

  walk_paths(adj, max_hops, [&](const std::vector<int>&, double ev) { map.evidence_total += ev; });
  if (!(map.evidence_total > 0.0)) return map;

  const double total = map.evidence_total;
  walk_paths(adj, max_hops, [&](const std::vector<int>& path, double ev) {
    const double m = ev / total;
    map.normalized_total += m;
    map.belief[static_cast<std::size_t>(path.back())] +=
        static_cast<double>(path.size() - 1) * m;
  });
  return map;
}

AnonymityReport anonymity_report(const BeliefMap& map) {
  AnonymityReport r;
  if (map.bs_cell >= 0 && static_cast<std::size_t>(map.bs_cell) < map.belief.size()) {
    r.bs_belief = map.belief[static_cast<std::size_t>(map.bs_cell)];
  }
  double sum = 0.0;
  double best = -1.0;
  for (std::size_t u = 0; u < map.belief.size(); ++u) {
    sum += map.belief[u];
    if (map.belief[u] > best) {
      best = map.belief[u];
      r.argmax_cell = static_cast<int>(u);
    }
  }
  if (sum > 0.0) {
    for (double b : map.belief) {
      if (b > 0.0) {
        const double p = b / sum;
        r.entropy_bits -= p * std::log2(p);
      }
    }
  }
  return r;
}

void write_ledger_csv(std::ostream& os, const EvidenceLedger& ledger) {
  csv::write_row(os, {"tx_cell", "rx_cell", "count"});
  for (const auto& [link, c] : ledger.links()) {
    csv::write_row(os, {std::to_string(link.first), std::to_string(link.second), csv::number(c)});
  }
}

void write_belief_csv(std::ostream& os, const BeliefMap& map) {
  csv::write_row(os, {"cell", "belief"});
  for (std::size_t u = 0; u < map.belief.size(); ++u) {
    csv::write_row(os, {std::to_string(u), csv::number(map.belief[u])});
  }
}

}  // namespace mcb
