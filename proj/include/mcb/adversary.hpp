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

#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "mcb/common.hpp"
#include "mcb/topology.hpp"

namespace mcb {

/// How a beamformed burst is attributed by the eavesdropper.
enum class EvidenceMode {
  kFractional,  // each of n transmitters earns 1/n of the frame
  kThreshold,   // reduced per-node power stays below attribution: 0
};

/// E(U): directed cell-pair link evidence seen by the eavesdropper.
class EvidenceLedger {
 public:
  using Link = std::pair<int, int>;  // (tx cell, rx cell)

  explicit EvidenceLedger(GridSpec grid) : grid_(grid) {}

  void add(int tx_cell, int rx_cell, double amount);
  double count(int tx_cell, int rx_cell) const;
  const std::map<Link, double>& links() const { return links_; }
  const GridSpec& grid() const { return grid_; }
  bool empty() const { return links_.empty(); }
  double total() const;

 private:
  GridSpec grid_;
  std::map<Link, double> links_;
};

/// Conventional unicast transmission: +1 on (cell(tx), cell(rx)).
void record_transmission(EvidenceLedger& ledger, const Point& tx, const Point& rx);

/// Conventional broadcast heard by several receivers: one frame of
/// evidence split evenly over (cell(tx), cell(rx_k)). No receivers, no entry.
void record_broadcast(EvidenceLedger& ledger, const Point& tx, std::span<const Point> receivers);

/// Beamformed burst from several transmitters to one receiver.
void record_beamformed(EvidenceLedger& ledger, std::span<const Point> transmitters,
                       const Point& rx, EvidenceMode mode);

struct PathHypothesis {
  std::vector<int> cells;  // V, >= 2 cells
  double evidence = 0.0;   // E(V)
  double normalized = 0.0; // m(V)

  std::size_t hops() const { return cells.size() - 1; }
};

/// All simple directed chains of ledger links with at most `max_hops` links.
/// A self-loop is a one-link hypothesis [c, c] that never chains. Evidence and normalization are filled in.
std::vector<PathHypothesis> enumerate_paths(const EvidenceLedger& ledger, int max_hops);

/// E(V) = min link count along `cells`. Throws InvalidArgument on a missing link.
double path_evidence(std::span<const int> cells, const EvidenceLedger& ledger);

struct BeliefMap {
  std::vector<double> belief;  // B(u), index = cell
  int bs_cell = 0;
  /// Sum of E(V) over all hypotheses (the normalizer).
  double evidence_total = 0.0;
  /// Sum of m(V); 1 whenever evidence_total > 0.
  double normalized_total = 0.0;
};

/// B(u) = sum over hypotheses ending in u of hops(V) * m(V). Computed by a
/// streaming depth-first walk, so large ledgers never materialize paths.
BeliefMap belief(const EvidenceLedger& ledger, int max_hops, int bs_cell);

struct AnonymityReport {
  double bs_belief = 0.0;
  int argmax_cell = 0;
  double entropy_bits = 0.0;
};

AnonymityReport anonymity_report(const BeliefMap& map);

void write_ledger_csv(std::ostream& os, const EvidenceLedger& ledger);
void write_belief_csv(std::ostream& os, const BeliefMap& map);

}  // namespace mcb
