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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "mcb/adversary.hpp"
#include "mcb/csv.hpp"
#include "mcb/rng.hpp"

using namespace mcb;

namespace {

// 3x3 grid of 100 m cells; cell k has center (50 + 100 col, 50 + 100 row).
GridSpec small_grid() {
  GridSpec g;
  g.side_m = 300;
  g.cells_per_side = 3;
  return g;
}

Point in_cell(int c) { return {50.0 + 100.0 * (c % 3), 50.0 + 100.0 * (c / 3)}; }

}  // namespace

TEST_CASE("baseline transmission adds one unit") {
  EvidenceLedger l(small_grid());
  record_transmission(l, in_cell(0), in_cell(1));
  CHECK(l.count(0, 1) == 1.0);
  CHECK(l.total() == 1.0);
  record_transmission(l, in_cell(0), in_cell(1));
  CHECK(l.count(0, 1) == 2.0);
}

TEST_CASE("beamformed burst conserves one frame of evidence") {
  EvidenceLedger same(small_grid());
  const std::vector<Point> four(4, in_cell(0));
  record_beamformed(same, four, in_cell(1), EvidenceMode::kFractional);
  CHECK(same.count(0, 1) == doctest::Approx(1.0).epsilon(1e-15));

  EvidenceLedger spread(small_grid());
  const std::vector<Point> tx{in_cell(0), in_cell(3), in_cell(4), in_cell(4)};
  record_beamformed(spread, tx, in_cell(1), EvidenceMode::kFractional);
  CHECK(spread.count(0, 1) == 0.25);
  CHECK(spread.count(3, 1) == 0.25);
  CHECK(spread.count(4, 1) == 0.5);
  CHECK(spread.total() == doctest::Approx(1.0).epsilon(1e-15));

  EvidenceLedger thr(small_grid());
  record_beamformed(thr, tx, in_cell(1), EvidenceMode::kThreshold);
  CHECK(thr.empty());
}

TEST_CASE("broadcast splits one frame over its receivers") {
  EvidenceLedger l(small_grid());
  const std::vector<Point> rx{in_cell(1), in_cell(1), in_cell(3)};
  record_broadcast(l, in_cell(0), rx);
  CHECK(l.count(0, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(l.count(0, 3) == doctest::Approx(1.0 / 3.0));
  EvidenceLedger none(small_grid());
  record_broadcast(none, in_cell(0), {});
  CHECK(none.empty());
}

TEST_CASE("hand-enumerated cooperative hop with two relays") {
  // Source in cell 0, relays in cells 0 and 3, destination in cell 1.
  // Round 1 requests reach both relays; both ack; the body goes to both
  // relays; the burst goes out from 3 transmitters; the destination acks.
  EvidenceLedger l(small_grid());
  const Point s = in_cell(0), r1 = in_cell(0), r2 = in_cell(3), d = in_cell(1);
  const std::vector<Point> relays{r1, r2};
  record_broadcast(l, s, relays);         // relay request: (0,0) 0.5, (0,3) 0.5
  record_transmission(l, r1, s);          // ack: (0,0) +1
  record_transmission(l, r2, s);          // ack: (3,0) +1
  record_broadcast(l, s, relays);         // body hand-off: (0,0) 0.5, (0,3) 0.5
  const std::vector<Point> tx{s, r1, r2};
  record_beamformed(l, tx, d, EvidenceMode::kFractional);  // (0,1) 2/3, (3,1) 1/3
  record_transmission(l, d, s);           // final ack: (1,0) +1

  CHECK(l.count(0, 0) == doctest::Approx(2.0));
  CHECK(l.count(0, 3) == doctest::Approx(1.0));
  CHECK(l.count(3, 0) == doctest::Approx(1.0));
  CHECK(l.count(0, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(l.count(3, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(l.count(1, 0) == doctest::Approx(1.0));
  CHECK(l.links().size() == 6);
  CHECK(l.total() == doctest::Approx(6.0));
}

TEST_CASE("ledger validation and monotonicity") {
  EvidenceLedger l(small_grid());
  CHECK_THROWS_AS(l.add(-1, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(l.add(0, 9, 1), InvalidArgument);
  CHECK_THROWS_AS(l.add(0, 1, -1), InvalidArgument);
  l.add(0, 1, 0.0);
  CHECK(l.empty());
  Rng rng(5);
  double prev = 0.0;
  for (int i = 0; i < 200; ++i) {
    record_transmission(l, in_cell(static_cast<int>(rng.below(9))), in_cell(static_cast<int>(rng.below(9))));
    CHECK(l.total() >= prev);
    prev = l.total();
  }
}

TEST_CASE("path enumeration") {
  EvidenceLedger one(small_grid());
  one.add(0, 1, 1);
  CHECK(enumerate_paths(one, 4).size() == 1);

  EvidenceLedger chain(small_grid());
  chain.add(0, 1, 1);
  chain.add(1, 2, 1);
  const auto hyps = enumerate_paths(chain, 4);
  std::set<std::vector<int>> got;
  for (const auto& h : hyps) got.insert(h.cells);
  CHECK(got == std::set<std::vector<int>>{{0, 1}, {1, 2}, {0, 1, 2}});
  CHECK(enumerate_paths(chain, 1).size() == 2);
  CHECK_THROWS_AS(enumerate_paths(chain, 0), InvalidArgument);
}

TEST_CASE("cycles do not chain and self-loops stand alone") {
  EvidenceLedger l(small_grid());
  l.add(0, 1, 1);
  l.add(1, 0, 1);
  l.add(1, 1, 5);
  const auto hyps = enumerate_paths(l, 4);
  std::set<std::vector<int>> got;
  for (const auto& h : hyps) got.insert(h.cells);
  CHECK(got == std::set<std::vector<int>>{{0, 1}, {1, 0}, {1, 1}});
}

TEST_CASE("path enumeration matches a brute-force oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    EvidenceLedger l(small_grid());
    for (int k = 0; k < 10; ++k) {
      l.add(static_cast<int>(rng.below(9)), static_cast<int>(rng.below(9)), 1.0 + rng.below(5));
    }
    const int max_hops = 3;
    // Oracle: every sequence of up to max_hops+1 distinct cells whose links exist,
    // plus each self-loop on its own.
    std::set<std::vector<int>> oracle;
    std::vector<int> seq;
    auto extend = [&](auto&& self) -> void {
      if (seq.size() >= 2) oracle.insert(seq);
      if (static_cast<int>(seq.size()) == max_hops + 1) return;
      for (int c = 0; c < 9; ++c) {
        if (std::find(seq.begin(), seq.end(), c) != seq.end()) continue;
        if (!seq.empty() && !(l.count(seq.back(), c) > 0.0)) continue;
        seq.push_back(c);
        self(self);
        seq.pop_back();
      }
    };
    extend(extend);
    for (int c = 0; c < 9; ++c) {
      if (l.count(c, c) > 0.0) oracle.insert({c, c});
    }
    std::set<std::vector<int>> got;
    double norm = 0.0;
    for (const auto& h : enumerate_paths(l, max_hops)) {
      got.insert(h.cells);
      CHECK(h.evidence == path_evidence(h.cells, l));
      norm += h.normalized;
    }
    CHECK(got == oracle);
    if (!got.empty()) CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("path evidence is the weakest link") {
  EvidenceLedger l(small_grid());
  l.add(0, 1, 5);
  l.add(1, 2, 2);
  l.add(2, 5, 7);
  const std::vector<int> p{0, 1, 2, 5};
  CHECK(path_evidence(p, l) == 2.0);
  const std::vector<int> single{0, 1};
  CHECK(path_evidence(single, l) == 5.0);
  const std::vector<int> missing{0, 2};
  CHECK_THROWS_AS(path_evidence(missing, l), InvalidArgument);
  const std::vector<int> short_path{0};
  CHECK_THROWS_AS(path_evidence(short_path, l), InvalidArgument);
}

TEST_CASE("belief accrues to terminal cells") {
  EvidenceLedger empty(small_grid());
  const auto z = belief(empty, 4, 8);
  for (double b : z.belief) CHECK(b == 0.0);
  const auto zr = anonymity_report(z);
  CHECK(zr.bs_belief == 0.0);
  CHECK(zr.entropy_bits == 0.0);

  EvidenceLedger one(small_grid());
  one.add(0, 1, 5);
  const auto b1 = belief(one, 4, 1);
  CHECK(b1.belief[1] == doctest::Approx(1.0));
  CHECK(b1.belief[0] == 0.0);
  CHECK(b1.normalized_total == doctest::Approx(1.0));
  const auto r1 = anonymity_report(b1);
  CHECK(r1.bs_belief == doctest::Approx(1.0));
  CHECK(r1.argmax_cell == 1);

  EvidenceLedger two(small_grid());
  two.add(0, 1, 3);
  two.add(2, 5, 3);
  const auto b2 = belief(two, 4, 5);
  CHECK(b2.belief[1] == doctest::Approx(0.5));
  CHECK(b2.belief[5] == doctest::Approx(0.5));
  CHECK(anonymity_report(b2).argmax_cell == 1);  // tie to the lowest index
}

TEST_CASE("belief weights by hop count") {
  EvidenceLedger l(small_grid());
  l.add(0, 1, 2);
  l.add(1, 2, 2);
  // Hypotheses (0,1), (1,2), (0,1,2) each with E = 2: m = 1/3.
  const auto b = belief(l, 4, 2);
  CHECK(b.belief[1] == doctest::Approx(1.0 / 3.0));
  CHECK(b.belief[2] == doctest::Approx(1.0 / 3.0 + 2.0 / 3.0));
  CHECK(b.evidence_total == doctest::Approx(6.0));
}

TEST_CASE("belief matches the materialized hypotheses and is scale invariant") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    EvidenceLedger l(small_grid()), scaled(small_grid());
    for (int k = 0; k < 14; ++k) {
      const int a = static_cast<int>(rng.below(9)), c = static_cast<int>(rng.below(9));
      const double v = 0.5 + rng.below(4);
      l.add(a, c, v);
      scaled.add(a, c, 7.5 * v);
    }
    std::vector<double> expect(9, 0.0);
    for (const auto& h : enumerate_paths(l, 4)) {
      expect[static_cast<std::size_t>(h.cells.back())] += static_cast<double>(h.hops()) * h.normalized;
    }
    const auto b = belief(l, 4, 8);
    const auto bs = belief(scaled, 4, 8);
    for (int u = 0; u < 9; ++u) {
      CHECK(b.belief[u] == doctest::Approx(expect[u]).epsilon(1e-12));
      CHECK(bs.belief[u] == doctest::Approx(b.belief[u]).epsilon(1e-12));
    }
    CHECK(anonymity_report(b).argmax_cell == anonymity_report(bs).argmax_cell);
  }
}

TEST_CASE("entropy of a uniform belief") {
  BeliefMap m;
  m.belief.assign(9, 0.3);
  CHECK(anonymity_report(m).entropy_bits == doctest::Approx(std::log2(9.0)).epsilon(1e-12));
}

TEST_CASE("ledger and belief csv") {
  EvidenceLedger l(small_grid());
  l.add(0, 1, 2.5);
  std::stringstream ss;
  write_ledger_csv(ss, l);
  const auto rows = csv::read(ss);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == csv::Row{"tx_cell", "rx_cell", "count"});
  CHECK(rows[1] == csv::Row{"0", "1", "2.5"});
  std::stringstream bs;
  write_belief_csv(bs, belief(l, 4, 1));
  const auto brows = csv::read(bs);
  CHECK(brows.size() == 10);
  CHECK(brows[2] == csv::Row{"1", "1"});
}
