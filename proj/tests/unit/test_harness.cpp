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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "mcb/config.hpp"
#include "mcb/csv.hpp"
#include "mcb/harness.hpp"

using namespace mcb;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.topology.placement.node_count = 60;
  c.run.frames = 8;
  c.run.replications = 3;
  c.optimizer.max_iter = 200;
  return c;
}

ScenarioConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

}  // namespace

TEST_CASE("csv numbers round trip") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1e-300, 6.02214076e23, 1.0 / 3.0}) {
    CHECK(std::stod(csv::number(v)) == v);
  }
  CHECK(csv::number(INFINITY) == "inf");
  CHECK(csv::number(-INFINITY) == "-inf");
  std::stringstream ss;
  csv::write_row(ss, {"a", "b"});
  csv::write_row(ss, {"1", "2"});
  ss << "\n";
  const auto rows = csv::read(ss);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == csv::Row{"1", "2"});
}

TEST_CASE("empty config gives the documented defaults") {
  const ScenarioConfig c = parse("");
  const ScenarioConfig d;
  CHECK(config_text(c) == config_text(d));
  CHECK(c.topology.placement.node_count == 150);
  CHECK(c.topology.placement.grid.side_m == 880.0);
  CHECK(c.topology.placement.bs_cell == 35);
  CHECK(c.channel.rx_sensitivity_dbm == -100.0);
  CHECK(c.run.replications == 30);
}

TEST_CASE("defaults carry the parameter table") {
  const ScenarioConfig c;
  CHECK(c.topology.placement.bs_max_power_dbm == 43.0);
  CHECK(c.optimizer.macro_max_power_dbm == 43.0);
  CHECK(c.optimizer.max_iter == 2000);
  CHECK(c.channel.tx_loss_db == 3.0);
  CHECK(c.channel.rx_loss_db == 3.0);
  CHECK(c.channel.tx_backoff_db == 1.5);
  CHECK(c.channel.link_margin_db == 5.0);
  CHECK(c.topology.placement.node_max_power_dbm == 30.0);
  CHECK(c.codec == "adaptive-multi-rate");
  CHECK(c.fairness_index == "security/throughput");
}

TEST_CASE("config parsing") {
  const ScenarioConfig c = parse(
      "# comment\n"
      "format = mcbmsn-config/1\n"
      "topology.node_count = 40   # trailing comment\n"
      "\n"
      "run.beamforming = off\n"
      "run.baselines = rpa\n"
      "channel.model = okumura-hata\n"
      "topology.placement = hotspot\n");
  CHECK(c.topology.placement.node_count == 40);
  CHECK(!c.run.beamforming);
  CHECK(c.run.baselines == std::vector<Scheme>{Scheme::kRpa});
  CHECK(c.channel.model_kind == PathLossModel::kOkumuraHata);
  CHECK(c.topology.placement.placement == Placement::kHotspot);
}

TEST_CASE("config errors carry the line or the field") {
  try {
    parse("run.frames = 4\nbogus.key = 1\n");
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("bogus.key") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("run.frames = 4\nrun.frames = 5\n"), ConfigError);
  CHECK_THROWS_AS(parse("run.frames\n"), ConfigError);
  CHECK_THROWS_AS(parse("run.frames = four\n"), ConfigError);
  CHECK_THROWS_AS(parse("format = mcbmsn-config/9\n"), ConfigError);
  CHECK_THROWS_AS(parse("run.beamforming = maybe\n"), ConfigError);
  try {
    parse("topology.node_count = 0\n");
    FAIL("node_count 0 accepted");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("topology.node_count") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("run.replications = 0\n"), InvalidArgument);
  CHECK_THROWS_AS(load_config("/nonexistent/mcb.cfg"), Error);
}

TEST_CASE("config text round trips") {
  ScenarioConfig c = small_config();
  set_config_value(c, "optimizer.zipf_alpha", "1.3");
  set_config_value(c, "run.scheme", "fpa");
  set_config_value(c, "relay.delta_init", "2.5");
  set_config_value(c, "energy.body_bits", "8192");
  const ScenarioConfig back = parse(config_text(c));
  CHECK(config_text(back) == config_text(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c) != config_hash(ScenarioConfig{}));
  CHECK(config_hash(c).size() == 16);
  CHECK_THROWS_AS(set_config_value(c, "nope", "1"), InvalidArgument);
  const auto keys = config_keys();
  CHECK(std::find(keys.begin(), keys.end(), "topology.node_count") != keys.end());
  CHECK(std::adjacent_find(keys.begin(), keys.end()) == keys.end());
}

TEST_CASE("schemes") {
  CHECK(parse_scheme("mcb-msn") == Scheme::kMcb);
  CHECK(parse_scheme("mcb") == Scheme::kMcb);
  CHECK(parse_scheme("fpa") == Scheme::kFpa);
  CHECK(std::string(to_string(Scheme::kRpa)) == "rpa");
  CHECK_THROWS_AS(parse_scheme("cn-swipt"), InvalidArgument);
}

TEST_CASE("summary statistics") {
  const double two[] = {1.0, 3.0};
  const Stat s = summarize(two);
  CHECK(s.mean == 2.0);
  CHECK(s.std_error == doctest::Approx(1.0));
  CHECK(s.ci_hi - s.mean == doctest::Approx(6.313751514675).epsilon(1e-10));
  CHECK(s.mean - s.ci_lo == doctest::Approx(6.313751514675).epsilon(1e-10));
  CHECK(s.n == 2);

  const double same[] = {4.0, 4.0, 4.0, 4.0};
  const Stat z = summarize(same);
  CHECK(z.ci_lo == 4.0);
  CHECK(z.ci_hi == 4.0);

  const double one[] = {7.0};
  const Stat o = summarize(one);
  CHECK(o.ci_lo == 7.0);
  CHECK(o.ci_hi == 7.0);

  std::vector<double> xs{3.1, -2.0, 8.5, 0.25, 4.0, 9.75};
  const Stat a = summarize(xs);
  std::reverse(xs.begin(), xs.end());
  const Stat b = summarize(xs);
  CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-15));
  CHECK(a.ci_hi == doctest::Approx(b.ci_hi).epsilon(1e-15));
  CHECK(a.ci_lo <= a.mean);
  CHECK(a.mean <= a.ci_hi);
  CHECK(summarize({}).n == 0);
}

TEST_CASE("radio setup") {
  const ScenarioConfig c = small_config();
  const Topology t = build_grid(c.topology.placement, 3);
  const RadioSetup r = build_radio_setup(c, t);
  CHECK(r.instance.bs_count() == 5);
  CHECK(r.instance.user_count() == 59);
  CHECK(r.instance.is_macro[0]);
  CHECK(r.station_positions[0] == t.node(t.base_station()).position);
  for (std::size_t i = 1; i < 5; ++i) {
    const double dx = r.station_positions[i].x - 440.0, dy = r.station_positions[i].y - 440.0;
    CHECK(std::hypot(dx, dy) == doctest::Approx(220.0));
  }
  CHECK(r.instance.max_power_w[0] == doctest::Approx(dbm_to_watts(43.0)));
  CHECK(r.instance.gamma_min == doctest::Approx(0.1));
  CHECK(r.catalog.file_count() == 100);

  RadioInstance inst = r.instance;
  inst.noise_w = noise_for_edge_snr(inst, 10.0);
  double worst = 1e300;
  for (std::size_t j = 0; j < inst.user_count(); ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < inst.bs_count(); ++i) best = std::max(best, inst.max_power_w[i] * inst.gain[i][j]);
    worst = std::min(worst, best / inst.noise_w);
  }
  CHECK(10.0 * std::log10(worst) == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("replications are deterministic and seed isolated") {
  ScenarioConfig c = small_config();
  c.topology.placement.node_count = 150;
  const MetricsRecord a = run_scenario(c, 11);
  const MetricsRecord b = run_scenario(c, 11);
  CHECK(metric_values(a) == metric_values(b));
  const MetricsRecord other = run_scenario(c, 12);
  CHECK(metric_values(a) != metric_values(other));

  c.run.beamforming = false;
  const MetricsRecord off = run_scenario(c, 11);
  CHECK(off.sum_rate_bps == a.sum_rate_bps);
  CHECK(off.partitioned_clusters == a.partitioned_clusters);
  CHECK(off.cooperative_hops == 0);
  CHECK(off.frame_energy_j != a.frame_energy_j);
}

TEST_CASE("metric ranges") {
  const ScenarioConfig c = small_config();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const MetricsRecord m = run_scenario(c, seed);
    CHECK(m.frames_attempted == 8);
    CHECK(m.frames_delivered <= m.frames_attempted);
    CHECK(m.cooperative_hops <= m.hops);
    CHECK(m.frame_energy_j >= 0.0);
    CHECK(m.grid_w >= 0.0);
    CHECK(m.sum_rate_bps > 0.0);
    CHECK(m.backhaul_utilization_pct >= 0.0);
    CHECK(m.energy_efficiency_bpj > 0.0);
    CHECK(m.bs_belief >= 0.0);
    CHECK(m.entropy_bits >= 0.0);
    CHECK(m.user_throughput_bps.size() == 59);
    if (!m.ledger_empty) CHECK(m.evidence_normalization == doctest::Approx(1.0).epsilon(1e-12));
    const auto names = metric_names();
    const auto values = metric_values(m);
    REQUIRE(names.size() == values.size());
    for (std::size_t k = 0; k < names.size(); ++k) CHECK(metric_value(m, names[k]) == values[k]);
  }
  CHECK_THROWS_AS(metric_value(MetricsRecord{}, "nope"), InvalidArgument);
}

TEST_CASE("zero frames keeps the radio metrics") {
  ScenarioConfig c = small_config();
  c.run.frames = 0;
  const MetricsRecord m = run_scenario(c, 5);
  CHECK(m.frames_attempted == 0);
  CHECK(m.hops == 0);
  CHECK(m.frame_energy_j == 0.0);
  CHECK(m.ledger_empty);
  CHECK(m.bs_belief == 0.0);
  CHECK(m.sum_rate_bps > 0.0);
  CHECK(m.solver_iterations > 0);
}

TEST_CASE("schemes see the same world") {
  ScenarioConfig c = small_config();
  const MetricsRecord mcb = run_scenario(c, 9);
  c.run.scheme = Scheme::kFpa;
  const MetricsRecord fpa = run_scenario(c, 9);
  CHECK(fpa.hops == mcb.hops);
  CHECK(fpa.frame_energy_j == mcb.frame_energy_j);
  CHECK(fpa.solver_iterations == 0);
}

TEST_CASE("monte carlo and csv output") {
  const ScenarioConfig c = small_config();
  const RunSummary s = monte_carlo(c, 3);
  CHECK(s.records.size() == 3);
  CHECK(s.records[0].seed == 1);
  CHECK(s.records[2].seed == 3);
  CHECK(s.at("frames_attempted").mean == 8.0);
  CHECK(s.at("frames_attempted").ci_lo == 8.0);
  CHECK_THROWS_AS(s.at("nope"), InvalidArgument);

  std::stringstream m;
  write_metrics_csv(m, s.records);
  const auto rows = csv::read(m);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].front() == "seed");
  CHECK(rows[0].size() == metric_names().size() + 1);
  CHECK(std::stod(rows[1][1 + 3]) == s.records[0].cooperative_hops);

  std::stringstream sum;
  write_summary_csv(sum, s);
  const auto srows = csv::read(sum);
  CHECK(srows[0] == csv::Row{"metric", "mean", "std_error", "ci_lo", "ci_hi", "n"});
  CHECK(srows.size() == metric_names().size() + 1);
}

TEST_CASE("experiments") {
  const auto presets = experiment_presets();
  CHECK(presets.size() == 5);
  const Experiment n = experiment("sumrate-vs-n");
  CHECK(n.grid.front() == 20.0);
  CHECK(n.grid.back() == 200.0);
  CHECK(n.grid.size() == 10);
  CHECK(experiment("throughput-vs-snr").grid.size() == 8);
  CHECK(experiment("ee-vs-mtp").grid.front() == 10.0);
  CHECK(experiment("ee-vs-mtp").grid.back() == 43.0);
  CHECK_THROWS_AS(experiment("fig-10"), InvalidArgument);

  const ScenarioConfig base = small_config();
  const ScenarioConfig at = sweep_config("sumrate-vs-n", base, 40, Scheme::kRpa);
  CHECK(at.topology.placement.node_count == 41);
  CHECK(at.run.scheme == Scheme::kRpa);
  CHECK(!at.run.beamforming);
  const ScenarioConfig mtp = sweep_config("ee-vs-mtp", base, 31, Scheme::kMcb);
  CHECK(mtp.optimizer.macro_max_power_dbm == 31.0);
  CHECK(mtp.optimizer.small_max_power_dbm == 18.0);

  ScenarioConfig tiny = base;
  tiny.run.replications = 2;
  tiny.run.frames = 2;
  const auto dir = std::filesystem::temp_directory_path() / "mcb_test_sweep";
  std::filesystem::remove_all(dir);
  const double grid[] = {20.0};
  const auto points = run_experiment("ee-vs-n", tiny, dir.string(), grid);
  CHECK(points.size() == 3);
  const auto rows = csv::read_file((dir / "ee-vs-n.csv").string());
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == csv::Row{"x", "scheme", "mean", "ci_lo", "ci_hi"});
  CHECK(rows[1][1] == "mcb-msn");
  // A single-point sweep is one monte_carlo call per scheme.
  const RunSummary direct = monte_carlo(sweep_config("ee-vs-n", tiny, 20, Scheme::kMcb), 2);
  CHECK(points[0].stat.mean == direct.at("energy_efficiency_bpj").mean);
  std::filesystem::remove_all(dir);
}

TEST_CASE("manifest") {
  const ScenarioConfig c = small_config();
  std::stringstream ss;
  write_manifest(ss, c, 42, "run");
  const auto j = nlohmann::json::parse(ss.str());
  CHECK(j.at("version") == kToolVersion);
  CHECK(j.at("tool") == "mcbsim");
  CHECK(j.at("seed") == 42);
  CHECK(j.at("config_hash") == config_hash(c));
  CHECK(j.at("replications") == 3);
  CHECK(j.at("command") == "run");
}
