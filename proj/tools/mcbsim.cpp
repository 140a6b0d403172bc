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

// mcbsim: run scenarios, sweep preset experiments, check config files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcb/config.hpp"
#include "mcb/harness.hpp"

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
  int replications = 0;
  std::string beamforming;
  std::string scheme;
  std::string baselines;
  bool has_seed = false;
  std::uint64_t seed = 0;
};

mcb::ScenarioConfig resolve(const Common& c) {
  mcb::ScenarioConfig cfg = c.config_path.empty() ? mcb::ScenarioConfig{} : mcb::load_config(c.config_path);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw mcb::InvalidArgument("--set expects key=value, got '" + kv + "'");
    mcb::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.replications > 0) cfg.run.replications = c.replications;
  if (!c.beamforming.empty()) mcb::set_config_value(cfg, "run.beamforming", c.beamforming);
  if (!c.scheme.empty()) cfg.run.scheme = mcb::parse_scheme(c.scheme);
  if (!c.baselines.empty()) mcb::set_config_value(cfg, "run.baselines", c.baselines);
  if (c.has_seed) cfg.run.seed_base = c.seed;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "config file (key = value)");
  app->add_option("--set", c.overrides, "override a config key, e.g. --set run.frames=10");
  app->add_option("-o,--out", c.out_dir, "output directory");
  app->add_option("-r,--replications", c.replications, "replications per point");
  app->add_option("--beamforming", c.beamforming, "on or off");
  app->add_option("--scheme", c.scheme, "mcb-msn, fpa or rpa");
  app->add_option("--baselines", c.baselines, "comma-separated baseline schemes");
  app->add_option("--seed", c.seed, "first replication seed")->each([&](const std::string&) {
    c.has_seed = true;
  });
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw mcb::Error("cannot write '" + p.string() + "'");
  return os;
}

int cmd_run(const Common& c) {
  const mcb::ScenarioConfig cfg = resolve(c);
  const mcb::RunSummary summary = mcb::monte_carlo(cfg, cfg.run.replications);
  fs::create_directories(c.out_dir);
  auto metrics = open_out(fs::path(c.out_dir) / "metrics.csv");
  mcb::write_metrics_csv(metrics, summary.records);
  auto sum = open_out(fs::path(c.out_dir) / "summary.csv");
  mcb::write_summary_csv(sum, summary);
  auto manifest = open_out(fs::path(c.out_dir) / "manifest.json");
  mcb::write_manifest(manifest, cfg, cfg.run.seed_base, "run");
  auto used = open_out(fs::path(c.out_dir) / "config.txt");
  mcb::write_config(used, cfg);
  mcb::write_summary_csv(std::cout, summary);
  return 0;
}

int cmd_sweep(const Common& c, const std::string& preset, const std::vector<double>& grid) {
  const mcb::ScenarioConfig cfg = resolve(c);
  const auto points = mcb::run_experiment(preset, cfg, c.out_dir, grid);
  auto manifest = open_out(fs::path(c.out_dir) / (preset + ".manifest.json"));
  mcb::write_manifest(manifest, cfg, cfg.run.seed_base, "sweep " + preset);
  mcb::write_sweep_csv(std::cout, points);
  return 0;
}

int cmd_validate(const Common& c, bool print) {
  const mcb::ScenarioConfig cfg = resolve(c);
  if (print) {
    mcb::write_config(std::cout, cfg);
  } else {
    std::cout << "ok " << mcb::config_hash(cfg) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MCB-MSN simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mcb::kToolVersion);

  Common run_opts, sweep_opts, validate_opts;
  auto* run = app.add_subcommand("run", "run one scenario for the configured replications");
  add_common(run, run_opts);

  auto* sweep = app.add_subcommand("sweep", "run a preset experiment");
  add_common(sweep, sweep_opts);
  std::string preset;
  std::vector<double> grid;
  sweep->add_option("-p,--preset", preset, "preset name")
      ->required()
      ->check(CLI::IsMember(mcb::experiment_presets()));
  sweep->add_option("--grid", grid, "x values (default: the preset grid)")->delimiter(',');

  auto* validate = app.add_subcommand("validate", "check a config file");
  add_common(validate, validate_opts);
  bool print = false;
  validate->add_flag("--print", print, "print the resolved config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_opts);
    if (*sweep) return cmd_sweep(sweep_opts, preset, grid);
    if (*validate) return cmd_validate(validate_opts, print);
  } catch (const mcb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
