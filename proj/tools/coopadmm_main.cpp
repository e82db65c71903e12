/*
 * Copyright 2026 The coopadmm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "coopadmm/report.hpp"
#include "coopadmm/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

coopadmm::ScenarioConfig load_scenario(const std::string &config_path,
                                       const std::string &builtin) {
  if (!config_path.empty()) return coopadmm::load_config(config_path);
  if (builtin == "junction") return coopadmm::junction_scenario();
  if (builtin == "intersection") return coopadmm::intersection_scenario();
  throw coopadmm::ConfigError("pass --config <file> or --scenario "
                              "junction|intersection");
}

void print_progress(const coopadmm::IterationRecord &rec) {
  std::printf("iter %3d  residual %.6f  y %.0f ms  z %.0f ms\n", rec.k,
              rec.residual, rec.y_step_ms, rec.z_step_ms);
  std::fflush(stdout);
}

int run_one(coopadmm::ScenarioConfig cfg, const std::string &out_dir,
            int trials, bool quiet) {
  namespace fs = std::filesystem;
  const coopadmm::ProgressSink sink =
      quiet ? coopadmm::ProgressSink{} : print_progress;

  std::string summary = coopadmm::summary_csv_header();
  bool all_converged = true;
  for (int t = 0; t < trials; ++t) {
    coopadmm::ScenarioConfig trial_cfg = cfg;
    trial_cfg.seed = cfg.seed + static_cast<std::uint64_t>(t);
    if (!quiet && trials > 1) {
      std::printf("--- trial %d (seed %llu) ---\n", t,
                  static_cast<unsigned long long>(trial_cfg.seed));
    }
    const coopadmm::ExperimentReport report =
        coopadmm::run_experiment(trial_cfg, sink);
    summary += coopadmm::summary_csv_row(report);
    all_converged &=
        report.status == coopadmm::AdmmStatus::Converged;
    if (!out_dir.empty() && t == 0) {
      coopadmm::emit_outputs(report, out_dir);
    }
    if (!quiet) {
      std::printf("%s: %s after %d iterations, residual %.6f, "
                  "min distance %.3f m, %.2f s\n",
                  trial_cfg.name.c_str(),
                  report.status == coopadmm::AdmmStatus::Converged
                      ? "converged"
                      : "NOT converged",
                  report.iterations, report.residual, report.min_distance(),
                  report.total_seconds);
    }
  }
  if (!out_dir.empty()) {
    std::ofstream out(fs::path(out_dir) / "summary.csv", std::ios::binary);
    out << summary;
  } else {
    std::cout << summary;
  }
  return all_converged ? kExitOk : kExitNotConverged;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Cooperative trajectory optimization for connected vehicles"};
  app.require_subcommand(1);

  std::string config_path, builtin, backend, out_dir;
  std::uint64_t seed = 0;
  int trials = 1;
  bool quiet = false;

  auto add_scenario_opts = [&](CLI::App *cmd) {
    cmd->add_option("--config", config_path, "Scenario JSON file");
    cmd->add_option("--scenario", builtin,
                    "Built-in scenario: junction | intersection");
    cmd->add_flag("--quiet", quiet, "Suppress per-iteration output");
  };

  CLI::App *run = app.add_subcommand("run", "Run one scenario");
  add_scenario_opts(run);
  run->add_option("--backend", backend, "sdr | miqp | oracle");
  run->add_option("--seed", seed, "RNG seed (base seed with --trials)");
  run->add_option("--out", out_dir, "Output directory for CSV/SVG artifacts");
  run->add_option("--trials", trials, "Number of seeds to run")
      ->check(CLI::PositiveNumber);

  CLI::App *compare =
      app.add_subcommand("compare", "Run every projection backend");
  add_scenario_opts(compare);
  compare->add_option("--seed", seed, "RNG seed");
  compare->add_option("--out", out_dir, "Output directory");

  CLI::App *validate =
      app.add_subcommand("validate", "Parse and validate a scenario config");
  add_scenario_opts(validate);

  CLI11_PARSE(app, argc, argv);

  try {
    coopadmm::ScenarioConfig cfg = load_scenario(config_path, builtin);

    if (validate->parsed()) {
      cfg.validate();
      coopadmm::generate_reference(cfg); // geometry checks
      std::printf("ok: %s, %zu vehicles, T = %d, backend %s\n",
                  cfg.name.c_str(), cfg.vehicles.size(), cfg.horizon,
                  cfg.backend.c_str());
      return kExitOk;
    }

    if (run->parsed()) {
      if (!backend.empty()) cfg.backend = backend;
      if (run->count("--seed")) cfg.seed = seed;
      coopadmm::backend_from_string(cfg.backend);
      return run_one(cfg, out_dir, trials, quiet);
    }

    // compare: every backend on the same configuration
    if (compare->count("--seed")) cfg.seed = seed;
    std::string summary = coopadmm::summary_csv_header();
    bool all_converged = true;
    for (const char *b : {"sdr", "miqp", "oracle"}) {
      coopadmm::ScenarioConfig c = cfg;
      c.backend = b;
      const coopadmm::ExperimentReport report = coopadmm::run_experiment(
          c, quiet ? coopadmm::ProgressSink{} : print_progress);
      summary += coopadmm::summary_csv_row(report);
      all_converged &= report.status == coopadmm::AdmmStatus::Converged;
      if (!out_dir.empty()) {
        coopadmm::emit_outputs(
            report, (std::filesystem::path(out_dir) / b).string());
      }
    }
    if (!out_dir.empty()) {
      std::ofstream out(std::filesystem::path(out_dir) / "summary.csv",
                        std::ios::binary);
      out << summary;
    }
    std::cout << summary;
    return all_converged ? kExitOk : kExitNotConverged;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
