/*
 * Copyright 2026 The cslam Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command line harness: run a scenario, re-render a run log, or validate a
// scenario document.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cslam/errors.h"
#include "cslam/pipeline.h"
#include "cslam/report.h"
#include "cslam/run_log.h"
#include "cslam/scenario.h"

namespace {

void PrintSummary(const cslam::RunResult& result) {
  std::printf("rmse_x=%.4f m rmse_y=%.4f m rmse_heading=%.3f deg\n",
              result.rmse.x, result.rmse.y, result.rmse.heading_deg);
  std::printf("final_iou=%.4f landmarks=%d association_accuracy=%.4f\n",
              result.final_iou, result.final_state.landmark_count(),
              result.association.accuracy);
  if (result.min_iou_after_full_observation) {
    std::printf("min_iou_after_full_observation=%.4f (from step %d)\n",
                *result.min_iou_after_full_observation,
                *result.full_observation_step);
  }
  std::printf("covariance_violations=%d/%d\n", result.covariance_violations,
              result.covariance_checks);
}

int Run(const std::string& config_path, std::optional<std::uint64_t> seed,
        std::optional<std::string> out_dir) {
  cslam::ScenarioConfig config = cslam::LoadScenario(config_path);
  if (seed) {
    config.seed = *seed;
    config.sensor.seed = *seed;
  }
  if (out_dir) config.output.dir = *out_dir;
  const cslam::RunResult result = cslam::RunScenario(config);
  std::filesystem::create_directories(config.output.dir);
  const std::string log_path =
      (std::filesystem::path(config.output.dir) / "runlog.ndjson").string();
  cslam::SaveRunLog(result.log, log_path);
  cslam::WriteReport(result.log, config.output.dir);
  std::printf("wrote %s\n", log_path.c_str());
  PrintSummary(result);
  return 0;
}

int Report(const std::string& log_path, std::optional<std::string> out_dir) {
  const cslam::RunLog log = cslam::LoadRunLog(log_path);
  const std::string dir =
      out_dir ? *out_dir
              : std::filesystem::path(log_path).parent_path().string();
  const auto files = cslam::WriteReport(log, dir.empty() ? "." : dir);
  const cslam::MetricsTable table = cslam::BuildMetricsTable(log);
  std::printf("rmse_x=%.4f m rmse_y=%.4f m rmse_heading=%.3f deg\n",
              table.summary.rmse_x, table.summary.rmse_y,
              table.summary.rmse_heading_deg);
  std::printf("wrote %zu files\n", files.size());
  return 0;
}

int Validate(const std::string& config_path) {
  const cslam::ScenarioConfig config = cslam::LoadScenario(config_path);
  std::printf("%s: ok (%zu objects, %d steps, %d beams)\n", config.name.c_str(),
              config.world.objects.size(), config.StepCount(),
              config.sensor.BeamCount());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contour SLAM simulator and evaluation harness"};
  app.require_subcommand(1);

  std::string run_config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  CLI::App* run = app.add_subcommand("run", "Simulate and filter a scenario");
  run->add_option("config", run_config, "Scenario JSON")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_dir, "Output directory");

  std::string log_path;
  std::optional<std::string> report_out;
  CLI::App* report = app.add_subcommand("report", "Metrics and plots from a run log");
  report->add_option("runlog", log_path, "Run log (NDJSON)")->required();
  report->add_option("--out", report_out, "Output directory");

  std::string validate_config;
  CLI::App* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("config", validate_config, "Scenario JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return Run(run_config, seed, out_dir);
    if (*report) return Report(log_path, report_out);
    if (*validate) return Validate(validate_config);
  } catch (const cslam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
