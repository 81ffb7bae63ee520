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

#ifndef CSLAM_REPORT_H_
#define CSLAM_REPORT_H_

#include <optional>
#include <string>
#include <vector>

#include "cslam/geometry.h"
#include "cslam/run_log.h"

namespace cslam {

// Band confidence used in map renderings.
inline constexpr double kSnapshotConfidence = 0.99;

struct MetricsRow {
  int step = 0;
  double time = 0.0;
  double err_x = 0.0;            // estimate - truth [m]
  double err_y = 0.0;            // [m]
  double err_heading_deg = 0.0;  // wrapped [deg]
  std::optional<double> iou;
};

struct MetricsSummary {
  double rmse_x = 0.0;
  double rmse_y = 0.0;
  double rmse_heading_deg = 0.0;
  std::optional<double> final_iou;  // last logged IoU
};

struct MetricsTable {
  std::vector<MetricsRow> rows;
  MetricsSummary summary;
};

MetricsTable BuildMetricsTable(const RunLog& log);

// Header "step,time,err_x,err_y,err_heading_deg,iou", one row per step and a
// final row whose first column is "summary" and whose error columns carry
// the RMSEs. Missing IoU values are empty cells. Numbers use the shortest
// representation that parses back to the same double.
std::string SerializeMetricsCsv(const MetricsTable& table);
// Throws std::runtime_error on malformed input.
MetricsTable ParseMetricsCsv(const std::string& text);

struct Box {
  Vec2 min = Vec2::Zero();
  Vec2 max = Vec2::Zero();

  bool Contains(const Vec2& p) const {
    return p.x() >= min.x() && p.y() >= min.y() && p.x() <= max.x() &&
           p.y() <= max.y();
  }
};

struct ContourDrawing {
  int id = 0;
  Vec2 center = Vec2::Zero();
  std::vector<Vec2> mean;
  std::vector<Vec2> lower;  // band edges at kSnapshotConfidence
  std::vector<Vec2> upper;
};

// World-frame geometry of one step: estimated contours, truth outlines and
// both trajectories up to that step.
struct MapSnapshot {
  int step = 0;
  std::vector<ContourDrawing> contours;
  std::vector<std::vector<Vec2>> truth;
  std::vector<Vec2> true_path;
  std::vector<Vec2> estimated_path;

  // Tight box around every drawn point, grown by `margin`.
  Box Bounds(double margin = 0.5) const;
};

// Throws std::out_of_range for an invalid index.
MapSnapshot BuildSnapshot(const RunLog& log, std::size_t step_index);

std::string RenderSvg(const MapSnapshot& snapshot);

// Writes metrics.csv and snapshots/step_NNNNN.svg (for every step carrying
// landmark snapshots) under `dir`. Returns the written paths.
std::vector<std::string> WriteReport(const RunLog& log, const std::string& dir);

}  // namespace cslam

#endif  // CSLAM_REPORT_H_
