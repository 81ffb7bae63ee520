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

#ifndef CSLAM_RUN_LOG_H_
#define CSLAM_RUN_LOG_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "cslam/geometry.h"
#include "cslam/gp_contour.h"
#include "cslam/simulator.h"

namespace cslam {

struct LandmarkSnapshot {
  int id = 0;
  int hits = 0;
  Vec2 center = Vec2::Zero();
  Eigen::VectorXd radii;       // contour mean at the basis angles
  Eigen::VectorXd radius_std;  // marginal std at the basis angles
};

// One scan point's fate: the landmark it was associated with (-1 when it was
// left unassociated) and the simulator's ground-truth object id.
struct PointLabel {
  int landmark_id = -1;
  int truth_id = -1;
};

struct StepRecord {
  int step = 0;
  double time = 0.0;
  RobotPose true_pose;
  RobotPose estimated_pose;
  int iekf_iterations = 0;
  std::vector<std::string> phases;
  std::optional<double> iou;
  std::vector<LandmarkSnapshot> landmarks;
  std::vector<PointLabel> associations;
};

struct RunLogHeader {
  std::string scenario;
  std::uint64_t seed = 0;
  int basis_count = 0;
  int snapshot_every = 10;
  double iou_resolution = 0.05;
  GpHyperparams gp;
  std::vector<WorldObject> truth;
};

// Serialized as newline-delimited JSON: one header record followed by one
// record per step. Step fields, in order: type, step, time, true_pose,
// estimated_pose, iekf_iterations, phases, iou, landmarks, associations.
struct RunLog {
  RunLogHeader header;
  std::vector<StepRecord> steps;
};

void WriteRunLog(const RunLog& log, std::ostream& out);
std::string SerializeRunLog(const RunLog& log);
// Throws std::runtime_error on malformed input.
RunLog ReadRunLog(std::istream& in);
RunLog LoadRunLog(const std::string& path);
void SaveRunLog(const RunLog& log, const std::string& path);

}  // namespace cslam

#endif  // CSLAM_RUN_LOG_H_
