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

#ifndef CSLAM_PIPELINE_H_
#define CSLAM_PIPELINE_H_

#include <optional>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "cslam/association.h"
#include "cslam/gp_contour.h"
#include "cslam/metrics.h"
#include "cslam/run_log.h"
#include "cslam/scenario.h"
#include "cslam/slam_core.h"

namespace cslam {

enum class Phase { kPredict, kAssociate, kInitiate, kCorrect };

const char* PhaseName(Phase phase);

// Enforces predict -> associate -> initiate -> correct within a step. Predict
// may only be skipped on the first step. Violations throw std::logic_error.
class PhaseTrace {
 public:
  void BeginStep(int step);
  void Enter(Phase phase);
  // Throws unless the current step reached the correction phase.
  void EndStep() const;

  const std::vector<Phase>& phases() const { return phases_; }
  std::vector<std::string> Names() const;

 private:
  int step_ = -1;
  std::vector<Phase> phases_;
};

struct FilterConfig {
  int basis_count = 50;
  GpHyperparams gp;
  NoiseConfig noise;
  AssociationConfig association;
  IekfSettings iekf;
};

struct StepOutcome {
  std::vector<Phase> phases;
  int iekf_iterations = 0;
  // Landmark id per scan point from the association phase, -1 otherwise.
  std::vector<int> point_landmarks;
  std::vector<int> initiated;  // ids of landmarks created this step
};

// The recursive filter: one call per scan.
class ContourSlam {
 public:
  ContourSlam(const FilterConfig& config, const RobotPose& initial_pose,
              const Eigen::Matrix3d& initial_pose_cov);

  // `odometry` is absent on the first step only. Throws NumericalFailure if
  // the update cannot be computed.
  StepOutcome ProcessStep(const std::optional<Eigen::Vector3d>& odometry,
                          const std::vector<Vec2>& scan_local);

  const SlamState& state() const { return state_; }
  const ContourModel& model() const { return model_; }
  const FilterConfig& config() const { return config_; }
  int steps_processed() const { return step_; }

  std::vector<Landmark> Landmarks() const;
  // Mean contours in world coordinates.
  std::vector<std::vector<Vec2>> ContourPolygons(int samples) const;

 private:
  FilterConfig config_;
  ContourModel model_;
  SlamState state_;
  PhaseTrace trace_;
  int step_ = 0;
  int next_id_ = 0;
};

inline constexpr int kCoverageBins = 36;

struct RunResult {
  RunLog log;
  SlamState final_state;
  PoseRmse rmse;
  double final_iou = 0.0;  // against every truth object
  // Minimum logged IoU from the first step at which every truth object had
  // been hit by a beam; absent if that never happened.
  std::optional<double> min_iou_after_first_sighting;
  // An object is fully observed once no beam later reveals a new
  // kCoverageBins-th of its boundary (angles about its true center). Minimum
  // logged IoU from the step at which every object is fully observed.
  std::optional<int> full_observation_step;
  std::optional<double> min_iou_after_full_observation;
  AssociationAccuracy association;
  int covariance_checks = 0;
  int covariance_violations = 0;
  double max_symmetry_error = 0.0;
};

struct RunOptions {
  bool record_snapshots = true;
};

// Simulates and filters the whole scenario. Numerical failures are rethrown
// as NumericalFailure naming the step index.
RunResult RunScenario(const ScenarioConfig& config,
                      const RunOptions& options = {});

FilterConfig MakeFilterConfig(const ScenarioConfig& config);

}  // namespace cslam

#endif  // CSLAM_PIPELINE_H_
