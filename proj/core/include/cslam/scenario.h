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

#ifndef CSLAM_SCENARIO_H_
#define CSLAM_SCENARIO_H_

#include <cstdint>
#include <string>

#include "Eigen/Core"
#include "cslam/association.h"
#include "cslam/gp_contour.h"
#include "cslam/simulator.h"
#include "cslam/slam_core.h"

namespace cslam {

inline constexpr int kScenarioSchemaVersion = 1;

struct OutputConfig {
  std::string dir = "out";
  int snapshot_every = 10;     // landmark snapshots in the run log
  int iou_every = 10;          // map IoU evaluation cadence
  double iou_resolution = 0.05;  // [m]
  int contour_samples = 360;   // polygon samples per estimated contour
};

// Everything needed to reproduce a run. Angles are radians in memory; the
// JSON document uses *_deg fields where noted.
struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  double dt = 0.1;  // [s]
  int steps = 0;    // 0: as many as the trajectory allows
  int basis_count = 50;

  World world;
  TrajectorySpec trajectory;
  SensorSpec sensor;
  GpHyperparams gp;
  NoiseConfig noise;
  AssociationConfig association;
  IekfSettings iekf;
  Eigen::Matrix3d initial_pose_cov = Eigen::Matrix3d::Zero();
  OutputConfig output;

  // Number of filter steps including the initial one at t = 0.
  int StepCount() const;
  // Throws ConfigError with the offending field path.
  void Validate() const;
};

// Schema (version 1):
// {
//   "schema_version": 1, "name": str, "seed": int, "dt": s, "steps": int,
//   "basis_count": int,
//   "world": {"objects": [{"id": int, "center": [x, y], "shape":
//       {"type": "polygon", "vertices": [[x, y], ...]} |
//       {"type": "regular_polygon", "sides": int, "circumradius": m,
//        "rotation_deg": deg} |
//       {"type": "fourier", "mean_radius": m, "cos": [...], "sin": [...]}}]},
//   "trajectory": {"initial": {"x", "y", "heading_deg"}, "segments": [
//       {"type": "straight", "length", "speed"} |
//       {"type": "arc", "radius", "sweep_deg", "speed"}]},
//   "sensor": {"angular_resolution_deg", "max_range", "range_noise_std",
//       "odom_noise_std": [m, m, deg] | "odom_noise_cov": 3x3},
//   "gp": {"sigma_f", "length_scale", "sigma_r", "meas_noise", "forgetting",
//       "kernel": "half_angle" | "full_angle"},
//   "noise": {"pose_process": 3x3, "center_process": 2x2,
//       "measurement": 2x2},
//   "association": {"gate_gamma", "cluster_eps", "cluster_min_pts",
//       "min_cluster_size", "init_center_cov": 2x2,
//       "radial_variance_inflation", "init_center_push"},
//   "iekf": {"max_iter", "tol"},
//   "initial_pose_cov": 3x3,
//   "output": {"dir", "snapshot_every", "iou_every", "iou_resolution",
//       "contour_samples"}
// }
// Omitted fields keep their defaults, except that noise.pose_process
// defaults to the odometry covariance and noise.measurement to
// range_noise_std^2 I. Unknown keys are rejected.
ScenarioConfig ParseScenario(const std::string& json_text);
ScenarioConfig LoadScenario(const std::string& path);

}  // namespace cslam

#endif  // CSLAM_SCENARIO_H_
