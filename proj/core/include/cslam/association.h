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

#ifndef CSLAM_ASSOCIATION_H_
#define CSLAM_ASSOCIATION_H_

#include <vector>

#include "cslam/geometry.h"
#include "cslam/gp_contour.h"
#include "cslam/landmark.h"
#include "cslam/slam_core.h"

namespace cslam {

struct AssociationConfig {
  // Chi-square 95% quantile with one degree of freedom.
  double gate_gamma = 3.841458820694124;
  double cluster_eps = 0.3;     // [m]
  int cluster_min_pts = 3;      // neighbours (self included) of a core point
  int min_cluster_size = 4;
  Mat2 init_center_cov = 0.05 * Mat2::Identity();
  // Added to the GP marginal variance in likelihood and gate. Zero gives the
  // bare latent-function marginal.
  double radial_variance_inflation = 0.0;
  // New centers are moved away from the sensor by this fraction of the
  // cluster half-extent. Zero keeps the centroid.
  double init_center_push = 0.0;

  // Throws std::invalid_argument.
  void Validate() const;
};

// Likelihood argmax over landmarks that pass the gate, evaluated on the
// predicted state. Points rejected by every gate are returned unassociated.
AssociatedScan Associate(const std::vector<Vec2>& scan_local,
                         const SlamState& state, const AssociationConfig& config,
                         const ContourModel& model);

// DBSCAN on world-frame points. Returns index lists in discovery order; noise
// points and clusters smaller than min_cluster_size are dropped.
std::vector<std::vector<int>> ClusterIndices(const std::vector<Vec2>& points,
                                             const AssociationConfig& config);

std::vector<std::vector<Vec2>> Cluster(const std::vector<Vec2>& points,
                                       const AssociationConfig& config);

// New landmark from a world-frame cluster: center from the centroid, contour
// from the GP prior conditioned on every point's radial observation.
// Throws DegenerateGeometry when all points coincide.
Landmark Initiate(const std::vector<Vec2>& cluster, const RobotPose& pose,
                  const AssociationConfig& config, const ContourModel& model,
                  int id);

}  // namespace cslam

#endif  // CSLAM_ASSOCIATION_H_
