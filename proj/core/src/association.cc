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

#include "cslam/association.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "cslam/errors.h"

namespace cslam {

void AssociationConfig::Validate() const {
  if (!(gate_gamma > 0.0)) throw std::invalid_argument("gate_gamma must be > 0");
  if (!(cluster_eps > 0.0)) {
    throw std::invalid_argument("cluster_eps must be > 0");
  }
  if (cluster_min_pts < 2) {
    throw std::invalid_argument("cluster_min_pts must be >= 2");
  }
  if (min_cluster_size < 1) {
    throw std::invalid_argument("min_cluster_size must be >= 1");
  }
  if (!(radial_variance_inflation >= 0.0)) {
    throw std::invalid_argument("radial_variance_inflation must be >= 0");
  }
  if (!(init_center_push >= 0.0)) {
    throw std::invalid_argument("init_center_push must be >= 0");
  }
}

AssociatedScan Associate(const std::vector<Vec2>& scan_local,
                         const SlamState& state, const AssociationConfig& config,
                         const ContourModel& model) {
  const RobotPose pose = state.pose();
  const int count = state.landmark_count();
  std::vector<Landmark> landmarks;
  landmarks.reserve(count);
  for (int i = 0; i < count; ++i) landmarks.push_back(state.ExtractLandmark(i));

  std::vector<std::vector<AssociatedPoint>> per_landmark(count);
  AssociatedScan out;
  for (int j = 0; j < static_cast<int>(scan_local.size()); ++j) {
    int best = -1;
    double best_likelihood = -1.0;
    AssociatedPoint best_point;
    for (int i = 0; i < count; ++i) {
      RadialQuery query;
      try {
        query = QueryRadial(landmarks[i], scan_local[j], pose, model);
      } catch (const DegenerateGeometry&) {
        continue;
      }
      const double variance = std::max(
          query.prediction.variance + config.radial_variance_inflation, 1e-12);
      if (!Gate(query.radius, query.prediction.mean, variance,
                config.gate_gamma)) {
        continue;
      }
      const double likelihood =
          GaussianDensity(query.radius, query.prediction.mean, variance);
      const bool better =
          likelihood > best_likelihood ||
          (likelihood == best_likelihood && best >= 0 &&
           landmarks[i].id < landmarks[best].id);
      if (better) {
        best = i;
        best_likelihood = likelihood;
        best_point = {j, scan_local[j], query.angle, query.radius};
      }
    }
    if (best < 0) {
      out.unassociated.push_back(j);
      out.unassociated_local.push_back(scan_local[j]);
    } else {
      per_landmark[best].push_back(best_point);
    }
  }
  for (int i = 0; i < count; ++i) {
    if (!per_landmark[i].empty()) {
      out.groups.push_back({i, std::move(per_landmark[i])});
    }
  }
  return out;
}

std::vector<std::vector<int>> ClusterIndices(const std::vector<Vec2>& points,
                                             const AssociationConfig& config) {
  const int n = static_cast<int>(points.size());
  const double eps2 = config.cluster_eps * config.cluster_eps;
  std::vector<std::vector<int>> neighbours(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if ((points[a] - points[b]).squaredNorm() <= eps2) {
        neighbours[a].push_back(b);
      }
    }
  }
  constexpr int kUnvisited = -2;
  constexpr int kNoise = -1;
  std::vector<int> label(n, kUnvisited);
  std::vector<std::vector<int>> clusters;
  for (int seed = 0; seed < n; ++seed) {
    if (label[seed] != kUnvisited) continue;
    if (static_cast<int>(neighbours[seed].size()) < config.cluster_min_pts) {
      label[seed] = kNoise;
      continue;
    }
    const int cluster_id = static_cast<int>(clusters.size());
    clusters.emplace_back();
    std::deque<int> frontier{seed};
    label[seed] = cluster_id;
    while (!frontier.empty()) {
      const int current = frontier.front();
      frontier.pop_front();
      clusters[cluster_id].push_back(current);
      if (static_cast<int>(neighbours[current].size()) <
          config.cluster_min_pts) {
        continue;  // border point
      }
      for (int next : neighbours[current]) {
        if (label[next] == kUnvisited || label[next] == kNoise) {
          label[next] = cluster_id;
          frontier.push_back(next);
        }
      }
    }
    std::sort(clusters[cluster_id].begin(), clusters[cluster_id].end());
  }
  std::erase_if(clusters, [&](const std::vector<int>& c) {
    return static_cast<int>(c.size()) < config.min_cluster_size;
  });
  return clusters;
}

std::vector<std::vector<Vec2>> Cluster(const std::vector<Vec2>& points,
                                       const AssociationConfig& config) {
  std::vector<std::vector<Vec2>> out;
  for (const auto& indices : ClusterIndices(points, config)) {
    std::vector<Vec2>& cluster = out.emplace_back();
    cluster.reserve(indices.size());
    for (int i : indices) cluster.push_back(points[i]);
  }
  return out;
}

Landmark Initiate(const std::vector<Vec2>& cluster, const RobotPose& pose,
                  const AssociationConfig& config, const ContourModel& model,
                  int id) {
  if (cluster.empty()) throw std::invalid_argument("empty cluster");
  Vec2 centroid = Vec2::Zero();
  for (const Vec2& p : cluster) centroid += p;
  centroid /= static_cast<double>(cluster.size());
  double half_extent = 0.0;
  for (const Vec2& p : cluster) {
    half_extent = std::max(half_extent, (p - centroid).norm());
  }
  if (half_extent < kDegenerateRadius) {
    throw DegenerateGeometry("cluster points coincide");
  }

  Landmark lm;
  lm.id = id;
  lm.hits = static_cast<int>(cluster.size());
  lm.center = centroid;
  const Vec2 away = centroid - pose.position;
  if (config.init_center_push > 0.0 && away.norm() > kDegenerateRadius) {
    lm.center += config.init_center_push * half_extent * away.normalized();
  }
  lm.contour = model.InitContour();
  for (const Vec2& p : cluster) {
    const Vec2 offset = p - lm.center;
    const double radius = offset.norm();
    if (radius < kDegenerateRadius) continue;
    model.Condition(NormalizePositiveAngle(std::atan2(offset.y(), offset.x())),
                    radius, lm.contour);
  }
  return lm;
}

}  // namespace cslam
