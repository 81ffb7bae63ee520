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
#include <functional>
#include <map>
#include <random>
#include <set>

#include "Eigen/Dense"
#include "cslam/errors.h"
#include "gtest/gtest.h"

namespace cslam {
namespace {

constexpr int kBasis = 50;

GpHyperparams Defaults() {
  GpHyperparams h;
  h.meas_noise = 1e-4;
  return h;
}

Landmark Circle(const ContourModel& model, int id, const Vec2& center, double radius) {
  Landmark lm;
  lm.id = id;
  lm.center = center;
  lm.hits = 1;
  lm.contour.mean = Eigen::VectorXd::Constant(model.size(), radius);
  lm.contour.cov = 1e-4 * Eigen::MatrixXd::Identity(model.size(), model.size());
  return lm;
}

SlamState MapWith(const std::vector<Landmark>& landmarks, const RobotPose& pose,
                  const ContourModel& model) {
  SlamState s = SlamState::Create(pose, Eigen::Matrix3d::Zero(), model.size());
  for (const Landmark& lm : landmarks) s = Augment(s, lm, 1e-4 * Mat2::Identity(), model);
  return s;
}

TEST(Associate, EmptyMapLeavesEverythingUnassociated) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  const SlamState s = MapWith({}, RobotPose(), model);
  const std::vector<Vec2> scan = {Vec2(1, 0), Vec2(2, 1), Vec2(-1, 3)};
  const AssociatedScan out = Associate(scan, s, AssociationConfig(), model);
  EXPECT_TRUE(out.groups.empty());
  EXPECT_EQ(out.unassociated, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(out.unassociated_local.size(), 3u);
}

TEST(Associate, PointOnContourIsAssociated) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  const RobotPose pose(-1, -2, 0.4);
  const SlamState s = MapWith({Circle(model, 0, Vec2(2, 1), 1.0)}, pose, model);
  const Vec2 local = GlobalToLocal(Vec2(2, 1) + Direction(model.grid().angles()[30]), pose);
  const AssociatedScan out = Associate({local}, s, AssociationConfig(), model);
  ASSERT_EQ(out.groups.size(), 1u);
  ASSERT_EQ(out.groups[0].points.size(), 1u);
  EXPECT_NEAR(out.groups[0].points[0].angle, model.grid().angles()[30], 1e-12);
  EXPECT_NEAR(out.groups[0].points[0].radius, 1.0, 1e-12);
  EXPECT_TRUE(out.unassociated.empty());
}

TEST(Associate, TwoSeparatedCirclesMatchGroundTruth) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  const RobotPose pose(0, -4, 0.2);
  const Vec2 a(-2.5, 0), b(2.5, 0);
  const SlamState s = MapWith({Circle(model, 0, a, 1.0), Circle(model, 1, b, 1.0)}, pose, model);
  const double sigma = 0.05;  // 0.01 x separation
  AssociationConfig config;
  config.radial_variance_inflation = sigma * sigma;

  std::mt19937_64 rng(42);
  std::normal_distribution<double> noise(0, sigma);
  std::uniform_real_distribution<double> angle(0, kTwoPi);
  std::vector<Vec2> scan;
  std::vector<int> truth;
  for (int k = 0; k < 40; ++k) {
    const Vec2 c = k < 20 ? a : b;
    const Vec2 world = c + Direction(angle(rng)) + Vec2(noise(rng), noise(rng));
    scan.push_back(GlobalToLocal(world, pose));
    truth.push_back(k < 20 ? 0 : 1);
  }
  const AssociatedScan out = Associate(scan, s, config, model);
  int associated = 0;
  for (const auto& group : out.groups) {
    for (const auto& p : group.points) {
      EXPECT_EQ(group.landmark_index, truth[p.scan_index]);
      ++associated;
    }
  }
  EXPECT_GE(associated, 36);
  EXPECT_EQ(associated + static_cast<int>(out.unassociated.size()), 40);
}

TEST(Associate, PartitionAndGateConsistency) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  const RobotPose pose(0.3, -0.2, -0.7);
  const SlamState s = MapWith({Circle(model, 0, Vec2(0, 3), 1.0), Circle(model, 1, Vec2(2, 3), 0.8),
                               Circle(model, 2, Vec2(-3, -1), 1.2)},
                              pose, model);
  AssociationConfig config;
  config.radial_variance_inflation = 0.01;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<Vec2> scan(300);
  for (Vec2& p : scan) p = Vec2(u(rng), u(rng));
  const AssociatedScan out = Associate(scan, s, config, model);
  std::set<int> seen(out.unassociated.begin(), out.unassociated.end());
  for (const auto& group : out.groups) {
    const Landmark lm = s.ExtractLandmark(group.landmark_index);
    for (const auto& p : group.points) {
      EXPECT_TRUE(seen.insert(p.scan_index).second);
      const RadialQuery q = QueryRadial(lm, scan[p.scan_index], pose, model);
      EXPECT_TRUE(Gate(q.radius, q.prediction.mean,
                       q.prediction.variance + config.radial_variance_inflation,
                       config.gate_gamma));
    }
  }
  EXPECT_EQ(seen.size(), scan.size());
  EXPECT_GT(out.associated_count(), 0);
}

TEST(Associate, TiesGoToLowestId) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  const SlamState s = MapWith({Circle(model, 7, Vec2(3, 0), 1.0), Circle(model, 3, Vec2(3, 0), 1.0)},
                              RobotPose(), model);
  const AssociatedScan out = Associate({Vec2(2, 0)}, s, AssociationConfig(), model);
  ASSERT_EQ(out.groups.size(), 1u);
  EXPECT_EQ(s.landmarks[out.groups[0].landmark_index].id, 3);
}

TEST(Cluster, EmptyAndSeparatedGroups) {
  AssociationConfig config;
  EXPECT_TRUE(Cluster({}, config).empty());
  std::vector<Vec2> points;
  for (int i = 0; i < 10; ++i) points.emplace_back(0.05 * i, 0.0);
  for (int i = 0; i < 10; ++i) points.emplace_back(10 * config.cluster_eps + 0.05 * i, 0.0);
  const auto clusters = ClusterIndices(points, config);
  ASSERT_EQ(clusters.size(), 2u);
  EXPECT_EQ(clusters[0].size(), 10u);
  EXPECT_EQ(clusters[1].front(), 10);
  config.min_cluster_size = 11;
  EXPECT_TRUE(Cluster(points, config).empty());
}

// Connected components of the eps-graph restricted to core points.
std::vector<std::set<int>> CoreComponents(const std::vector<Vec2>& pts, double eps, int min_pts,
                                          std::vector<bool>& core) {
  const int n = static_cast<int>(pts.size());
  core.assign(n, false);
  for (int i = 0; i < n; ++i) {
    int count = 0;
    for (int j = 0; j < n; ++j) count += (pts[i] - pts[j]).norm() <= eps;
    core[i] = count >= min_pts;
  }
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (core[i] && core[j] && (pts[i] - pts[j]).norm() <= eps) parent[find(i)] = find(j);
  std::map<int, std::set<int>> groups;
  for (int i = 0; i < n; ++i)
    if (core[i]) groups[find(i)].insert(i);
  std::vector<std::set<int>> out;
  for (auto& [root, members] : groups) out.push_back(members);
  return out;
}

TEST(Cluster, MatchesBruteForceOracle) {
  AssociationConfig config;
  config.cluster_eps = 0.45;
  config.cluster_min_pts = 4;
  config.min_cluster_size = 1;
  for (int seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 10);
    std::vector<Vec2> pts(200);
    for (Vec2& p : pts) p = Vec2(u(rng), u(rng));
    std::vector<bool> core;
    const auto oracle = CoreComponents(pts, config.cluster_eps, config.cluster_min_pts, core);
    const auto clusters = ClusterIndices(pts, config);
    ASSERT_EQ(clusters.size(), oracle.size());
    std::vector<int> label(pts.size(), -1);
    for (int c = 0; c < static_cast<int>(clusters.size()); ++c) {
      for (int i : clusters[c]) {
        EXPECT_EQ(label[i], -1) << "point in two clusters";
        label[i] = c;
      }
    }
    std::set<std::set<int>> found_cores;
    for (const auto& cluster : clusters) {
      std::set<int> cores;
      for (int i : cluster) if (core[i]) cores.insert(i);
      found_cores.insert(cores);
    }
    EXPECT_EQ(found_cores, std::set<std::set<int>>(oracle.begin(), oracle.end()));
    for (int i = 0; i < 200; ++i) {
      if (core[i]) continue;
      bool near_core = false;
      for (int j = 0; j < 200; ++j) {
        if (core[j] && (pts[i] - pts[j]).norm() <= config.cluster_eps) {
          near_core = true;
          if (label[i] == label[j]) break;
        }
      }
      // Border points join a neighbouring core's cluster; others are noise.
      if (near_core) {
        ASSERT_GE(label[i], 0);
        bool joined = false;
        for (int j = 0; j < 200; ++j)
          joined |= core[j] && label[j] == label[i] &&
                    (pts[i] - pts[j]).norm() <= config.cluster_eps;
        EXPECT_TRUE(joined);
      } else {
        EXPECT_EQ(label[i], -1);
      }
    }
    // Deterministic.
    EXPECT_EQ(ClusterIndices(pts, config), clusters);
  }
}

TEST(Initiate, UnitCircleCluster) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  std::vector<Vec2> cluster;
  const Vec2 c(4, -1);
  for (int k = 0; k < 36; ++k) cluster.push_back(c + Direction(kTwoPi * k / 36 + 0.01));
  const Landmark lm = Initiate(cluster, RobotPose(), AssociationConfig(), model, 11);
  EXPECT_EQ(lm.id, 11);
  EXPECT_EQ(lm.hits, 36);
  EXPECT_LT((lm.center - c).norm(), 1e-12);
  for (int i = 0; i < kBasis; ++i) EXPECT_NEAR(lm.contour.mean[i], 1.0, 0.05) << i;
  EXPECT_LT(lm.contour.cov.trace(), model.InitContour().cov.trace());

  // Batch GP oracle on the same radial observations.
  Eigen::MatrixXd h(36, kBasis);
  Eigen::VectorXd y(36), r(36);
  for (int k = 0; k < 36; ++k) {
    const Vec2 d = cluster[k] - c;
    const double a = NormalizePositiveAngle(std::atan2(d.y(), d.x()));
    const GpMeasurement m = model.MeasurementModel(a);
    h.row(k) = m.row;
    r[k] = m.noise;
    y[k] = d.norm();
  }
  const ContourState prior = model.InitContour();
  const Eigen::MatrixXd s = h * prior.cov * h.transpose() + Eigen::MatrixXd(r.asDiagonal());
  const Eigen::VectorXd mean = prior.cov * h.transpose() * s.ldlt().solve(y);
  EXPECT_LT((lm.contour.mean - mean).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Initiate, CenterPushAndDegenerate) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  std::vector<Vec2> flat = {Vec2(3, -0.3), Vec2(3, -0.1), Vec2(3, 0.1), Vec2(3, 0.3)};
  AssociationConfig config;
  const Landmark plain = Initiate(flat, RobotPose(), config, model, 0);
  EXPECT_LT((plain.center - Vec2(3, 0)).norm(), 1e-12);
  config.init_center_push = 1.0;
  const Landmark pushed = Initiate(flat, RobotPose(), config, model, 0);
  EXPECT_LT((pushed.center - Vec2(3.3, 0)).norm(), 1e-12);
  EXPECT_THROW(Initiate({Vec2(1, 1), Vec2(1, 1)}, RobotPose(), config, model, 0),
               DegenerateGeometry);
}

TEST(AssociationConfig, Validation) {
  AssociationConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.cluster_min_pts = 1;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = AssociationConfig();
  c.gate_gamma = 0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
}

}  // namespace
}  // namespace cslam
