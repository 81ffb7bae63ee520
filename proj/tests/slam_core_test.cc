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

#include "cslam/slam_core.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

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

Landmark CircleLandmark(const ContourModel& model, int id, const Vec2& center,
                        double radius, double var = 1e-4) {
  Landmark lm;
  lm.id = id;
  lm.center = center;
  lm.hits = 1;
  lm.contour.mean = Eigen::VectorXd::Constant(model.size(), radius);
  lm.contour.cov = var * Eigen::MatrixXd::Identity(model.size(), model.size());
  return lm;
}

NoiseConfig SmallNoise() {
  NoiseConfig noise;
  noise.pose_process = Eigen::Vector3d(1e-4, 2e-4, 3e-5).asDiagonal();
  noise.center_process = 1e-5 * Mat2::Identity();
  noise.measurement = 9e-4 * Mat2::Identity();
  return noise;
}

// Random state with `count` landmarks whose contours hover around 1 m.
SlamState RandomState(const ContourModel& model, int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-5, 5);
  std::normal_distribution<double> g(0, 1);
  SlamState s = SlamState::Create(RobotPose(u(rng), u(rng), u(rng)),
                                  0.01 * Eigen::Matrix3d::Identity(), model.size());
  for (int i = 0; i < count; ++i) {
    Landmark lm = CircleLandmark(model, i, Vec2(u(rng), u(rng)), 1.0);
    for (int k = 0; k < model.size(); ++k) lm.contour.mean[k] += 0.2 * g(rng);
    s = Augment(s, lm, 0.01 * Mat2::Identity(), model);
  }
  return s;
}

// Local point whose world image sits at `radius` and `angle` from landmark i.
Vec2 PointAround(const SlamState& s, int i, double angle, double radius) {
  const Vec2 world = s.mean.segment<2>(s.OffsetOf(i)) + radius * Direction(angle);
  return GlobalToLocal(world, s.pose());
}

TEST(Predict, ZeroIsIdentityAndShiftsPose) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  std::mt19937_64 rng(1);
  const SlamState s = RandomState(model, 2, rng);
  const SlamState same = Predict(s, Eigen::Vector3d::Zero(), NoiseConfig(), model);
  EXPECT_EQ(same.mean, s.mean);
  EXPECT_EQ(same.cov, s.cov);
  const SlamState moved = Predict(s, Eigen::Vector3d(1, 0, 0), NoiseConfig(), model);
  EXPECT_DOUBLE_EQ(moved.mean[0], s.mean[0] + 1.0);
  EXPECT_EQ(moved.mean.tail(s.dimension() - 3), s.mean.tail(s.dimension() - 3));
}

TEST(Predict, TraceAdditivity) {
  GpHyperparams h = Defaults();
  h.forgetting = 0.01;
  const ContourModel model(BasisGrid(kBasis), h);
  std::mt19937_64 rng(2);
  const SlamState s = RandomState(model, 3, rng);
  const NoiseConfig noise = SmallNoise();
  const SlamState p = Predict(s, Eigen::Vector3d(0.1, -0.2, 0.05), noise, model);
  const double expected = noise.pose_process.trace() +
                          3 * (noise.center_process.trace() + model.ProcessNoise().trace());
  EXPECT_NEAR(p.cov.trace() - s.cov.trace(), expected, 1e-12);
}

TEST(Predict, WrapsHeading) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  SlamState s = SlamState::Create(RobotPose(0, 0, 3.0), Eigen::Matrix3d::Zero(), kBasis);
  s = Predict(s, Eigen::Vector3d(0, 0, 0.5), NoiseConfig(), model);
  EXPECT_NEAR(s.mean[2], 3.5 - kTwoPi, 1e-15);
}

TEST(MeasurementFunction, ConstantContourAtOrigin) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  SlamState s = SlamState::Create(RobotPose(), Eigen::Matrix3d::Zero(), kBasis);
  s = Augment(s, CircleLandmark(model, 0, Vec2::Zero(), 1.7), Mat2::Identity(), model);
  EXPECT_LT((MeasurementFunction(s.mean, 0, 0.0, model) - Vec2(1.7, 0)).norm(), 1e-8);
  s.mean[2] = kPi / 2;
  // T^T rotates by -pi/2: world (1.7, 0) appears at (0, -1.7) locally.
  EXPECT_LT((MeasurementFunction(s.mean, 0, 0.0, model) - Vec2(0, -1.7)).norm(), 1e-8);
}

TEST(MeasurementFunction, CompositionOracle) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, kTwoPi);
  for (int trial = 0; trial < 20; ++trial) {
    const SlamState s = RandomState(model, 2, rng);
    const double angle = u(rng);
    const int off = s.OffsetOf(1);
    const double r = model.MeasurementModel(angle).row.dot(s.mean.segment(off + 2, kBasis));
    const Vec2 world = s.mean.segment<2>(off) + r * Vec2(std::cos(angle), std::sin(angle));
    const double c = std::cos(s.mean[2]), sn = std::sin(s.mean[2]);
    const Vec2 d = world - s.mean.head<2>();
    const Vec2 expected(c * d.x() + sn * d.y(), -sn * d.x() + c * d.y());
    EXPECT_LT((MeasurementFunction(s.mean, 1, angle, model) - expected).norm(), 1e-12);
  }
}

TEST(MeasurementNoise, Examples) {
  Mat2 rxy;
  rxy << 0.02, 0.005, 0.005, 0.03;
  EXPECT_EQ(MeasurementNoise(1.0, 0.4, 0.0, rxy), rxy);
  Mat2 expected = rxy;
  expected(0, 0) += 0.7;
  EXPECT_LT((MeasurementNoise(0.0, 0.0, 0.7, rxy) - expected).cwiseAbs().maxCoeff(), 1e-15);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int i = 0; i < 50; ++i) {
    const double theta = u(rng), phi = u(rng), rf = std::fabs(u(rng));
    Eigen::Matrix2d t;
    t << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    const Eigen::Vector2d p(std::cos(theta), std::sin(theta));
    const Mat2 oracle = t.transpose() * p * rf * p.transpose() * t + rxy;
    const Mat2 m = MeasurementNoise(theta, phi, rf, rxy);
    EXPECT_LT((m - oracle).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Mat2>(m).eigenvalues().minCoeff(),
              Eigen::SelfAdjointEigenSolver<Mat2>(rxy).eigenvalues().minCoeff() - 1e-14);
  }
  EXPECT_THROW(MeasurementNoise(0, 0, -1.0, rxy), std::invalid_argument);
}

// Central differences of h(x) = MeasurementFunctionAtPoint with the angle
// recomputed from the perturbed state.
Eigen::MatrixXd FiniteDifferenceJacobian(const SlamState& s, int index,
                                         const Vec2& local, const ContourModel& model,
                                         double step) {
  Eigen::MatrixXd fd = Eigen::MatrixXd::Zero(2, s.dimension());
  for (int k = 0; k < s.dimension(); ++k) {
    Eigen::VectorXd plus = s.mean, minus = s.mean;
    plus[k] += step;
    minus[k] -= step;
    fd.col(k) = (MeasurementFunctionAtPoint(plus, index, local, model) -
                 MeasurementFunctionAtPoint(minus, index, local, model)) /
                (2 * step);
  }
  return fd;
}

double BlockRelativeError(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& fd) {
  const double scale = std::max(fd.cwiseAbs().maxCoeff(), 1e-12);
  return (analytic - fd).cwiseAbs().maxCoeff() / scale;
}

TEST(Jacobian, MatchesCentralDifferences) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(0, kTwoPi), radius(0.4, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const SlamState s = RandomState(model, 2, rng);
    const int index = trial % 2;
    const Vec2 local = PointAround(s, index, angle(rng), radius(rng));
    const Eigen::MatrixXd analytic =
        Jacobian(s.mean, index, local, model).ToDense(s.dimension(), s.OffsetOf(index));
    const Eigen::MatrixXd fd = FiniteDifferenceJacobian(s, index, local, model, 1e-6);
    const int off = s.OffsetOf(index);
    worst = std::max({worst, BlockRelativeError(analytic.leftCols(3), fd.leftCols(3)),
                      BlockRelativeError(analytic.middleCols(off, 2), fd.middleCols(off, 2)),
                      BlockRelativeError(analytic.middleCols(off + 2, kBasis),
                                         fd.middleCols(off + 2, kBasis))});
    // Other landmark blocks are structurally zero.
    const int other = s.OffsetOf(1 - index);
    EXPECT_TRUE(analytic.middleCols(other, 2 + kBasis).isZero());
    EXPECT_LT(fd.middleCols(other, 2 + kBasis).cwiseAbs().maxCoeff(), 1e-9);
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(Jacobian, LinearBlocks) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  std::mt19937_64 rng(6);
  const SlamState s = RandomState(model, 1, rng);
  const Vec2 local = PointAround(s, 0, 2.2, 1.1);
  const MeasurementJacobian j = Jacobian(s.mean, 0, local, model);
  EXPECT_EQ(j.pose.leftCols<2>(), -j.center);
  const double theta = MeasurementAngle(local, s.pose(), s.mean.segment<2>(3));
  const Eigen::MatrixXd expected = RotationMatrix(s.mean[2]).transpose() *
                                   Direction(theta) * model.MeasurementModel(theta).row;
  EXPECT_LT((j.contour - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Jacobian, DegenerateGeometry) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  std::mt19937_64 rng(7);
  const SlamState s = RandomState(model, 1, rng);
  const Vec2 at_center = GlobalToLocal(s.mean.segment<2>(3), s.pose());
  EXPECT_THROW(Jacobian(s.mean, 0, at_center, model), DegenerateGeometry);
}

AssociatedScan ScanWithCounts(const SlamState& s, const std::vector<int>& counts) {
  AssociatedScan scan;
  int index = 0;
  for (int i = 0; i < static_cast<int>(counts.size()); ++i) {
    LandmarkMeasurements group;
    group.landmark_index = i;
    for (int k = 0; k < counts[i]; ++k) {
      const double a = 0.4 + 0.3 * k;
      const Vec2 local = PointAround(s, i, a, 1.05);
      group.points.push_back({index++, local, a, 1.05});
    }
    scan.groups.push_back(group);
  }
  return scan;
}

TEST(BuildStackedModel, ShapesAndOrdering) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  const NoiseConfig noise = SmallNoise();
  std::mt19937_64 rng(8);
  const SlamState s = RandomState(model, 2, rng);
  EXPECT_FALSE(BuildStackedModel(s.mean, s, AssociatedScan(), model, noise).has_value());

  const auto one = BuildStackedModel(s.mean, s, ScanWithCounts(s, {1}), model, noise);
  ASSERT_TRUE(one.has_value());
  EXPECT_EQ(one->z.size(), 2);
  EXPECT_EQ(one->jacobian.rows(), 2);
  EXPECT_EQ(one->jacobian.cols(), s.dimension());
  EXPECT_EQ(one->noise.rows(), 2);

  const AssociatedScan scan = ScanWithCounts(s, {2, 3});
  const auto stacked = BuildStackedModel(s.mean, s, scan, model, noise);
  ASSERT_TRUE(stacked.has_value());
  ASSERT_EQ(stacked->z.size(), 10);
  int row = 0;
  for (const auto& group : scan.groups) {
    for (const auto& p : group.points) {
      EXPECT_EQ(stacked->z.segment<2>(row), p.local);
      const Eigen::MatrixXd jac = Jacobian(s.mean, group.landmark_index, p.local, model)
                                      .ToDense(s.dimension(), s.OffsetOf(group.landmark_index));
      EXPECT_EQ(stacked->jacobian.middleRows(row, 2), jac);
      EXPECT_LT((stacked->h.segment<2>(row) -
                 MeasurementFunctionAtPoint(s.mean, group.landmark_index, p.local, model))
                    .norm(),
                1e-14);
      row += 2;
    }
  }
  // Block-diagonal noise.
  Eigen::MatrixXd off = stacked->noise;
  for (int r = 0; r < 10; r += 2) off.block<2, 2>(r, r).setZero();
  EXPECT_TRUE(off.isZero());
  ASSERT_EQ(stacked->groups.size(), 2u);
  EXPECT_EQ(std::get<0>(stacked->groups[1]), 4);
  EXPECT_EQ(std::get<1>(stacked->groups[1]), 6);
}

struct LinearProblem {
  Eigen::VectorXd x;
  Eigen::MatrixXd p;
  Eigen::MatrixXd h;
  Eigen::MatrixXd r;
  Eigen::VectorXd z;
};

LinearProblem RandomLinearProblem(std::mt19937_64& rng, int dim, int rows) {
  std::normal_distribution<double> g(0, 1);
  auto random = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = g(rng);
    return m;
  };
  LinearProblem lp;
  lp.x = random(dim, 1);
  const Eigen::MatrixXd a = random(dim, dim);
  lp.p = a * a.transpose() / dim + 0.1 * Eigen::MatrixXd::Identity(dim, dim);
  lp.h = random(rows, dim);
  const Eigen::MatrixXd b = random(rows, rows);
  lp.r = b * b.transpose() / rows + 0.05 * Eigen::MatrixXd::Identity(rows, rows);
  lp.z = random(rows, 1);
  return lp;
}

TEST(IteratedKalmanUpdate, LinearModelEqualsKalman) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const LinearProblem lp = RandomLinearProblem(rng, 12, 6);
    const Eigen::MatrixXd s = lp.h * lp.p * lp.h.transpose() + lp.r;
    const Eigen::MatrixXd k = lp.p * lp.h.transpose() * s.inverse();
    const Eigen::VectorXd mean = lp.x + k * (lp.z - lp.h * lp.x);
    const Eigen::MatrixXd cov = lp.p - k * lp.h * lp.p;
    // Joseph form as an independent covariance oracle.
    const Eigen::MatrixXd ikh = Eigen::MatrixXd::Identity(12, 12) - k * lp.h;
    const Eigen::MatrixXd joseph = ikh * lp.p * ikh.transpose() + k * lp.r * k.transpose();
    const LinearizeFn lin = [&](const Eigen::VectorXd& x) {
      return Linearization{lp.h * x, lp.h, lp.r, {}};
    };
    for (int max_iter : {1, 2, 5, 10}) {
      const IekfResult res = IteratedKalmanUpdate(lp.x, lp.p, lp.z, lin, {max_iter, 1e-6});
      EXPECT_LT((res.mean - mean).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LT((res.cov - cov).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LT((res.cov - joseph).cwiseAbs().maxCoeff() / joseph.cwiseAbs().maxCoeff(), 1e-6);
      EXPECT_LE(res.iterations, 2);
      EXPECT_EQ(res.cov, res.cov.transpose());
    }
  }
}

TEST(IteratedKalmanUpdate, SupportMatchesDense) {
  std::mt19937_64 rng(10);
  LinearProblem lp = RandomLinearProblem(rng, 9, 4);
  lp.h.block(0, 5, 2, 4).setZero();
  lp.h.block(2, 3, 2, 2).setZero();
  const LinearizeFn dense = [&](const Eigen::VectorXd& x) {
    return Linearization{lp.h * x, lp.h, lp.r, {}};
  };
  const LinearizeFn sparse = [&](const Eigen::VectorXd& x) {
    return Linearization{lp.h * x, lp.h, lp.r,
                         {{0, 2, {{0, 5}}}, {2, 2, {{0, 3}, {5, 4}}}}};
  };
  const IekfResult a = IteratedKalmanUpdate(lp.x, lp.p, lp.z, dense, {});
  const IekfResult b = IteratedKalmanUpdate(lp.x, lp.p, lp.z, sparse, {});
  EXPECT_LT((a.mean - b.mean).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((a.cov - b.cov).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(IteratedKalmanUpdate, FailsOnIndefiniteInnovation) {
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(2, 2);
  const LinearizeFn lin = [](const Eigen::VectorXd&) {
    return Linearization{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 2),
                         -Eigen::MatrixXd::Identity(1, 1), {}};
  };
  EXPECT_THROW(IteratedKalmanUpdate(x, p, Eigen::VectorXd::Zero(1), lin, {}), NumericalFailure);
  EXPECT_THROW(IteratedKalmanUpdate(x, p, Eigen::VectorXd::Zero(1), lin, {0, 1e-6}),
               std::invalid_argument);
}

TEST(IekfUpdate, SingleIterationIsEkf) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  const NoiseConfig noise = SmallNoise();
  std::mt19937_64 rng(11);
  const SlamState s = RandomState(model, 2, rng);
  const AssociatedScan scan = ScanWithCounts(s, {4, 3});
  const auto lin = BuildStackedModel(s.mean, s, scan, model, noise);
  const Eigen::MatrixXd& h = lin->jacobian;
  const Eigen::MatrixXd sm = h * s.cov * h.transpose() + lin->noise;
  const Eigen::MatrixXd k = s.cov * h.transpose() * sm.inverse();
  Eigen::VectorXd mean = s.mean + k * (lin->z - lin->h);
  mean[2] = NormalizeAngle(mean[2]);
  const Eigen::MatrixXd cov = s.cov - k * h * s.cov;
  const SlamState out = IekfUpdate(s, scan, model, noise, {1, 1e-6});
  EXPECT_LT((out.mean - mean).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((out.cov - cov).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(IekfUpdate, EmptyScanLeavesStateUntouched) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  std::mt19937_64 rng(12);
  const SlamState s = RandomState(model, 1, rng);
  int iterations = -1;
  const SlamState out = IekfUpdate(s, AssociatedScan(), model, SmallNoise(), {}, &iterations);
  EXPECT_EQ(out.mean, s.mean);
  EXPECT_EQ(out.cov, s.cov);
  EXPECT_EQ(iterations, 0);
}

// Circle of radius 1 at the origin, robot 3 m away; scan of the visible arc.
std::vector<Vec2> CircleScan(const RobotPose& truth, double noise_std, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0, noise_std);
  std::vector<Vec2> out;
  const Vec2 to_center = -truth.position;
  const double base = std::atan2(to_center.y(), to_center.x());
  for (double a = -0.25; a <= 0.25; a += 0.05) {
    const Vec2 dir = Direction(base + a);
    // Ray-circle intersection.
    const double b = truth.position.dot(dir);
    const double c = truth.position.squaredNorm() - 1.0;
    const double disc = b * b - c;
    if (disc < 0) continue;
    const Vec2 hit = truth.position + (-b - std::sqrt(disc)) * dir +
                     Vec2(g(rng), g(rng));
    out.push_back(GlobalToLocal(hit, truth));
  }
  return out;
}

AssociatedScan AssociateAll(const std::vector<Vec2>& points, const SlamState& s) {
  AssociatedScan scan;
  LandmarkMeasurements group;
  group.landmark_index = 0;
  for (int j = 0; j < static_cast<int>(points.size()); ++j) {
    const double a = MeasurementAngle(points[j], s.pose(), s.mean.segment<2>(3));
    group.points.push_back({j, points[j], a, 0.0});
  }
  scan.groups.push_back(group);
  return scan;
}

TEST(IekfUpdate, ReducesPoseErrorOnCircleLandmark) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  NoiseConfig noise = SmallNoise();
  noise.measurement = 1e-4 * Mat2::Identity();
  int improved = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::normal_distribution<double> g(0, 1);
    const RobotPose truth(-3.0, 0.2, 0.1);
    // A circle is rotation symmetric: only with a well-known heading does the
    // scan pin down both position components.
    const Eigen::Vector3d prior_sd(0.05, 0.05, 1e-4);
    const RobotPose prior(truth.position.x() + prior_sd[0] * g(rng),
                          truth.position.y() + prior_sd[1] * g(rng),
                          truth.heading + prior_sd[2] * g(rng));
    SlamState s = SlamState::Create(prior, prior_sd.array().square().matrix().asDiagonal(),
                                    kBasis);
    s = Augment(s, CircleLandmark(model, 0, Vec2::Zero(), 1.0, 1e-6), 1e-6 * Mat2::Identity(),
                model);
    const std::vector<Vec2> points = CircleScan(truth, 0.01, rng);
    const SlamState out = IekfUpdate(s, AssociateAll(points, s), model, noise, {});
    const double before = (prior.position - truth.position).norm();
    const double after = (out.pose().position - truth.position).norm();
    improved += after < before;
  }
  EXPECT_GE(improved, 95);
}

TEST(IekfUpdate, PoseErrorNonIncreasingWithoutNoise) {
  GpHyperparams h = Defaults();
  h.meas_noise = 0.0;
  const ContourModel model(BasisGrid(kBasis), h);
  NoiseConfig noise;
  noise.measurement = 1e-10 * Mat2::Identity();
  const RobotPose truth(-3.0, 0.0, 0.0);
  SlamState s = SlamState::Create(RobotPose(-3.02, 0.015, 0.0),
                                  Eigen::Vector3d(1e-3, 1e-3, 1e-10).asDiagonal(), kBasis);
  s = Augment(s, CircleLandmark(model, 0, Vec2::Zero(), 1.0, 1e-8), 1e-8 * Mat2::Identity(),
              model);
  std::mt19937_64 rng(13);
  const std::vector<Vec2> points = CircleScan(truth, 0.0, rng);
  const double initial = (s.pose().position - truth.position).norm();
  double last = initial;
  for (int k = 0; k < 10; ++k) {
    s = Predict(s, Eigen::Vector3d::Zero(), noise, model);
    s = IekfUpdate(s, AssociateAll(points, s), model, noise, {});
    const double err = (s.pose().position - truth.position).norm();
    EXPECT_LE(err, last + 1e-12) << "update " << k;
    last = err;
  }
  EXPECT_LT(last, initial);
}

TEST(IekfUpdate, InvariantToLandmarkOrder) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  const NoiseConfig noise = SmallNoise();
  std::mt19937_64 rng(14);
  const SlamState s = RandomState(model, 2, rng);
  const AssociatedScan scan = ScanWithCounts(s, {3, 4});

  // Same state with the two landmark blocks swapped.
  const int b = s.block_size();
  SlamState t = SlamState::Create(s.pose(), s.cov.topLeftCorner<3, 3>(), kBasis);
  t.mean = s.mean;
  t.cov = s.cov;
  Eigen::VectorXi perm(s.dimension());
  for (int i = 0; i < 3; ++i) perm[i] = i;
  for (int i = 0; i < b; ++i) {
    perm[3 + i] = 3 + b + i;
    perm[3 + b + i] = 3 + i;
  }
  for (int i = 0; i < s.dimension(); ++i) {
    t.mean[i] = s.mean[perm[i]];
    for (int j = 0; j < s.dimension(); ++j) t.cov(i, j) = s.cov(perm[i], perm[j]);
  }
  t.landmarks = {{1, 3, 1}, {0, 3 + b, 1}};
  AssociatedScan swapped;
  swapped.groups = {scan.groups[1], scan.groups[0]};
  swapped.groups[0].landmark_index = 0;
  swapped.groups[1].landmark_index = 1;

  const SlamState a = IekfUpdate(s, scan, model, noise, {});
  const SlamState c = IekfUpdate(t, swapped, model, noise, {});
  for (int i = 0; i < s.dimension(); ++i) {
    EXPECT_NEAR(c.mean[i], a.mean[perm[i]], 1e-9);
    for (int j = 0; j < s.dimension(); j += 7) {
      EXPECT_NEAR(c.cov(i, j), a.cov(perm[i], perm[j]), 1e-9);
    }
  }
}

TEST(Augment, ExtendsBlockDiagonally) {
  const ContourModel model(BasisGrid(kBasis), Defaults());
  SlamState s = SlamState::Create(RobotPose(1, 2, 0.3), 0.01 * Eigen::Matrix3d::Identity(),
                                  kBasis);
  Landmark lm = CircleLandmark(model, 4, Vec2(3, 3), 1.0);
  lm.contour = model.InitContour();
  const SlamState a = Augment(s, lm, 0.05 * Mat2::Identity(), model);
  EXPECT_EQ(a.dimension(), 3 + 2 + kBasis);
  EXPECT_TRUE((a.cov.topLeftCorner<3, 3>() == s.cov));
  EXPECT_TRUE(a.cov.block(0, 3, 3, 2 + kBasis).isZero());
  EXPECT_EQ(a.IndexOf(4), 0);
  const SlamState b = Augment(a, CircleLandmark(model, 5, Vec2(0, 0), 0.5), Mat2::Identity(), model);
  EXPECT_EQ(b.cov.topLeftCorner(a.dimension(), a.dimension()), a.cov);
  EXPECT_EQ(b.mean.head(a.dimension()), a.mean);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b.cov).eigenvalues().minCoeff(),
            -1e-12);
  EXPECT_THROW(Augment(b, lm, Mat2::Identity(), model), std::invalid_argument);
  const Landmark back = b.ExtractLandmark(1);
  EXPECT_EQ(back.id, 5);
  EXPECT_TRUE(back.center.isZero());
}

TEST(CheckCovariance, DetectsViolations) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(4, 4);
  EXPECT_TRUE(CheckCovariance(p).ok());
  p(0, 1) = 1e-3;
  EXPECT_FALSE(CheckCovariance(p).ok());
  p(1, 0) = 1e-3;
  EXPECT_TRUE(CheckCovariance(p).ok());
  p(3, 3) = -0.1;
  EXPECT_FALSE(CheckCovariance(p).positive_semidefinite);
  EXPECT_TRUE(CheckCovariance(Eigen::MatrixXd::Zero(3, 3)).ok());
}

TEST(NoiseConfig, Validation) {
  NoiseConfig n = SmallNoise();
  EXPECT_NO_THROW(n.Validate());
  n.measurement(0, 0) = -1.0;
  EXPECT_THROW(n.Validate(), std::invalid_argument);
}

}  // namespace
}  // namespace cslam
