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

#ifndef CSLAM_SLAM_CORE_H_
#define CSLAM_SLAM_CORE_H_

#include <functional>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "Eigen/Core"
#include "cslam/geometry.h"
#include "cslam/gp_contour.h"
#include "cslam/landmark.h"

namespace cslam {

inline constexpr int kPoseDim = 3;

struct NoiseConfig {
  Eigen::Matrix3d pose_process = Eigen::Matrix3d::Zero();  // Q^r
  Mat2 center_process = Mat2::Zero();                      // Q^c
  Mat2 measurement = Mat2::Zero();                         // R (Cartesian)

  // Throws std::invalid_argument if any block is not symmetric PSD.
  void Validate() const;
};

struct LandmarkSlot {
  int id = 0;
  int offset = 0;  // index of the center x-coordinate in the state vector
  int hits = 0;
};

// Joint Gaussian over [pose(3) | center(2), contour(N) | ...].
struct SlamState {
  int basis_size = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::vector<LandmarkSlot> landmarks;

  static SlamState Create(const RobotPose& pose,
                          const Eigen::Matrix3d& pose_cov, int basis_size);

  int dimension() const { return static_cast<int>(mean.size()); }
  int landmark_count() const { return static_cast<int>(landmarks.size()); }
  int block_size() const { return 2 + basis_size; }
  int OffsetOf(int index) const { return kPoseDim + index * block_size(); }

  RobotPose pose() const;
  // Index of the landmark with `id`, or -1.
  int IndexOf(int id) const;
  Landmark ExtractLandmark(int index) const;
};

// One scan point assigned to a landmark, with the angle and radius computed
// at association time.
struct AssociatedPoint {
  int scan_index = 0;
  Vec2 local = Vec2::Zero();
  double angle = 0.0;
  double radius = 0.0;
};

struct LandmarkMeasurements {
  int landmark_index = 0;
  std::vector<AssociatedPoint> points;
};

// Groups are kept in increasing landmark index; every scan point appears
// exactly once, either in a group or in `unassociated`.
struct AssociatedScan {
  std::vector<LandmarkMeasurements> groups;
  std::vector<int> unassociated;  // scan indices
  std::vector<Vec2> unassociated_local;

  int associated_count() const;
};

// Adds the odometry increment `u` (world-frame dx, dy, dheading) and the
// block-diagonal process noise; renormalizes the heading.
SlamState Predict(const SlamState& state, const Eigen::Vector3d& u,
                  const NoiseConfig& noise, const ContourModel& model);

// Predicted local-frame point on landmark `landmark_index` at the fixed
// contour angle `angle`:  T^T (c + p(angle) H^f(angle) x^f - x^{r,p}).
Vec2 MeasurementFunction(const Eigen::VectorXd& mean, int landmark_index,
                         double angle, const ContourModel& model);

// Same, with the angle recomputed from the state and the local point.
Vec2 MeasurementFunctionAtPoint(const Eigen::VectorXd& mean,
                                int landmark_index, const Vec2& local,
                                const ContourModel& model);

// T^T p R^f p^T T + R_xy.
Mat2 MeasurementNoise(double angle, double heading, double radial_noise,
                      const Mat2& cartesian_noise);

// Non-zero blocks of dh/dx for one point: pose (x, y, heading), center and
// contour of the owning landmark. The measurement angle is treated as a
// function of the state.
struct MeasurementJacobian {
  Eigen::Matrix<double, 2, 3> pose;
  Eigen::Matrix<double, 2, 2> center;
  Eigen::Matrix<double, 2, Eigen::Dynamic> contour;

  Eigen::MatrixXd ToDense(int dimension, int landmark_offset) const;
};

// Throws DegenerateGeometry when the point maps onto the landmark center.
MeasurementJacobian Jacobian(const Eigen::VectorXd& mean, int landmark_index,
                             const Vec2& local, const ContourModel& model);

// Stacked model for all associated points of one scan, landmark-major.
struct StackedModel {
  Eigen::VectorXd z;
  Eigen::VectorXd h;
  Eigen::MatrixXd jacobian;  // 2m x D
  Eigen::MatrixXd noise;     // 2m x 2m, block diagonal
  // (row_begin, row_count, landmark_offset) per landmark group.
  std::vector<std::tuple<int, int, int>> groups;
};

// Linearizes at `linearization_point` (angles recomputed there). Returns
// nullopt when the scan has no associated points.
std::optional<StackedModel> BuildStackedModel(
    const Eigen::VectorXd& linearization_point, const SlamState& state,
    const AssociatedScan& scan, const ContourModel& model,
    const NoiseConfig& noise);

struct IekfSettings {
  int max_iter = 10;
  double tol = 1e-6;
};

// Output of a linearization callback: h(x), dh/dx and R(x). `support`, when
// non-empty, lists for row block (row_begin, rows) the column ranges
// (col_begin, cols) where the Jacobian can be non-zero.
struct Linearization {
  Eigen::VectorXd h;
  Eigen::MatrixXd jacobian;
  Eigen::MatrixXd noise;
  struct RowSupport {
    int row_begin = 0;
    int rows = 0;
    std::vector<std::pair<int, int>> columns;
  };
  std::vector<RowSupport> support;
};

using LinearizeFn = std::function<Linearization(const Eigen::VectorXd&)>;

struct IekfResult {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  int iterations = 0;
  bool converged = false;
};

// Iterated EKF measurement update:
//   x^{l+1} = x_pred + K^l (z - h(x^l) - H^l (x_pred - x^l)),
// stopping when ||x^{l+1} - x^l|| < tol or after max_iter linearizations.
// Covariance: P - K H P at the last linearization, symmetrized.
// Throws NumericalFailure if the innovation covariance cannot be factored.
IekfResult IteratedKalmanUpdate(const Eigen::VectorXd& prior_mean,
                                const Eigen::MatrixXd& prior_cov,
                                const Eigen::VectorXd& z,
                                const LinearizeFn& linearize,
                                const IekfSettings& settings);

// Correction step of the SLAM filter. A scan without associated points leaves
// the state untouched.
SlamState IekfUpdate(const SlamState& state, const AssociatedScan& scan,
                     const ContourModel& model, const NoiseConfig& noise,
                     const IekfSettings& settings, int* iterations = nullptr);

// Appends a landmark with block-diagonal covariance (center_cov, contour cov)
// and zero cross-covariance. Throws std::invalid_argument on duplicate ids.
SlamState Augment(const SlamState& state, const Landmark& landmark,
                  const Mat2& center_cov, const ContourModel& model);

struct CovarianceHealth {
  double symmetry_error = 0.0;  // max |P - P^T| / max |P|
  bool positive_semidefinite = true;
  bool ok(double tol = 1e-9) const {
    return symmetry_error <= tol && positive_semidefinite;
  }
};

// PSD is tested as P + tol * trace(P) * I admitting a Cholesky factor, i.e.
// min eigenvalue > -tol * trace.
CovarianceHealth CheckCovariance(const Eigen::MatrixXd& cov, double tol = 1e-9);

}  // namespace cslam

#endif  // CSLAM_SLAM_CORE_H_
