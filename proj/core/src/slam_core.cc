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
#include <stdexcept>
#include <string>

#include "Eigen/Cholesky"
#include "Eigen/Eigenvalues"
#include "cslam/errors.h"

namespace cslam {
namespace {

bool IsSymmetricPsd(const Eigen::MatrixXd& m) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff())) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  return eig.eigenvalues().minCoeff() >= -1e-12;
}

// Geometry shared by the measurement function and its Jacobian.
struct PointGeometry {
  Mat2 rotation;
  Mat2 rotation_derivative;
  Vec2 offset;  // u = T z + x^{r,p} - x^{i,c}
  double range = 0.0;
  Vec2 direction;
  double angle = 0.0;
};

PointGeometry ComputeGeometry(const Eigen::VectorXd& mean, int offset,
                              const Vec2& local) {
  PointGeometry g;
  g.rotation = RotationMatrix(mean[2]);
  g.rotation_derivative = RotationMatrixDerivative(mean[2]);
  g.offset = g.rotation * local + mean.head<2>() - mean.segment<2>(offset);
  g.range = g.offset.norm();
  if (g.range < kDegenerateRadius) {
    throw DegenerateGeometry("scan point coincides with landmark center");
  }
  g.direction = g.offset / g.range;
  g.angle = NormalizePositiveAngle(std::atan2(g.offset.y(), g.offset.x()));
  return g;
}

}  // namespace

void NoiseConfig::Validate() const {
  if (!IsSymmetricPsd(pose_process)) {
    throw std::invalid_argument("pose process noise must be symmetric PSD");
  }
  if (!IsSymmetricPsd(center_process)) {
    throw std::invalid_argument("center process noise must be symmetric PSD");
  }
  if (!IsSymmetricPsd(measurement)) {
    throw std::invalid_argument("measurement noise must be symmetric PSD");
  }
}

SlamState SlamState::Create(const RobotPose& pose,
                            const Eigen::Matrix3d& pose_cov, int basis_size) {
  if (basis_size < 4) throw std::invalid_argument("basis_size must be >= 4");
  SlamState state;
  state.basis_size = basis_size;
  state.mean = Eigen::Vector3d(pose.position.x(), pose.position.y(),
                               pose.heading);
  state.cov = pose_cov;
  return state;
}

RobotPose SlamState::pose() const {
  return RobotPose(mean.head<2>(), mean[2]);
}

int SlamState::IndexOf(int id) const {
  for (int i = 0; i < landmark_count(); ++i) {
    if (landmarks[i].id == id) return i;
  }
  return -1;
}

Landmark SlamState::ExtractLandmark(int index) const {
  const LandmarkSlot& slot = landmarks.at(index);
  Landmark lm;
  lm.id = slot.id;
  lm.hits = slot.hits;
  lm.center = mean.segment<2>(slot.offset);
  lm.contour.mean = mean.segment(slot.offset + 2, basis_size);
  lm.contour.cov = cov.block(slot.offset + 2, slot.offset + 2, basis_size,
                             basis_size);
  return lm;
}

int AssociatedScan::associated_count() const {
  int count = 0;
  for (const auto& g : groups) count += static_cast<int>(g.points.size());
  return count;
}

SlamState Predict(const SlamState& state, const Eigen::Vector3d& u,
                  const NoiseConfig& noise, const ContourModel& model) {
  if (!u.allFinite()) throw std::invalid_argument("odometry must be finite");
  SlamState out = state;
  out.mean.head<3>() += u;
  out.mean[2] = NormalizeAngle(out.mean[2]);
  out.cov.topLeftCorner<3, 3>() += noise.pose_process;
  const Eigen::MatrixXd contour_noise = model.ProcessNoise();
  const int n = state.basis_size;
  for (const LandmarkSlot& slot : state.landmarks) {
    out.cov.block<2, 2>(slot.offset, slot.offset) += noise.center_process;
    out.cov.block(slot.offset + 2, slot.offset + 2, n, n) += contour_noise;
  }
  return out;
}

Vec2 MeasurementFunction(const Eigen::VectorXd& mean, int landmark_index,
                         double angle, const ContourModel& model) {
  const int n = model.size();
  const int offset = kPoseDim + landmark_index * (2 + n);
  const Mat2 rotation = RotationMatrix(mean[2]);
  const double radius =
      model.MeasurementModel(angle).row.dot(mean.segment(offset + 2, n));
  return rotation.transpose() * (mean.segment<2>(offset) +
                                 Direction(angle) * radius - mean.head<2>());
}

Vec2 MeasurementFunctionAtPoint(const Eigen::VectorXd& mean,
                                int landmark_index, const Vec2& local,
                                const ContourModel& model) {
  const int offset = kPoseDim + landmark_index * (2 + model.size());
  const PointGeometry g = ComputeGeometry(mean, offset, local);
  return MeasurementFunction(mean, landmark_index, g.angle, model);
}

Mat2 MeasurementNoise(double angle, double heading, double radial_noise,
                      const Mat2& cartesian_noise) {
  if (radial_noise < 0.0) {
    throw std::invalid_argument("radial noise must be non-negative");
  }
  const Vec2 local_dir = RotationMatrix(heading).transpose() * Direction(angle);
  return local_dir * radial_noise * local_dir.transpose() + cartesian_noise;
}

Eigen::MatrixXd MeasurementJacobian::ToDense(int dimension,
                                             int landmark_offset) const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(2, dimension);
  dense.leftCols<3>() = pose;
  dense.block<2, 2>(0, landmark_offset) = center;
  dense.block(0, landmark_offset + 2, 2, contour.cols()) = contour;
  return dense;
}

MeasurementJacobian Jacobian(const Eigen::VectorXd& mean, int landmark_index,
                             const Vec2& local, const ContourModel& model) {
  const int n = model.size();
  const int offset = kPoseDim + landmark_index * (2 + n);
  const PointGeometry g = ComputeGeometry(mean, offset, local);
  const auto contour = mean.segment(offset + 2, n);

  const Eigen::RowVectorXd row = model.MeasurementModel(g.angle).row;
  const double radius = row.dot(contour);
  const double radius_slope =
      model.MeasurementRowDerivative(g.angle).dot(contour);

  const Mat2 rt = g.rotation.transpose();
  const Vec2& p = g.direction;

  // Chain terms with respect to the landmark center.
  const Mat2 dp_dcenter =
      p * p.transpose() / g.range - Mat2::Identity() / g.range;
  const Eigen::RowVector2d dangle_dcenter =
      Eigen::RowVector2d(g.offset.y(), -g.offset.x()) / (g.range * g.range);

  MeasurementJacobian jac;
  jac.center =
      rt * (Mat2::Identity() + dp_dcenter * radius +
            p * radius_slope * dangle_dcenter);
  jac.contour = rt * p * row;

  // The heading enters through T^T and through the world-frame scan point
  // T z; the latter moves opposite to the center.
  const Vec2 dpoint_dheading = g.rotation_derivative * local;
  const Vec2 dp_dheading = dp_dcenter * dpoint_dheading;
  const double dangle_dheading = dangle_dcenter.dot(dpoint_dheading);
  const Vec2 predicted_world = mean.segment<2>(offset) + p * radius -
                               mean.head<2>();

  jac.pose.leftCols<2>() = -jac.center;
  jac.pose.col(2) = g.rotation_derivative.transpose() * predicted_world -
                    rt * (dp_dheading * radius +
                          p * radius_slope * dangle_dheading);
  return jac;
}

std::optional<StackedModel> BuildStackedModel(
    const Eigen::VectorXd& linearization_point, const SlamState& state,
    const AssociatedScan& scan, const ContourModel& model,
    const NoiseConfig& noise) {
  const int m = scan.associated_count();
  if (m == 0) return std::nullopt;
  const int dim = state.dimension();
  const int n = state.basis_size;
  StackedModel out;
  out.z.resize(2 * m);
  out.h.resize(2 * m);
  out.jacobian = Eigen::MatrixXd::Zero(2 * m, dim);
  out.noise = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  const double heading = linearization_point[2];
  int row = 0;
  for (const LandmarkMeasurements& group : scan.groups) {
    if (group.points.empty()) continue;
    if (group.landmark_index < 0 ||
        group.landmark_index >= state.landmark_count()) {
      throw std::invalid_argument("association references unknown landmark");
    }
    const int offset = state.OffsetOf(group.landmark_index);
    const int row_begin = row;
    for (const AssociatedPoint& point : group.points) {
      const PointGeometry g =
          ComputeGeometry(linearization_point, offset, point.local);
      const GpMeasurement gp = model.MeasurementModel(g.angle);
      out.z.segment<2>(row) = point.local;
      out.h.segment<2>(row) = MeasurementFunction(
          linearization_point, group.landmark_index, g.angle, model);
      const MeasurementJacobian jac = Jacobian(
          linearization_point, group.landmark_index, point.local, model);
      out.jacobian.block<2, 3>(row, 0) = jac.pose;
      out.jacobian.block<2, 2>(row, offset) = jac.center;
      out.jacobian.block(row, offset + 2, 2, n) = jac.contour;
      out.noise.block<2, 2>(row, row) = MeasurementNoise(
          g.angle, heading, std::max(gp.noise, 0.0), noise.measurement);
      row += 2;
    }
    out.groups.emplace_back(row_begin, row - row_begin, offset);
  }
  return out;
}

IekfResult IteratedKalmanUpdate(const Eigen::VectorXd& prior_mean,
                                const Eigen::MatrixXd& prior_cov,
                                const Eigen::VectorXd& z,
                                const LinearizeFn& linearize,
                                const IekfSettings& settings) {
  if (settings.max_iter < 1) {
    throw std::invalid_argument("max_iter must be >= 1");
  }
  const Eigen::Index dim = prior_mean.size();
  const Eigen::Index rows = z.size();

  IekfResult result;
  Eigen::VectorXd iterate = prior_mean;
  Eigen::MatrixXd cross;  // P H^T
  Eigen::LLT<Eigen::MatrixXd> innovation;

  for (int iter = 0; iter < settings.max_iter; ++iter) {
    const Linearization lin = linearize(iterate);
    const Eigen::MatrixXd& jac = lin.jacobian;

    Eigen::MatrixXd innovation_cov;
    if (lin.support.empty()) {
      cross = prior_cov * jac.transpose();
      innovation_cov = jac * cross;
    } else {
      cross = Eigen::MatrixXd::Zero(dim, rows);
      innovation_cov = Eigen::MatrixXd::Zero(rows, rows);
      for (const auto& block : lin.support) {
        for (const auto& [col, cols] : block.columns) {
          cross.middleCols(block.row_begin, block.rows).noalias() +=
              prior_cov.middleCols(col, cols) *
              jac.block(block.row_begin, col, block.rows, cols).transpose();
        }
      }
      for (const auto& block : lin.support) {
        for (const auto& [col, cols] : block.columns) {
          innovation_cov.middleRows(block.row_begin, block.rows).noalias() +=
              jac.block(block.row_begin, col, block.rows, cols) *
              cross.middleRows(col, cols);
        }
      }
    }
    innovation_cov += lin.noise;
    innovation_cov = 0.5 * (innovation_cov + innovation_cov.transpose()).eval();

    innovation.compute(innovation_cov);
    if (innovation.info() != Eigen::Success) {
      const double inflation = 1e-9 * std::max(innovation_cov.trace(), 1e-300);
      innovation_cov.diagonal().array() += inflation;
      innovation.compute(innovation_cov);
      if (innovation.info() != Eigen::Success) {
        throw NumericalFailure("innovation covariance is not positive definite");
      }
    }

    const Eigen::VectorXd residual =
        z - lin.h - jac * (prior_mean - iterate);
    Eigen::VectorXd next = prior_mean + cross * innovation.solve(residual);
    const double step = (next - iterate).norm();
    iterate = std::move(next);
    result.iterations = iter + 1;
    if (!iterate.allFinite()) {
      throw NumericalFailure("IEKF iterate is not finite");
    }
    if (step < settings.tol) {
      result.converged = true;
      break;
    }
  }

  // P - P H^T S^-1 H P = P - W^T W with W = L^-1 H P.
  const Eigen::MatrixXd whitened =
      innovation.matrixL().solve(cross.transpose());
  result.cov = prior_cov;
  result.cov.selfadjointView<Eigen::Lower>().rankUpdate(
      whitened.transpose(), -1.0);
  result.cov.triangularView<Eigen::StrictlyUpper>() =
      result.cov.transpose().triangularView<Eigen::StrictlyUpper>();
  result.mean = std::move(iterate);
  return result;
}

SlamState IekfUpdate(const SlamState& state, const AssociatedScan& scan,
                     const ContourModel& model, const NoiseConfig& noise,
                     const IekfSettings& settings, int* iterations) {
  if (iterations != nullptr) *iterations = 0;
  if (scan.associated_count() == 0) return state;

  Eigen::VectorXd z(2 * scan.associated_count());
  int row = 0;
  for (const LandmarkMeasurements& group : scan.groups) {
    for (const AssociatedPoint& point : group.points) {
      z.segment<2>(row) = point.local;
      row += 2;
    }
  }
  const LinearizeFn linearize = [&](const Eigen::VectorXd& x) {
    std::optional<StackedModel> stacked =
        BuildStackedModel(x, state, scan, model, noise);
    Linearization lin;
    lin.h = std::move(stacked->h);
    lin.jacobian = std::move(stacked->jacobian);
    lin.noise = std::move(stacked->noise);
    for (const auto& [row_begin, rows, offset] : stacked->groups) {
      lin.support.push_back(
          {row_begin, rows, {{0, kPoseDim}, {offset, state.block_size()}}});
    }
    return lin;
  };
  const IekfResult result =
      IteratedKalmanUpdate(state.mean, state.cov, z, linearize, settings);
  SlamState out = state;
  out.mean = result.mean;
  out.mean[2] = NormalizeAngle(out.mean[2]);
  out.cov = result.cov;
  if (iterations != nullptr) *iterations = result.iterations;
  return out;
}

SlamState Augment(const SlamState& state, const Landmark& landmark,
                  const Mat2& center_cov, const ContourModel& model) {
  if (state.IndexOf(landmark.id) >= 0) {
    throw std::invalid_argument("duplicate landmark id " +
                                std::to_string(landmark.id));
  }
  const int n = model.size();
  if (state.basis_size != n || landmark.contour.mean.size() != n ||
      landmark.contour.cov.rows() != n || landmark.contour.cov.cols() != n) {
    throw std::invalid_argument("landmark contour does not match basis size");
  }
  const int old_dim = state.dimension();
  const int new_dim = old_dim + 2 + n;
  SlamState out;
  out.basis_size = state.basis_size;
  out.landmarks = state.landmarks;
  out.mean.resize(new_dim);
  out.mean.head(old_dim) = state.mean;
  out.mean.segment<2>(old_dim) = landmark.center;
  out.mean.segment(old_dim + 2, n) = landmark.contour.mean;
  out.cov = Eigen::MatrixXd::Zero(new_dim, new_dim);
  out.cov.topLeftCorner(old_dim, old_dim) = state.cov;
  out.cov.block<2, 2>(old_dim, old_dim) = center_cov;
  out.cov.block(old_dim + 2, old_dim + 2, n, n) = landmark.contour.cov;
  out.landmarks.push_back({landmark.id, old_dim, landmark.hits});
  return out;
}

CovarianceHealth CheckCovariance(const Eigen::MatrixXd& cov, double tol) {
  CovarianceHealth health;
  if (cov.size() == 0) return health;
  const double scale = cov.cwiseAbs().maxCoeff();
  health.symmetry_error =
      scale > 0.0 ? (cov - cov.transpose()).cwiseAbs().maxCoeff() / scale : 0.0;
  const double shift = tol * std::max(cov.trace(), 0.0);
  Eigen::MatrixXd shifted = cov;
  shifted.diagonal().array() += shift;
  if (shift == 0.0) {
    // All-zero or zero-trace covariance: PSD only if it is the zero matrix.
    health.positive_semidefinite = scale == 0.0;
    return health;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  health.positive_semidefinite = llt.info() == Eigen::Success;
  return health;
}

}  // namespace cslam
