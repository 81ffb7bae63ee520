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

#include "cslam/gp_contour.h"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "Eigen/Cholesky"
#include "cslam/errors.h"
#include "cslam/geometry.h"

namespace cslam {
namespace {

constexpr double kRelativeJitter = 1e-9;

double AngularTerm(double delta, PeriodicKernel kernel) {
  const double s = kernel == PeriodicKernel::kHalfAngle
                       ? std::sin(std::abs(delta) / 2.0)
                       : std::sin(std::abs(delta));
  return s * s;
}

}  // namespace

void GpHyperparams::Validate() const {
  if (!(sigma_f > 0.0) || !std::isfinite(sigma_f)) {
    throw std::invalid_argument("sigma_f must be positive");
  }
  if (!(length_scale > 0.0) || !std::isfinite(length_scale)) {
    throw std::invalid_argument("length_scale must be positive");
  }
  if (!(sigma_r > 0.0) || !std::isfinite(sigma_r)) {
    throw std::invalid_argument("sigma_r must be positive");
  }
  if (!(meas_noise >= 0.0) || !std::isfinite(meas_noise)) {
    throw std::invalid_argument("meas_noise must be non-negative");
  }
  if (!(forgetting >= 0.0 && forgetting <= 1.0)) {
    throw std::invalid_argument("forgetting must lie in [0, 1]");
  }
}

BasisGrid::BasisGrid(int count) {
  if (count < 4) {
    throw std::invalid_argument("basis grid needs at least 4 angles");
  }
  angles_.resize(count);
  for (int i = 0; i < count; ++i) {
    angles_[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(count);
  }
}

double BasisGrid::spacing() const { return kTwoPi / size(); }

double Kernel(double a, double b, const GpHyperparams& hyper) {
  const double l2 = hyper.length_scale * hyper.length_scale;
  return hyper.sigma_f * hyper.sigma_f *
             std::exp(-2.0 * AngularTerm(a - b, hyper.kernel) / l2) +
         hyper.sigma_r * hyper.sigma_r;
}

double KernelDerivative(double a, double b, const GpHyperparams& hyper) {
  const double delta = a - b;
  const double l2 = hyper.length_scale * hyper.length_scale;
  const double envelope = hyper.sigma_f * hyper.sigma_f *
                          std::exp(-2.0 * AngularTerm(delta, hyper.kernel) / l2);
  // d/dd sin^2(|d|/2) = sin(d)/2 and d/dd sin^2(|d|) = sin(2d).
  if (hyper.kernel == PeriodicKernel::kHalfAngle) {
    return -envelope * std::sin(delta) / l2;
  }
  return -envelope * 2.0 * std::sin(2.0 * delta) / l2;
}

Eigen::MatrixXd Gram(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                     const GpHyperparams& hyper) {
  Eigen::MatrixXd gram(a.size(), b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      gram(i, j) = Kernel(a[i], b[j], hyper);
    }
  }
  return gram;
}

ContourModel::ContourModel(BasisGrid grid, const GpHyperparams& hyper)
    : grid_(std::move(grid)), hyper_(hyper) {
  hyper_.Validate();
  jitter_ = kRelativeJitter * hyper_.ZeroLagVariance();
  gram_ = Gram(grid_.angles(), grid_.angles(), hyper_);
  const int n = grid_.size();
  const Eigen::MatrixXd loaded =
      gram_ + jitter_ * Eigen::MatrixXd::Identity(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt(loaded);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("basis Gram matrix is not positive definite");
  }
  gram_inverse_ = llt.solve(Eigen::MatrixXd::Identity(n, n));
  gram_inverse_ = 0.5 * (gram_inverse_ + gram_inverse_.transpose()).eval();
}

Eigen::RowVectorXd ContourModel::CrossCovariance(double angle) const {
  const Eigen::VectorXd& angles = grid_.angles();
  Eigen::RowVectorXd row(angles.size());
  for (Eigen::Index j = 0; j < angles.size(); ++j) {
    row[j] = Kernel(angle, angles[j], hyper_);
  }
  return row;
}

GpMeasurement ContourModel::MeasurementModel(double angle) const {
  const Eigen::RowVectorXd cross = CrossCovariance(angle);
  GpMeasurement out;
  out.row = cross * gram_inverse_;
  out.noise = Kernel(angle, angle, hyper_) + hyper_.meas_noise -
              out.row.dot(cross);
  return out;
}

Eigen::RowVectorXd ContourModel::MeasurementRowDerivative(double angle) const {
  const Eigen::VectorXd& angles = grid_.angles();
  Eigen::RowVectorXd d_cross(angles.size());
  for (Eigen::Index j = 0; j < angles.size(); ++j) {
    d_cross[j] = KernelDerivative(angle, angles[j], hyper_);
  }
  return d_cross * gram_inverse_;
}

RadiusPrediction ContourModel::PredictRadius(double angle,
                                             const ContourState& state) const {
  const Eigen::RowVectorXd cross = CrossCovariance(angle);
  const Eigen::RowVectorXd row = cross * gram_inverse_;
  RadiusPrediction out;
  out.mean = row.dot(state.mean);
  // k(a, a) + H (P - K) H^T with H = K(a, theta) K^-1, regrouped so the prior
  // term cancels exactly when P is the jittered Gram.
  const double variance = Kernel(angle, angle, hyper_) - row.dot(cross) +
                          row * state.cov * row.transpose();
  out.variance = std::max(variance, 0.0);
  return out;
}

ContourState ContourModel::InitContour() const {
  const int n = grid_.size();
  ContourState state;
  state.mean = Eigen::VectorXd::Zero(n);
  state.cov = gram_ + jitter_ * Eigen::MatrixXd::Identity(n, n);
  return state;
}

Eigen::MatrixXd ContourModel::ProcessNoise() const {
  return hyper_.forgetting * gram_;
}

void ContourModel::Condition(double angle, double radius, ContourState& state,
                             double extra_noise) const {
  const GpMeasurement meas = MeasurementModel(angle);
  const Eigen::VectorXd cov_row = state.cov * meas.row.transpose();
  const double innovation_var =
      meas.row.dot(cov_row) + std::max(meas.noise, 0.0) + extra_noise;
  if (!(innovation_var > 0.0)) {
    throw NumericalFailure("radial innovation variance is not positive");
  }
  const Eigen::VectorXd gain = cov_row / innovation_var;
  state.mean += gain * (radius - meas.row.dot(state.mean));
  state.cov -= gain * cov_row.transpose();
  state.cov = 0.5 * (state.cov + state.cov.transpose()).eval();
}

}  // namespace cslam
