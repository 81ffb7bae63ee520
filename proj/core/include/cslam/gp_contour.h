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

#ifndef CSLAM_GP_CONTOUR_H_
#define CSLAM_GP_CONTOUR_H_

#include "Eigen/Core"

namespace cslam {

// Which angular distance the periodic kernel uses.
//   kHalfAngle: exp(-2 sin^2(|d| / 2) / l^2), period 2pi.
//   kFullAngle: exp(-2 sin^2(|d|) / l^2), period pi. Correlates opposite
//               sides of the contour perfectly and leaves the Gram matrix of
//               any even uniform grid singular.
enum class PeriodicKernel { kHalfAngle, kFullAngle };

struct GpHyperparams {
  double sigma_f = 0.5;        // radial amplitude std [m]
  double length_scale = 0.1;   // [rad]
  double sigma_r = 0.75;       // mean-radius prior std [m]
  double meas_noise = 0.0;     // scalar radial noise variance R [m^2]
  double forgetting = 0.0;     // Q^f = forgetting * K(theta, theta)
  PeriodicKernel kernel = PeriodicKernel::kHalfAngle;

  // Throws std::invalid_argument on out-of-range values.
  void Validate() const;

  double ZeroLagVariance() const {
    return sigma_f * sigma_f + sigma_r * sigma_r;
  }
};

// N uniformly spaced basis angles theta_i = 2 pi i / N, i = 0..N-1.
class BasisGrid {
 public:
  // Throws std::invalid_argument for count < 4.
  explicit BasisGrid(int count);

  int size() const { return static_cast<int>(angles_.size()); }
  const Eigen::VectorXd& angles() const { return angles_; }
  double spacing() const;

 private:
  Eigen::VectorXd angles_;
};

// Gaussian over the radial function sampled at the basis angles.
struct ContourState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// k(a, b) + sigma_r^2.
double Kernel(double a, double b, const GpHyperparams& hyper);

// d/da Kernel(a, b).
double KernelDerivative(double a, double b, const GpHyperparams& hyper);

// Entry (i, j) = Kernel(a_i, b_j).
Eigen::MatrixXd Gram(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                     const GpHyperparams& hyper);

// Linear-Gaussian observation of the radial function at one angle:
// y = row * x^f + e, e ~ N(0, noise).
struct GpMeasurement {
  Eigen::RowVectorXd row;
  double noise = 0.0;
};

struct RadiusPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

// Recursive GP over a fixed basis grid. Holds the jittered Gram matrix and its
// inverse, both fixed for the lifetime of a run, so per-measurement queries
// cost O(N^2).
class ContourModel {
 public:
  // Throws std::invalid_argument for invalid hyperparameters and
  // NumericalFailure if the jittered Gram matrix is not positive definite.
  ContourModel(BasisGrid grid, const GpHyperparams& hyper);

  const BasisGrid& grid() const { return grid_; }
  const GpHyperparams& hyperparams() const { return hyper_; }
  int size() const { return grid_.size(); }

  // Diagonal loading added to K(theta, theta) before inversion.
  double jitter() const { return jitter_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::MatrixXd& gram_inverse() const { return gram_inverse_; }

  // K(angle, theta) as a row.
  Eigen::RowVectorXd CrossCovariance(double angle) const;

  // H^f(angle) = K(angle, theta) K^-1 and
  // R^f(angle) = k(angle, angle) + R - K(angle, theta) K^-1 K(theta, angle).
  GpMeasurement MeasurementModel(double angle) const;

  // dH^f/dangle.
  Eigen::RowVectorXd MeasurementRowDerivative(double angle) const;

  // Marginal of f(angle) under `state`. Variance clamped at zero.
  RadiusPrediction PredictRadius(double angle, const ContourState& state) const;

  // Zero mean, covariance K(theta, theta) + jitter * I.
  ContourState InitContour() const;

  // forgetting * K(theta, theta).
  Eigen::MatrixXd ProcessNoise() const;

  // Rank-one Kalman update of `state` with a radial observation at `angle`.
  // `extra_noise` is added to R^f(angle).
  void Condition(double angle, double radius, ContourState& state,
                 double extra_noise = 0.0) const;

 private:
  BasisGrid grid_;
  GpHyperparams hyper_;
  double jitter_ = 0.0;
  Eigen::MatrixXd gram_;           // unjittered K(theta, theta)
  Eigen::MatrixXd gram_inverse_;   // (K(theta, theta) + jitter I)^-1
};

}  // namespace cslam

#endif  // CSLAM_GP_CONTOUR_H_
