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

#ifndef CSLAM_LANDMARK_H_
#define CSLAM_LANDMARK_H_

#include <vector>

#include "Eigen/Core"
#include "cslam/geometry.h"
#include "cslam/gp_contour.h"

namespace cslam {

// A mapped star-convex object: center plus GP radial contour.
struct Landmark {
  int id = 0;
  Vec2 center = Vec2::Zero();
  ContourState contour;
  int hits = 0;
};

// Pointwise confidence band of the radial function.
struct ContourBand {
  Eigen::VectorXd angles;
  Eigen::VectorXd mean_radius;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

// Offsets below this are treated as coinciding with the center.
inline constexpr double kDegenerateRadius = 1e-9;

// Angle in [0, 2pi) of (T z_local + position - center).
// Throws DegenerateGeometry when the point coincides with the center.
double MeasurementAngle(const Vec2& local, const RobotPose& pose,
                        const Vec2& center);

// ||T z_local + position - center||.
double RadialDistance(const Vec2& local, const RobotPose& pose,
                      const Vec2& center);

// Radial coordinates of one scan point relative to a landmark together with
// the GP marginal at that angle.
struct RadialQuery {
  double angle = 0.0;
  double radius = 0.0;
  RadiusPrediction prediction;
};

RadialQuery QueryRadial(const Landmark& landmark, const Vec2& local,
                        const RobotPose& pose, const ContourModel& model);

// N(r; mu, sigma^2 + extra_variance) for the point `local`.
double Likelihood(const Landmark& landmark, const Vec2& local,
                  const RobotPose& pose, const ContourModel& model,
                  double extra_variance = 0.0);

// Gaussian density helper shared by Likelihood and association.
double GaussianDensity(double x, double mean, double variance);

// Accept iff (r - mu)^2 / variance < gamma. Throws std::invalid_argument for
// variance <= 0 or gamma <= 0.
bool Gate(double radius, double mean, double variance, double gamma);

// `samples` uniformly spaced angles; band = mu +- z_c sigma, lower clamped at
// zero. Requires samples >= 8 and confidence in (0, 1).
ContourBand ComputeContourBand(const Landmark& landmark, int samples,
                               double confidence, const ContourModel& model);

// Polar area 0.5 * integral max(mu, 0)^2 on `samples` angles (>= 16).
double ContourArea(const Landmark& landmark, int samples,
                   const ContourModel& model);

// Mean contour as a closed polygon in world coordinates, radii clamped at 0.
std::vector<Vec2> ContourPolygon(const Landmark& landmark, int samples,
                                 const ContourModel& model);

}  // namespace cslam

#endif  // CSLAM_LANDMARK_H_
