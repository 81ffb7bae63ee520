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

#include "cslam/landmark.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cslam/errors.h"
#include "cslam/quantiles.h"

namespace cslam {
namespace {

Vec2 CenterOffset(const Vec2& local, const RobotPose& pose,
                  const Vec2& center) {
  return LocalToGlobal(local, pose) - center;
}

Eigen::VectorXd UniformAngles(int samples) {
  Eigen::VectorXd angles(samples);
  for (int i = 0; i < samples; ++i) {
    angles[i] = kTwoPi * i / samples;
  }
  return angles;
}

}  // namespace

double MeasurementAngle(const Vec2& local, const RobotPose& pose,
                        const Vec2& center) {
  const Vec2 offset = CenterOffset(local, pose, center);
  if (offset.norm() < kDegenerateRadius) {
    throw DegenerateGeometry("measurement coincides with landmark center");
  }
  return NormalizePositiveAngle(std::atan2(offset.y(), offset.x()));
}

double RadialDistance(const Vec2& local, const RobotPose& pose,
                      const Vec2& center) {
  return CenterOffset(local, pose, center).norm();
}

RadialQuery QueryRadial(const Landmark& landmark, const Vec2& local,
                        const RobotPose& pose, const ContourModel& model) {
  RadialQuery query;
  query.angle = MeasurementAngle(local, pose, landmark.center);
  query.radius = RadialDistance(local, pose, landmark.center);
  query.prediction = model.PredictRadius(query.angle, landmark.contour);
  return query;
}

double GaussianDensity(double x, double mean, double variance) {
  const double v = std::max(variance, 1e-300);
  const double d = x - mean;
  return std::exp(-0.5 * d * d / v) / std::sqrt(kTwoPi * v);
}

double Likelihood(const Landmark& landmark, const Vec2& local,
                  const RobotPose& pose, const ContourModel& model,
                  double extra_variance) {
  const RadialQuery query = QueryRadial(landmark, local, pose, model);
  return GaussianDensity(query.radius, query.prediction.mean,
                         query.prediction.variance + extra_variance);
}

bool Gate(double radius, double mean, double variance, double gamma) {
  if (!(variance > 0.0)) {
    throw std::invalid_argument("gate variance must be positive");
  }
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("gate threshold must be positive");
  }
  const double d = radius - mean;
  return d * d / variance < gamma;
}

ContourBand ComputeContourBand(const Landmark& landmark, int samples,
                               double confidence, const ContourModel& model) {
  if (samples < 8) throw std::invalid_argument("band needs >= 8 samples");
  const double z = TwoSidedNormalMultiplier(confidence);
  ContourBand band;
  band.angles = UniformAngles(samples);
  band.mean_radius.resize(samples);
  band.lower.resize(samples);
  band.upper.resize(samples);
  for (int i = 0; i < samples; ++i) {
    const RadiusPrediction p =
        model.PredictRadius(band.angles[i], landmark.contour);
    const double half = z * std::sqrt(p.variance);
    band.mean_radius[i] = p.mean;
    band.lower[i] = std::max(p.mean - half, 0.0);
    band.upper[i] = p.mean + half;
  }
  return band;
}

double ContourArea(const Landmark& landmark, int samples,
                   const ContourModel& model) {
  if (samples < 16) throw std::invalid_argument("area needs >= 16 samples");
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double r = std::max(
        model.PredictRadius(kTwoPi * i / samples, landmark.contour).mean, 0.0);
    sum += r * r;
  }
  return 0.5 * sum * kTwoPi / samples;
}

std::vector<Vec2> ContourPolygon(const Landmark& landmark, int samples,
                                 const ContourModel& model) {
  std::vector<Vec2> polygon;
  polygon.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double angle = kTwoPi * i / samples;
    const Eigen::RowVectorXd row = model.MeasurementModel(angle).row;
    const double r = std::max(row.dot(landmark.contour.mean), 0.0);
    polygon.push_back(landmark.center + r * Direction(angle));
  }
  return polygon;
}

}  // namespace cslam
