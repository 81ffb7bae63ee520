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

#include "cslam/geometry.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cslam {
namespace {

void CheckFinite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

}  // namespace

double NormalizeAngle(double angle) {
  CheckFinite(angle, "angle");
  double wrapped = std::remainder(angle, kTwoPi);
  if (wrapped >= kPi) wrapped -= kTwoPi;
  if (wrapped < -kPi) wrapped += kTwoPi;
  return wrapped;
}

double NormalizePositiveAngle(double angle) {
  CheckFinite(angle, "angle");
  double wrapped = std::fmod(angle, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  // fmod of a tiny negative number plus 2pi can round up to exactly 2pi.
  if (wrapped >= kTwoPi) wrapped -= kTwoPi;
  return wrapped;
}

Mat2 RotationMatrix(double angle) {
  CheckFinite(angle, "rotation angle");
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat2 rotation;
  rotation << c, -s, s, c;
  return rotation;
}

Mat2 RotationMatrixDerivative(double angle) {
  CheckFinite(angle, "rotation angle");
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat2 derivative;
  derivative << -s, -c, c, -s;
  return derivative;
}

RobotPose::RobotPose(const Vec2& position_in, double heading_in)
    : position(position_in), heading(NormalizeAngle(heading_in)) {}

Vec2 LocalToGlobal(const Vec2& local, const RobotPose& pose) {
  return RotationMatrix(pose.heading) * local + pose.position;
}

Vec2 GlobalToLocal(const Vec2& global, const RobotPose& pose) {
  return RotationMatrix(pose.heading).transpose() * (global - pose.position);
}

}  // namespace cslam
