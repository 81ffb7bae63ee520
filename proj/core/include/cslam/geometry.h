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

#ifndef CSLAM_GEOMETRY_H_
#define CSLAM_GEOMETRY_H_

#include <cmath>
#include <numbers>

#include "Eigen/Core"

namespace cslam {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wraps `angle` into [-pi, pi). Throws std::invalid_argument if not finite.
double NormalizeAngle(double angle);

// Wraps `angle` into [0, 2pi).
double NormalizePositiveAngle(double angle);

// [[cos, -sin], [sin, cos]]. Throws std::invalid_argument if not finite.
Mat2 RotationMatrix(double angle);

// d/dangle of RotationMatrix(angle).
Mat2 RotationMatrixDerivative(double angle);

class Rotation2 {
 public:
  explicit Rotation2(double angle) : angle_(angle) {}

  double angle() const { return angle_; }
  Mat2 matrix() const { return RotationMatrix(angle_); }
  Rotation2 operator*(const Rotation2& other) const {
    return Rotation2(angle_ + other.angle_);
  }
  Vec2 operator*(const Vec2& v) const { return matrix() * v; }
  Rotation2 inverse() const { return Rotation2(-angle_); }

 private:
  double angle_;
};

// Planar robot pose. The heading is kept in [-pi, pi) by the constructor;
// filter code writes raw state entries and renormalizes after each update.
struct RobotPose {
  RobotPose() = default;
  RobotPose(const Vec2& position, double heading);
  RobotPose(double x, double y, double heading)
      : RobotPose(Vec2(x, y), heading) {}

  Vec2 position = Vec2::Zero();
  double heading = 0.0;

  Rotation2 rotation() const { return Rotation2(heading); }
};

// T(phi) * z_local + position.
Vec2 LocalToGlobal(const Vec2& local, const RobotPose& pose);

// T(phi)^T * (z_global - position).
Vec2 GlobalToLocal(const Vec2& global, const RobotPose& pose);

// Unit direction (cos, sin).
inline Vec2 Direction(double angle) {
  return Vec2(std::cos(angle), std::sin(angle));
}

}  // namespace cslam

#endif  // CSLAM_GEOMETRY_H_
