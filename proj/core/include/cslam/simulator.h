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

#ifndef CSLAM_SIMULATOR_H_
#define CSLAM_SIMULATOR_H_

#include <cstdint>
#include <random>
#include <vector>

#include "Eigen/Core"
#include "cslam/geometry.h"

namespace cslam {

// Radial boundary description r(theta) around an object center, either a
// star-convex polygon or a truncated Fourier series.
class RadialShape {
 public:
  enum class Kind { kPolygon, kFourier };

  // Vertices relative to the center, counter-clockwise.
  static RadialShape Polygon(std::vector<Vec2> vertices);
  static RadialShape RegularPolygon(int sides, double circumradius,
                                    double rotation);
  // r(theta) = mean + sum_k cos_k cos(k theta) + sin_k sin(k theta), k >= 1.
  static RadialShape Fourier(double mean, std::vector<double> cos_terms,
                             std::vector<double> sin_terms);

  Kind kind() const { return kind_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  double mean_radius() const { return mean_; }
  const std::vector<double>& cos_terms() const { return cos_; }
  const std::vector<double>& sin_terms() const { return sin_; }

  double Radius(double angle) const;
  // Upper bound on r(theta), used to skip far objects.
  double MaxRadius() const;

 private:
  Kind kind_ = Kind::kPolygon;
  std::vector<Vec2> vertices_;
  double mean_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

struct WorldObject {
  int id = 0;
  Vec2 center = Vec2::Zero();
  RadialShape shape;

  double Radius(double angle) const { return shape.Radius(angle); }
  bool Contains(const Vec2& world) const;
  // Boundary sampled at `samples` uniform angles around the center.
  std::vector<Vec2> Boundary(int samples) const;
  // Throws InvalidScenario unless r > 0 everywhere and every 1-degree ray from
  // the center crosses the boundary exactly once.
  void Validate() const;
};

struct World {
  std::vector<WorldObject> objects;
};

struct TrajectorySegment {
  enum class Kind { kStraight, kArc };
  Kind kind = Kind::kStraight;
  double length = 0.0;  // straight [m]
  double radius = 0.0;  // arc [m]
  double sweep = 0.0;   // arc [rad], positive turns left
  double speed = 1.0;   // [m/s]

  double Duration() const;
};

struct TrajectorySpec {
  RobotPose initial;
  std::vector<TrajectorySegment> segments;

  double Duration() const;
  // Throws std::invalid_argument for non-positive speeds or radii.
  void Validate() const;
};

// Pose at time t in [0, Duration()]. Throws std::out_of_range otherwise.
RobotPose PoseAt(const TrajectorySpec& trajectory, double t);

struct SensorSpec {
  double angular_resolution = 3.6 * kPi / 180.0;
  double max_range = 15.0;
  double range_noise_std = 0.0;
  Eigen::Matrix3d odom_noise = Eigen::Matrix3d::Zero();
  std::uint64_t seed = 1;

  int BeamCount() const;
  // Throws std::invalid_argument.
  void Validate() const;
};

struct ScanPoint {
  Vec2 local = Vec2::Zero();
  int truth_id = -1;               // for evaluation only
  Vec2 truth_world = Vec2::Zero();  // noiseless hit, for evaluation only
  int beam = 0;
};

struct Scan {
  std::vector<ScanPoint> points;

  std::vector<Vec2> LocalPoints() const;
};

// Nearest hit of the ray (origin, unit direction) with the object boundary,
// or a negative value when there is none.
double IntersectRay(const WorldObject& object, const Vec2& origin,
                    const Vec2& direction);

// One 2D LiDAR sweep. Beam b points at heading + b * resolution. Cartesian
// isotropic noise is drawn in the world frame from a generator keyed on
// (spec.seed, step, beam). Throws InvalidScenario if the pose is inside an
// object.
Scan Raycast(const World& world, const RobotPose& pose, const SensorSpec& spec,
             std::uint64_t step = 0);

// World-frame increment curr - prev (heading delta wrapped) plus
// N(0, spec.odom_noise).
Eigen::Vector3d OdometryIncrement(const RobotPose& prev, const RobotPose& curr,
                                  const SensorSpec& spec, std::mt19937_64& rng);

// Deterministic generator for a (seed, step, stream) triple.
std::mt19937_64 MakeStream(std::uint64_t seed, std::uint64_t step,
                           std::uint64_t stream);

// Odometry stream id used by the run loop; beams use their index.
inline constexpr std::uint64_t kOdometryStream = 0xFFFF0001ULL;

}  // namespace cslam

#endif  // CSLAM_SIMULATOR_H_
