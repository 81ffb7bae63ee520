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

#include "cslam/simulator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "Eigen/Cholesky"
#include "Eigen/Eigenvalues"
#include "boost/math/tools/roots.hpp"
#include "cslam/errors.h"

namespace cslam {
namespace {

constexpr double kNoHit = -1.0;

double Cross(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Ray o + t d against segment [a, b]; returns t >= 0 or kNoHit.
double RaySegment(const Vec2& origin, const Vec2& direction, const Vec2& a,
                  const Vec2& b) {
  const Vec2 edge = b - a;
  const double denom = Cross(direction, edge);
  if (std::abs(denom) < 1e-15) return kNoHit;
  const Vec2 diff = a - origin;
  const double t = Cross(diff, edge) / denom;
  const double s = Cross(diff, direction) / denom;
  constexpr double kSlack = 1e-12;
  if (t < 0.0 || s < -kSlack || s > 1.0 + kSlack) return kNoHit;
  return t;
}

double RayPolygon(const std::vector<Vec2>& polygon, const Vec2& origin,
                  const Vec2& direction) {
  double best = kNoHit;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double t =
        RaySegment(origin, direction, polygon[i], polygon[(i + 1) % n]);
    if (t >= 0.0 && (best < 0.0 || t < best)) best = t;
  }
  return best;
}

// Fourier shapes are intersected with a fine polygonal proxy first, then the
// hit is refined on the exact contour.
constexpr int kProxySamples = 2880;

}  // namespace

RadialShape RadialShape::Polygon(std::vector<Vec2> vertices) {
  if (vertices.size() < 3) {
    throw std::invalid_argument("polygon needs at least 3 vertices");
  }
  RadialShape shape;
  shape.kind_ = Kind::kPolygon;
  shape.vertices_ = std::move(vertices);
  return shape;
}

RadialShape RadialShape::RegularPolygon(int sides, double circumradius,
                                        double rotation) {
  if (sides < 3) throw std::invalid_argument("regular polygon needs >= 3 sides");
  if (!(circumradius > 0.0)) {
    throw std::invalid_argument("circumradius must be positive");
  }
  std::vector<Vec2> vertices;
  for (int i = 0; i < sides; ++i) {
    vertices.push_back(circumradius * Direction(rotation + kTwoPi * i / sides));
  }
  return Polygon(std::move(vertices));
}

RadialShape RadialShape::Fourier(double mean, std::vector<double> cos_terms,
                                 std::vector<double> sin_terms) {
  RadialShape shape;
  shape.kind_ = Kind::kFourier;
  shape.mean_ = mean;
  shape.cos_ = std::move(cos_terms);
  shape.sin_ = std::move(sin_terms);
  return shape;
}

double RadialShape::Radius(double angle) const {
  if (kind_ == Kind::kPolygon) {
    const double t = RayPolygon(vertices_, Vec2::Zero(), Direction(angle));
    return std::max(t, 0.0);
  }
  double r = mean_;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    r += cos_[k] * std::cos((k + 1) * angle);
  }
  for (std::size_t k = 0; k < sin_.size(); ++k) {
    r += sin_[k] * std::sin((k + 1) * angle);
  }
  return r;
}

double RadialShape::MaxRadius() const {
  if (kind_ == Kind::kPolygon) {
    double r = 0.0;
    for (const Vec2& v : vertices_) r = std::max(r, v.norm());
    return r;
  }
  double r = std::abs(mean_);
  for (double c : cos_) r += std::abs(c);
  for (double s : sin_) r += std::abs(s);
  return r;
}

bool WorldObject::Contains(const Vec2& world) const {
  const Vec2 offset = world - center;
  const double d = offset.norm();
  if (d == 0.0) return true;
  return d < Radius(std::atan2(offset.y(), offset.x()));
}

std::vector<Vec2> WorldObject::Boundary(int samples) const {
  std::vector<Vec2> boundary;
  boundary.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double angle = kTwoPi * i / samples;
    boundary.push_back(center + Radius(angle) * Direction(angle));
  }
  return boundary;
}

void WorldObject::Validate() const {
  const std::string name = "object " + std::to_string(id);
  for (int deg = 0; deg < 360; ++deg) {
    const double angle = deg * kPi / 180.0;
    if (!(Radius(angle) > 0.0)) {
      throw InvalidScenario(name + ": radius must be positive at every angle");
    }
    if (shape.kind() == RadialShape::Kind::kPolygon) {
      const Vec2 d = Direction(angle);
      std::vector<double> hits;
      const auto& v = shape.vertices();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double t = RaySegment(Vec2::Zero(), d, v[i], v[(i + 1) % v.size()]);
        if (t > 0.0) hits.push_back(t);
      }
      // A ray through a vertex touches two edges at the same distance.
      std::sort(hits.begin(), hits.end());
      const bool single =
          !hits.empty() && hits.back() - hits.front() < 1e-9 * (1.0 + hits.back());
      if (!single) {
        throw InvalidScenario(name + ": polygon is not star-convex about its center");
      }
    }
  }
}

double TrajectorySegment::Duration() const {
  return kind == Kind::kStraight ? length / speed
                                 : radius * std::abs(sweep) / speed;
}

double TrajectorySpec::Duration() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.Duration();
  return total;
}

void TrajectorySpec::Validate() const {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!(s.speed > 0.0)) {
      throw std::invalid_argument("segment " + std::to_string(i) +
                                  ": speed must be positive");
    }
    if (s.kind == TrajectorySegment::Kind::kStraight && !(s.length >= 0.0)) {
      throw std::invalid_argument("segment " + std::to_string(i) +
                                  ": length must be non-negative");
    }
    if (s.kind == TrajectorySegment::Kind::kArc && !(s.radius > 0.0)) {
      throw std::invalid_argument("segment " + std::to_string(i) +
                                  ": arc radius must be positive");
    }
  }
}

RobotPose PoseAt(const TrajectorySpec& trajectory, double t) {
  const double total = trajectory.Duration();
  if (!(t >= 0.0) || t > total + 1e-9) {
    throw std::out_of_range("trajectory time out of range");
  }
  Vec2 position = trajectory.initial.position;
  double heading = trajectory.initial.heading;
  double remaining = t;
  for (const TrajectorySegment& seg : trajectory.segments) {
    const double duration = seg.Duration();
    const double tau = std::min(remaining, duration);
    if (seg.kind == TrajectorySegment::Kind::kStraight) {
      position += seg.speed * tau * Direction(heading);
    } else {
      const double turn = seg.sweep >= 0.0 ? 1.0 : -1.0;
      const double rate = turn * seg.speed / seg.radius;
      const Vec2 pivot =
          position + turn * seg.radius * Vec2(-std::sin(heading), std::cos(heading));
      heading += rate * tau;
      position = pivot + turn * seg.radius *
                             Vec2(std::sin(heading), -std::cos(heading));
    }
    remaining -= tau;
    if (remaining <= 0.0) break;
  }
  return RobotPose(position, heading);
}

int SensorSpec::BeamCount() const {
  return static_cast<int>(std::lround(kTwoPi / angular_resolution));
}

void SensorSpec::Validate() const {
  if (!(angular_resolution > 0.0)) {
    throw std::invalid_argument("angular_resolution must be positive");
  }
  if (std::abs(BeamCount() * angular_resolution - kTwoPi) > 1e-9) {
    throw std::invalid_argument("angular_resolution must divide 2 pi");
  }
  if (!(max_range > 0.0)) throw std::invalid_argument("max_range must be > 0");
  if (!(range_noise_std >= 0.0)) {
    throw std::invalid_argument("range_noise_std must be >= 0");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(odom_noise);
  if ((odom_noise - odom_noise.transpose()).cwiseAbs().maxCoeff() > 1e-15 ||
      eig.eigenvalues().minCoeff() < -1e-15) {
    throw std::invalid_argument("odom_noise must be symmetric PSD");
  }
}

std::vector<Vec2> Scan::LocalPoints() const {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.local);
  return out;
}

double IntersectRay(const WorldObject& object, const Vec2& origin,
                    const Vec2& direction) {
  if (object.shape.kind() == RadialShape::Kind::kPolygon) {
    std::vector<Vec2> world;
    world.reserve(object.shape.vertices().size());
    for (const Vec2& v : object.shape.vertices()) world.push_back(object.center + v);
    return RayPolygon(world, origin, direction);
  }
  // Closest approach test before building the proxy.
  const Vec2 to_center = object.center - origin;
  const double along = to_center.dot(direction);
  const double miss = std::abs(Cross(direction, to_center));
  const double reach = object.shape.MaxRadius();
  if (miss > reach || along + reach < 0.0) return kNoHit;

  const double t0 = RayPolygon(object.Boundary(kProxySamples), origin, direction);
  if (t0 < 0.0) return kNoHit;
  // Signed distance along the ray: positive outside, negative inside.
  const auto outside = [&](double t) {
    const Vec2 offset = origin + t * direction - object.center;
    return offset.norm() - object.Radius(std::atan2(offset.y(), offset.x()));
  };
  const double bracket = 1e-3 * std::max(1.0, reach);
  double lo = std::max(0.0, t0 - bracket);
  double hi = t0 + bracket;
  if (!(outside(lo) > 0.0 && outside(hi) < 0.0)) return t0;  // grazing ray
  boost::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      outside, lo, hi, boost::math::tools::eps_tolerance<double>(50), max_iter);
  return 0.5 * (a + b);
}

std::mt19937_64 MakeStream(std::uint64_t seed, std::uint64_t step,
                           std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step),
                    static_cast<std::uint32_t>(step >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

Scan Raycast(const World& world, const RobotPose& pose, const SensorSpec& spec,
             std::uint64_t step) {
  for (const WorldObject& object : world.objects) {
    if (object.Contains(pose.position)) {
      throw InvalidScenario("robot pose lies inside object " +
                            std::to_string(object.id));
    }
  }
  Scan scan;
  const int beams = spec.BeamCount();
  for (int b = 0; b < beams; ++b) {
    const Vec2 direction =
        Direction(pose.heading + b * spec.angular_resolution);
    double best = std::numeric_limits<double>::infinity();
    int best_id = -1;
    for (const WorldObject& object : world.objects) {
      const double t = IntersectRay(object, pose.position, direction);
      if (t >= 0.0 && t < best) {
        best = t;
        best_id = object.id;
      }
    }
    if (best_id < 0 || best > spec.max_range) continue;
    const Vec2 truth_hit = pose.position + best * direction;
    Vec2 hit = truth_hit;
    if (spec.range_noise_std > 0.0) {
      std::mt19937_64 rng = MakeStream(spec.seed, step, b);
      std::normal_distribution<double> normal(0.0, spec.range_noise_std);
      const double nx = normal(rng);
      const double ny = normal(rng);
      hit += Vec2(nx, ny);
    }
    scan.points.push_back({GlobalToLocal(hit, pose), best_id, truth_hit, b});
  }
  return scan;
}

Eigen::Vector3d OdometryIncrement(const RobotPose& prev, const RobotPose& curr,
                                  const SensorSpec& spec, std::mt19937_64& rng) {
  Eigen::Vector3d u;
  u.head<2>() = curr.position - prev.position;
  u[2] = NormalizeAngle(curr.heading - prev.heading);
  if (spec.odom_noise.isZero(0.0)) return u;
  // LDLT tolerates singular (e.g. heading-only) noise.
  Eigen::LDLT<Eigen::Matrix3d> ldlt(spec.odom_noise);
  const Eigen::Matrix3d factor =
      ldlt.transpositionsP().transpose() *
      Eigen::Matrix3d(ldlt.matrixL()) *
      ldlt.vectorD().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector3d draw;
  for (int i = 0; i < 3; ++i) draw[i] = normal(rng);
  return u + factor * draw;
}

}  // namespace cslam
