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

#ifndef CSLAM_METRICS_H_
#define CSLAM_METRICS_H_

#include <cstdint>
#include <vector>

#include "cslam/geometry.h"
#include "cslam/run_log.h"
#include "cslam/simulator.h"

namespace cslam {

struct PoseRmse {
  double x = 0.0;            // [m]
  double y = 0.0;            // [m]
  double heading_deg = 0.0;  // [deg]
};

// Time-averaged per-axis RMSE; heading errors wrapped to [-pi, pi).
// Throws std::invalid_argument for empty or mismatched input.
PoseRmse ComputePoseRmse(const std::vector<RobotPose>& truth,
                         const std::vector<RobotPose>& estimate);
PoseRmse ComputePoseRmse(const RunLog& log);

// Set of occupied cells on the world-aligned grid of the given resolution.
// Cell (ix, iy) covers [ix, ix+1) x [iy, iy+1) * resolution and counts as
// occupied when its center is inside (even-odd rule).
class CellSet {
 public:
  CellSet() = default;
  explicit CellSet(std::vector<std::int64_t> sorted_keys)
      : keys_(std::move(sorted_keys)) {}

  std::size_t size() const { return keys_.size(); }
  const std::vector<std::int64_t>& keys() const { return keys_; }

  CellSet Union(const CellSet& other) const;
  std::size_t IntersectionSize(const CellSet& other) const;

 private:
  std::vector<std::int64_t> keys_;
};

CellSet RasterizePolygon(const std::vector<Vec2>& polygon, double resolution);
CellSet RasterizeUnion(const std::vector<std::vector<Vec2>>& polygons,
                       double resolution);

// Polygon outline of a truth object: exact vertices for polygons, a dense
// sampling otherwise.
std::vector<Vec2> ObjectOutline(const WorldObject& object);

// |A n B| / |A u B| over occupied cells; 0 when both are empty.
double CellIou(const CellSet& a, const CellSet& b);

// IoU of the union of estimated contour polygons against the union of truth
// objects. Throws std::invalid_argument for resolution <= 0 or empty truth.
double MapIou(const std::vector<std::vector<Vec2>>& estimated,
              const std::vector<WorldObject>& truth, double resolution);

// Polygon-vs-polygon variant, symmetric in its arguments.
double PolygonSetIou(const std::vector<std::vector<Vec2>>& a,
                     const std::vector<std::vector<Vec2>>& b,
                     double resolution);

struct AssociationAccuracy {
  double accuracy = 1.0;  // 1.0 when nothing was associated
  long associated = 0;
  long correct = 0;
};

// Each landmark is mapped to the truth id most often associated with it over
// the run; accuracy is the fraction of associated points agreeing with that
// mapping.
AssociationAccuracy ComputeAssociationAccuracy(const RunLog& log);

}  // namespace cslam

#endif  // CSLAM_METRICS_H_
