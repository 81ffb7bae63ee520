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

#include "cslam/metrics.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <stdexcept>

namespace cslam {
namespace {

constexpr int kOutlineSamples = 1440;

std::int64_t CellKey(std::int64_t ix, std::int64_t iy) {
  return (iy << 32) | (ix & 0xFFFFFFFFLL);
}

}  // namespace

PoseRmse ComputePoseRmse(const std::vector<RobotPose>& truth,
                         const std::vector<RobotPose>& estimate) {
  if (truth.empty()) throw std::invalid_argument("empty pose sequence");
  if (truth.size() != estimate.size()) {
    throw std::invalid_argument("pose sequences differ in length");
  }
  double sx = 0.0, sy = 0.0, sh = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const Vec2 d = estimate[k].position - truth[k].position;
    const double dh = NormalizeAngle(estimate[k].heading - truth[k].heading);
    sx += d.x() * d.x();
    sy += d.y() * d.y();
    sh += dh * dh;
  }
  const double n = static_cast<double>(truth.size());
  return {std::sqrt(sx / n), std::sqrt(sy / n),
          std::sqrt(sh / n) * 180.0 / kPi};
}

PoseRmse ComputePoseRmse(const RunLog& log) {
  std::vector<RobotPose> truth, estimate;
  for (const StepRecord& s : log.steps) {
    truth.push_back(s.true_pose);
    estimate.push_back(s.estimated_pose);
  }
  return ComputePoseRmse(truth, estimate);
}

CellSet CellSet::Union(const CellSet& other) const {
  std::vector<std::int64_t> merged;
  merged.reserve(keys_.size() + other.keys_.size());
  std::set_union(keys_.begin(), keys_.end(), other.keys_.begin(),
                 other.keys_.end(), std::back_inserter(merged));
  return CellSet(std::move(merged));
}

std::size_t CellSet::IntersectionSize(const CellSet& other) const {
  std::size_t count = 0;
  auto a = keys_.begin();
  auto b = other.keys_.begin();
  while (a != keys_.end() && b != other.keys_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++count;
      ++a;
      ++b;
    }
  }
  return count;
}

CellSet RasterizePolygon(const std::vector<Vec2>& polygon, double resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be > 0");
  if (polygon.size() < 3) return CellSet();
  double y_min = polygon[0].y(), y_max = polygon[0].y();
  for (const Vec2& p : polygon) {
    y_min = std::min(y_min, p.y());
    y_max = std::max(y_max, p.y());
  }
  const auto row_begin =
      static_cast<std::int64_t>(std::ceil(y_min / resolution - 0.5));
  const auto row_end =
      static_cast<std::int64_t>(std::floor(y_max / resolution - 0.5));
  std::vector<std::int64_t> keys;
  std::vector<double> crossings;
  const std::size_t n = polygon.size();
  for (std::int64_t iy = row_begin; iy <= row_end; ++iy) {
    const double y = (static_cast<double>(iy) + 0.5) * resolution;
    crossings.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = polygon[i];
      const Vec2& b = polygon[(i + 1) % n];
      if ((a.y() <= y && y < b.y()) || (b.y() <= y && y < a.y())) {
        crossings.push_back(a.x() + (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
      }
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const auto first =
          static_cast<std::int64_t>(std::ceil(crossings[k] / resolution - 0.5));
      const auto last = static_cast<std::int64_t>(
                            std::ceil(crossings[k + 1] / resolution - 0.5)) - 1;
      for (std::int64_t ix = first; ix <= last; ++ix) {
        keys.push_back(CellKey(ix, iy));
      }
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return CellSet(std::move(keys));
}

CellSet RasterizeUnion(const std::vector<std::vector<Vec2>>& polygons,
                       double resolution) {
  CellSet out;
  for (const auto& polygon : polygons) {
    out = out.Union(RasterizePolygon(polygon, resolution));
  }
  return out;
}

std::vector<Vec2> ObjectOutline(const WorldObject& object) {
  if (object.shape.kind() == RadialShape::Kind::kPolygon) {
    std::vector<Vec2> outline;
    for (const Vec2& v : object.shape.vertices()) {
      outline.push_back(object.center + v);
    }
    return outline;
  }
  return object.Boundary(kOutlineSamples);
}

double CellIou(const CellSet& a, const CellSet& b) {
  const std::size_t inter = a.IntersectionSize(b);
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double MapIou(const std::vector<std::vector<Vec2>>& estimated,
              const std::vector<WorldObject>& truth, double resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be > 0");
  if (truth.empty()) throw std::invalid_argument("truth map is empty");
  std::vector<std::vector<Vec2>> outlines;
  for (const WorldObject& o : truth) outlines.push_back(ObjectOutline(o));
  return CellIou(RasterizeUnion(estimated, resolution),
                 RasterizeUnion(outlines, resolution));
}

double PolygonSetIou(const std::vector<std::vector<Vec2>>& a,
                     const std::vector<std::vector<Vec2>>& b,
                     double resolution) {
  return CellIou(RasterizeUnion(a, resolution), RasterizeUnion(b, resolution));
}

AssociationAccuracy ComputeAssociationAccuracy(const RunLog& log) {
  std::map<int, std::map<int, long>> votes;
  for (const StepRecord& s : log.steps) {
    for (const PointLabel& p : s.associations) {
      if (p.landmark_id >= 0) ++votes[p.landmark_id][p.truth_id];
    }
  }
  AssociationAccuracy out;
  for (const auto& [landmark, tally] : votes) {
    long total = 0, best = 0;
    for (const auto& [truth, count] : tally) {
      total += count;
      best = std::max(best, count);
    }
    out.associated += total;
    out.correct += best;
  }
  if (out.associated > 0) {
    out.accuracy = static_cast<double>(out.correct) /
                   static_cast<double>(out.associated);
  }
  return out;
}

}  // namespace cslam
