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

#include "cslam/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "cslam/errors.h"
#include "cslam/simulator.h"

namespace cslam {

const char* PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kPredict:
      return "predict";
    case Phase::kAssociate:
      return "associate";
    case Phase::kInitiate:
      return "initiate";
    case Phase::kCorrect:
      return "correct";
  }
  return "unknown";
}

void PhaseTrace::BeginStep(int step) {
  if (step != step_ + 1) throw std::logic_error("steps must be consecutive");
  if (step_ >= 0) EndStep();
  step_ = step;
  phases_.clear();
}

void PhaseTrace::Enter(Phase phase) {
  if (step_ < 0) throw std::logic_error("phase entered before the first step");
  const int index = static_cast<int>(phase);
  bool ok;
  if (phases_.empty()) {
    ok = index == static_cast<int>(Phase::kPredict) ||
         (step_ == 0 && index == static_cast<int>(Phase::kAssociate));
  } else {
    ok = index == static_cast<int>(phases_.back()) + 1;
  }
  if (!ok) {
    throw std::logic_error(std::string("phase '") + PhaseName(phase) +
                           "' out of order in step " + std::to_string(step_));
  }
  phases_.push_back(phase);
}

void PhaseTrace::EndStep() const {
  if (phases_.empty() || phases_.back() != Phase::kCorrect) {
    throw std::logic_error("step " + std::to_string(step_) +
                           " ended before its correction");
  }
}

std::vector<std::string> PhaseTrace::Names() const {
  std::vector<std::string> out;
  for (Phase p : phases_) out.emplace_back(PhaseName(p));
  return out;
}

ContourSlam::ContourSlam(const FilterConfig& config,
                         const RobotPose& initial_pose,
                         const Eigen::Matrix3d& initial_pose_cov)
    : config_(config),
      model_(BasisGrid(config.basis_count), config.gp),
      state_(SlamState::Create(initial_pose, initial_pose_cov,
                               config.basis_count)) {
  config_.noise.Validate();
  config_.association.Validate();
}

StepOutcome ContourSlam::ProcessStep(
    const std::optional<Eigen::Vector3d>& odometry,
    const std::vector<Vec2>& scan_local) {
  if (odometry.has_value() == (step_ == 0)) {
    throw std::invalid_argument(
        "odometry must be absent on the first step and present afterwards");
  }
  trace_.BeginStep(step_);
  StepOutcome outcome;
  outcome.point_landmarks.assign(scan_local.size(), -1);

  if (odometry) {
    trace_.Enter(Phase::kPredict);
    state_ = Predict(state_, *odometry, config_.noise, model_);
  }

  trace_.Enter(Phase::kAssociate);
  const AssociatedScan scan =
      Associate(scan_local, state_, config_.association, model_);
  for (const LandmarkMeasurements& group : scan.groups) {
    LandmarkSlot& slot = state_.landmarks[group.landmark_index];
    slot.hits += static_cast<int>(group.points.size());
    for (const AssociatedPoint& p : group.points) {
      outcome.point_landmarks[p.scan_index] = slot.id;
    }
  }

  trace_.Enter(Phase::kInitiate);
  const RobotPose predicted = state_.pose();
  std::vector<Vec2> world_points;
  world_points.reserve(scan.unassociated_local.size());
  for (const Vec2& local : scan.unassociated_local) {
    world_points.push_back(LocalToGlobal(local, predicted));
  }
  for (const std::vector<Vec2>& cluster :
       Cluster(world_points, config_.association)) {
    Landmark landmark;
    try {
      landmark = Initiate(cluster, predicted, config_.association, model_,
                          next_id_);
    } catch (const DegenerateGeometry&) {
      continue;
    }
    ++next_id_;
    state_ = Augment(state_, landmark, config_.association.init_center_cov,
                     model_);
    outcome.initiated.push_back(landmark.id);
  }

  trace_.Enter(Phase::kCorrect);
  state_ = IekfUpdate(state_, scan, model_, config_.noise, config_.iekf,
                      &outcome.iekf_iterations);
  trace_.EndStep();
  outcome.phases = trace_.phases();
  ++step_;
  return outcome;
}

std::vector<Landmark> ContourSlam::Landmarks() const {
  std::vector<Landmark> out;
  for (int i = 0; i < state_.landmark_count(); ++i) {
    out.push_back(state_.ExtractLandmark(i));
  }
  return out;
}

std::vector<std::vector<Vec2>> ContourSlam::ContourPolygons(int samples) const {
  std::vector<std::vector<Vec2>> out;
  for (const Landmark& lm : Landmarks()) {
    out.push_back(ContourPolygon(lm, samples, model_));
  }
  return out;
}

FilterConfig MakeFilterConfig(const ScenarioConfig& config) {
  FilterConfig filter;
  filter.basis_count = config.basis_count;
  filter.gp = config.gp;
  filter.noise = config.noise;
  filter.association = config.association;
  filter.iekf = config.iekf;
  return filter;
}

namespace {

LandmarkSnapshot Snapshot(const Landmark& lm) {
  LandmarkSnapshot s;
  s.id = lm.id;
  s.hits = lm.hits;
  s.center = lm.center;
  s.radii = lm.contour.mean;
  s.radius_std = lm.contour.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return s;
}

}  // namespace

RunResult RunScenario(const ScenarioConfig& input, const RunOptions& options) {
  ScenarioConfig config = input;
  config.sensor.seed = config.seed;
  config.Validate();

  ContourSlam slam(MakeFilterConfig(config), config.trajectory.initial,
                   config.initial_pose_cov);
  RunResult result;
  RunLog& log = result.log;
  log.header.scenario = config.name;
  log.header.seed = config.seed;
  log.header.basis_count = config.basis_count;
  log.header.snapshot_every = config.output.snapshot_every;
  log.header.iou_resolution = config.output.iou_resolution;
  log.header.gp = config.gp;
  log.header.truth = config.world.objects;

  const int steps = config.StepCount();
  const double duration = config.trajectory.Duration();
  const std::size_t object_count = config.world.objects.size();
  std::vector<bool> observed(object_count, false);
  std::size_t observed_count = 0;
  std::vector<std::uint64_t> coverage(object_count, 0);
  std::vector<int> last_new_bin(object_count, -1);
  bool truth_dirty = true;
  CellSet truth_cells;

  RobotPose previous;
  for (int k = 0; k < steps; ++k) {
    const double t = std::min(k * config.dt, duration);
    const RobotPose truth = PoseAt(config.trajectory, t);
    std::optional<Eigen::Vector3d> odometry;
    if (k > 0) {
      std::mt19937_64 rng = MakeStream(config.seed, k, kOdometryStream);
      odometry = OdometryIncrement(previous, truth, config.sensor, rng);
    }
    previous = truth;
    const Scan scan = Raycast(config.world, truth, config.sensor, k);

    StepOutcome outcome;
    try {
      outcome = slam.ProcessStep(odometry, scan.LocalPoints());
    } catch (const NumericalFailure& e) {
      throw NumericalFailure("step " + std::to_string(k) + ": " + e.what());
    }

    const CovarianceHealth health = CheckCovariance(slam.state().cov);
    ++result.covariance_checks;
    if (!health.ok()) ++result.covariance_violations;
    result.max_symmetry_error =
        std::max(result.max_symmetry_error, health.symmetry_error);

    StepRecord record;
    record.step = k;
    record.time = t;
    record.true_pose = truth;
    record.estimated_pose = slam.state().pose();
    record.iekf_iterations = outcome.iekf_iterations;
    for (Phase p : outcome.phases) record.phases.emplace_back(PhaseName(p));
    record.associations.reserve(scan.points.size());
    for (std::size_t j = 0; j < scan.points.size(); ++j) {
      record.associations.push_back(
          {outcome.point_landmarks[j], scan.points[j].truth_id});
      for (std::size_t o = 0; o < object_count; ++o) {
        const WorldObject& object = config.world.objects[o];
        if (object.id != scan.points[j].truth_id) continue;
        if (!observed[o]) {
          observed[o] = true;
          ++observed_count;
          truth_dirty = true;
        }
        const Vec2 d = scan.points[j].truth_world - object.center;
        const int bin = std::min(
            kCoverageBins - 1,
            static_cast<int>(NormalizePositiveAngle(std::atan2(d.y(), d.x())) /
                             kTwoPi * kCoverageBins));
        const std::uint64_t bit = std::uint64_t{1} << bin;
        if (!(coverage[o] & bit)) {
          coverage[o] |= bit;
          last_new_bin[o] = k;
        }
      }
    }

    const bool last = k + 1 == steps;
    if ((k % config.output.iou_every == 0 || last) && observed_count > 0) {
      if (truth_dirty) {
        std::vector<std::vector<Vec2>> outlines;
        for (std::size_t o = 0; o < object_count; ++o) {
          if (observed[o]) outlines.push_back(ObjectOutline(config.world.objects[o]));
        }
        truth_cells = RasterizeUnion(outlines, config.output.iou_resolution);
        truth_dirty = false;
      }
      const CellSet estimate = RasterizeUnion(
          slam.ContourPolygons(config.output.contour_samples),
          config.output.iou_resolution);
      record.iou = CellIou(estimate, truth_cells);
      if (observed_count == object_count) {
        result.min_iou_after_first_sighting =
            std::min(result.min_iou_after_first_sighting.value_or(1.0),
                     *record.iou);
      }
    }
    if (options.record_snapshots &&
        (k % config.output.snapshot_every == 0 || last)) {
      for (const Landmark& lm : slam.Landmarks()) {
        record.landmarks.push_back(Snapshot(lm));
      }
    }
    log.steps.push_back(std::move(record));
  }

  if (object_count > 0 && observed_count == object_count) {
    result.full_observation_step =
        *std::max_element(last_new_bin.begin(), last_new_bin.end());
    for (const StepRecord& r : log.steps) {
      if (r.iou && r.step >= *result.full_observation_step) {
        result.min_iou_after_full_observation =
            std::min(result.min_iou_after_full_observation.value_or(1.0), *r.iou);
      }
    }
  }

  result.final_state = slam.state();
  result.rmse = ComputePoseRmse(log);
  result.association = ComputeAssociationAccuracy(log);
  if (object_count > 0) {
    result.final_iou =
        MapIou(slam.ContourPolygons(config.output.contour_samples),
               config.world.objects, config.output.iou_resolution);
  }
  return result;
}

}  // namespace cslam
