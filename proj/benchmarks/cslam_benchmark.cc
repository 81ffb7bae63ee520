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

#include <random>
#include <string>
#include <vector>

#include "benchmark/benchmark.h"
#include "cslam/association.h"
#include "cslam/metrics.h"
#include "cslam/pipeline.h"
#include "cslam/scenario.h"
#include "cslam/simulator.h"
#include "cslam/slam_core.h"

namespace cslam {
namespace {

ScenarioConfig Load(const char* name) {
  return LoadScenario(std::string(CSLAM_CONFIG_DIR) + "/" + name);
}

// Random state with `count` circular landmarks of radius 1 on a ring of
// radius 4 around the robot.
SlamState RingState(const ContourModel& model, int count) {
  SlamState s = SlamState::Create(RobotPose(), 1e-4 * Eigen::Matrix3d::Identity(),
                                  model.size());
  for (int i = 0; i < count; ++i) {
    Landmark lm;
    lm.id = i;
    lm.center = 4.0 * Direction(kTwoPi * i / count);
    lm.contour = model.InitContour();
    lm.contour.mean.setConstant(1.0);
    lm.contour.cov *= 1e-2;
    s = Augment(s, lm, 1e-3 * Mat2::Identity(), model);
  }
  return s;
}

void BM_MeasurementModel(benchmark::State& state) {
  const ContourModel model(BasisGrid(static_cast<int>(state.range(0))), GpHyperparams());
  double angle = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.MeasurementModel(angle));
    angle += 0.013;
  }
}
BENCHMARK(BM_MeasurementModel)->Arg(25)->Arg(50)->Arg(100);

void BM_Jacobian(benchmark::State& state) {
  const ContourModel model(BasisGrid(50), GpHyperparams());
  const SlamState s = RingState(model, 4);
  const Vec2 local = GlobalToLocal(s.mean.segment<2>(s.OffsetOf(0)) - Vec2(1, 0), s.pose());
  for (auto _ : state) {
    benchmark::DoNotOptimize(Jacobian(s.mean, 0, local, model));
  }
}
BENCHMARK(BM_Jacobian);

// One IEKF correction with every landmark observed by 8 beams.
void BM_IekfUpdate(benchmark::State& state) {
  const ContourModel model(BasisGrid(50), GpHyperparams());
  const SlamState s = RingState(model, static_cast<int>(state.range(0)));
  std::vector<Vec2> scan;
  for (int i = 0; i < s.landmark_count(); ++i) {
    const Vec2 c = s.mean.segment<2>(s.OffsetOf(i));
    for (int k = -4; k < 4; ++k) {
      const double a = std::atan2(-c.y(), -c.x()) + 0.1 * k;
      scan.push_back(GlobalToLocal(c + 1.02 * Direction(a), s.pose()));
    }
  }
  NoiseConfig noise;
  noise.measurement = 9e-4 * Mat2::Identity();
  const AssociatedScan associated = Associate(scan, s, AssociationConfig(), model);
  for (auto _ : state) {
    benchmark::DoNotOptimize(IekfUpdate(s, associated, model, noise, IekfSettings()));
  }
  state.counters["points"] = static_cast<double>(associated.associated_count());
}
BENCHMARK(BM_IekfUpdate)->Arg(1)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_Raycast(benchmark::State& state) {
  const ScenarioConfig config = Load(state.range(0) == 1 ? "sim1.json" : "sim2.json");
  const RobotPose pose = PoseAt(config.trajectory, 0.0);
  std::uint64_t step = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Raycast(config.world, pose, config.sensor, step++));
  }
}
BENCHMARK(BM_Raycast)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

void BM_MapIou(benchmark::State& state) {
  const ScenarioConfig config = Load("sim2.json");
  std::vector<std::vector<Vec2>> estimate;
  for (const WorldObject& o : config.world.objects) {
    std::vector<Vec2> poly = o.Boundary(360);
    for (Vec2& p : poly) p += Vec2(0.05, -0.03);
    estimate.push_back(poly);
  }
  const double resolution = 0.01 * static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(MapIou(estimate, config.world.objects, resolution));
  }
}
BENCHMARK(BM_MapIou)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

// A complete scenario run without snapshots.
void BM_RunScenario(benchmark::State& state) {
  const ScenarioConfig config = Load(state.range(0) == 1 ? "sim1.json" : "sim2.json");
  RunOptions options;
  options.record_snapshots = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunScenario(config, options));
  }
  state.counters["steps"] = config.StepCount();
}
BENCHMARK(BM_RunScenario)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace
}  // namespace cslam

BENCHMARK_MAIN();
