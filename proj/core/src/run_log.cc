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

#include "cslam/run_log.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "nlohmann/json.hpp"

namespace cslam {
namespace {

using Json = nlohmann::ordered_json;

Json PoseToJson(const RobotPose& pose) {
  return Json::array({pose.position.x(), pose.position.y(), pose.heading});
}

RobotPose PoseFromJson(const Json& j) {
  return RobotPose(j.at(0).get<double>(), j.at(1).get<double>(),
                   j.at(2).get<double>());
}

Json VectorToJson(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd VectorFromJson(const Json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

Json ObjectToJson(const WorldObject& object) {
  Json j;
  j["id"] = object.id;
  j["center"] = {object.center.x(), object.center.y()};
  if (object.shape.kind() == RadialShape::Kind::kPolygon) {
    Json vertices = Json::array();
    for (const Vec2& v : object.shape.vertices()) vertices.push_back({v.x(), v.y()});
    j["polygon"] = vertices;
  } else {
    j["fourier"] = {{"mean_radius", object.shape.mean_radius()},
                    {"cos", object.shape.cos_terms()},
                    {"sin", object.shape.sin_terms()}};
  }
  return j;
}

WorldObject ObjectFromJson(const Json& j) {
  WorldObject object;
  object.id = j.at("id").get<int>();
  object.center = Vec2(j.at("center").at(0).get<double>(),
                       j.at("center").at(1).get<double>());
  if (j.contains("polygon")) {
    std::vector<Vec2> vertices;
    for (const auto& v : j.at("polygon")) {
      vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    }
    object.shape = RadialShape::Polygon(std::move(vertices));
  } else {
    const Json& f = j.at("fourier");
    object.shape = RadialShape::Fourier(f.at("mean_radius").get<double>(),
                                        f.at("cos").get<std::vector<double>>(),
                                        f.at("sin").get<std::vector<double>>());
  }
  return object;
}

Json HeaderToJson(const RunLogHeader& h) {
  Json j;
  j["type"] = "header";
  j["format"] = "cslam-runlog";
  j["version"] = 1;
  j["scenario"] = h.scenario;
  j["seed"] = h.seed;
  j["basis_count"] = h.basis_count;
  j["snapshot_every"] = h.snapshot_every;
  j["iou_resolution"] = h.iou_resolution;
  j["gp"] = {{"sigma_f", h.gp.sigma_f},
             {"length_scale", h.gp.length_scale},
             {"sigma_r", h.gp.sigma_r},
             {"meas_noise", h.gp.meas_noise},
             {"forgetting", h.gp.forgetting},
             {"kernel", h.gp.kernel == PeriodicKernel::kHalfAngle
                            ? "half_angle"
                            : "full_angle"}};
  Json truth = Json::array();
  for (const WorldObject& o : h.truth) truth.push_back(ObjectToJson(o));
  j["truth"] = truth;
  return j;
}

RunLogHeader HeaderFromJson(const Json& j) {
  RunLogHeader h;
  h.scenario = j.at("scenario").get<std::string>();
  h.seed = j.at("seed").get<std::uint64_t>();
  h.basis_count = j.at("basis_count").get<int>();
  h.snapshot_every = j.at("snapshot_every").get<int>();
  h.iou_resolution = j.at("iou_resolution").get<double>();
  const Json& gp = j.at("gp");
  h.gp.sigma_f = gp.at("sigma_f").get<double>();
  h.gp.length_scale = gp.at("length_scale").get<double>();
  h.gp.sigma_r = gp.at("sigma_r").get<double>();
  h.gp.meas_noise = gp.at("meas_noise").get<double>();
  h.gp.forgetting = gp.at("forgetting").get<double>();
  h.gp.kernel = gp.at("kernel").get<std::string>() == "full_angle"
                    ? PeriodicKernel::kFullAngle
                    : PeriodicKernel::kHalfAngle;
  for (const auto& o : j.at("truth")) h.truth.push_back(ObjectFromJson(o));
  return h;
}

Json StepToJson(const StepRecord& s) {
  Json j;
  j["type"] = "step";
  j["step"] = s.step;
  j["time"] = s.time;
  j["true_pose"] = PoseToJson(s.true_pose);
  j["estimated_pose"] = PoseToJson(s.estimated_pose);
  j["iekf_iterations"] = s.iekf_iterations;
  j["phases"] = s.phases;
  j["iou"] = s.iou ? Json(*s.iou) : Json(nullptr);
  Json landmarks = Json::array();
  for (const LandmarkSnapshot& lm : s.landmarks) {
    Json l;
    l["id"] = lm.id;
    l["hits"] = lm.hits;
    l["center"] = {lm.center.x(), lm.center.y()};
    l["radii"] = VectorToJson(lm.radii);
    l["radius_std"] = VectorToJson(lm.radius_std);
    landmarks.push_back(std::move(l));
  }
  j["landmarks"] = std::move(landmarks);
  Json labels = Json::array();
  for (const PointLabel& p : s.associations) {
    labels.push_back({p.landmark_id, p.truth_id});
  }
  j["associations"] = std::move(labels);
  return j;
}

StepRecord StepFromJson(const Json& j) {
  StepRecord s;
  s.step = j.at("step").get<int>();
  s.time = j.at("time").get<double>();
  s.true_pose = PoseFromJson(j.at("true_pose"));
  s.estimated_pose = PoseFromJson(j.at("estimated_pose"));
  s.iekf_iterations = j.at("iekf_iterations").get<int>();
  s.phases = j.at("phases").get<std::vector<std::string>>();
  if (!j.at("iou").is_null()) s.iou = j.at("iou").get<double>();
  for (const auto& l : j.at("landmarks")) {
    LandmarkSnapshot lm;
    lm.id = l.at("id").get<int>();
    lm.hits = l.at("hits").get<int>();
    lm.center = Vec2(l.at("center").at(0).get<double>(),
                     l.at("center").at(1).get<double>());
    lm.radii = VectorFromJson(l.at("radii"));
    lm.radius_std = VectorFromJson(l.at("radius_std"));
    s.landmarks.push_back(std::move(lm));
  }
  for (const auto& p : j.at("associations")) {
    s.associations.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
  }
  return s;
}

}  // namespace

void WriteRunLog(const RunLog& log, std::ostream& out) {
  out << HeaderToJson(log.header).dump() << '\n';
  for (const StepRecord& s : log.steps) out << StepToJson(s).dump() << '\n';
}

std::string SerializeRunLog(const RunLog& log) {
  std::ostringstream out;
  WriteRunLog(log, out);
  return out.str();
}

RunLog ReadRunLog(std::istream& in) {
  RunLog log;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const Json j = Json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        log.header = HeaderFromJson(j);
        have_header = true;
      } else if (type == "step") {
        log.steps.push_back(StepFromJson(j));
      } else {
        throw std::runtime_error("unknown record type '" + type + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("run log line " + std::to_string(line_no) +
                               ": " + e.what());
    }
  }
  if (!have_header) throw std::runtime_error("run log has no header record");
  return log;
}

RunLog LoadRunLog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open run log " + path);
  return ReadRunLog(in);
}

void SaveRunLog(const RunLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write run log " + path);
  WriteRunLog(log, out);
}

}  // namespace cslam
