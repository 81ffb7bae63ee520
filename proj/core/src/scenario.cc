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

#include "cslam/scenario.h"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "cslam/errors.h"
#include "nlohmann/json.hpp"

namespace cslam {
namespace {

using Json = nlohmann::json;

constexpr double kDeg = kPi / 180.0;

// Cursor into the document that knows its own dotted path.
class Node {
 public:
  Node(const Json& json, std::string path)
      : json_(json), path_(std::move(path)) {}

  const Json& json() const { return json_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void Fail(const std::string& message) const {
    throw ConfigError(path_.empty() ? "<root>" : path_, message);
  }

  void ExpectObject(std::initializer_list<std::string_view> allowed) const {
    if (!json_.is_object()) Fail("expected an object");
    const std::set<std::string_view> keys(allowed);
    for (const auto& item : json_.items()) {
      if (!keys.count(item.key())) At(item.key()).Fail("unknown field");
    }
  }

  bool Has(const std::string& key) const { return json_.contains(key); }

  Node At(const std::string& key) const {
    static const Json kNull;
    const std::string path = path_.empty() ? key : path_ + "." + key;
    auto it = json_.find(key);
    return Node(it == json_.end() ? kNull : *it, path);
  }

  Node At(std::size_t index) const {
    return Node(json_.at(index), path_ + "[" + std::to_string(index) + "]");
  }

  std::size_t ArraySize() const {
    if (!json_.is_array()) Fail("expected an array");
    return json_.size();
  }

  double Number() const {
    if (!json_.is_number()) Fail("expected a number");
    const double v = json_.get<double>();
    if (!std::isfinite(v)) Fail("must be finite");
    return v;
  }

  std::int64_t Integer() const {
    if (!json_.is_number_integer()) Fail("expected an integer");
    return json_.get<std::int64_t>();
  }

  std::string String() const {
    if (!json_.is_string()) Fail("expected a string");
    return json_.get<std::string>();
  }

  Vec2 Point() const {
    if (ArraySize() != 2) Fail("expected [x, y]");
    return Vec2(At(0).Number(), At(1).Number());
  }

  template <int Rows>
  Eigen::Matrix<double, Rows, Rows> Square() const {
    Eigen::Matrix<double, Rows, Rows> m;
    if (ArraySize() != Rows) Fail("expected " + std::to_string(Rows) + " rows");
    for (int r = 0; r < Rows; ++r) {
      const Node row = At(r);
      if (row.ArraySize() != Rows) {
        row.Fail("expected " + std::to_string(Rows) + " columns");
      }
      for (int c = 0; c < Rows; ++c) m(r, c) = row.At(c).Number();
    }
    return m;
  }

  std::vector<double> Numbers() const {
    std::vector<double> out(ArraySize());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = At(i).Number();
    return out;
  }

 private:
  const Json& json_;
  std::string path_;
};

void ReadDouble(const Node& parent, const std::string& key, double& out,
                double scale = 1.0) {
  if (parent.Has(key)) out = parent.At(key).Number() * scale;
}

void ReadInt(const Node& parent, const std::string& key, int& out) {
  if (!parent.Has(key)) return;
  const Node node = parent.At(key);
  const std::int64_t v = node.Integer();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    node.Fail("out of range");
  }
  out = static_cast<int>(v);
}

// Runs `check` and rethrows std::invalid_argument as a ConfigError at `path`.
template <typename F>
void CheckAt(const std::string& path, F&& check) {
  try {
    check();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  } catch (const InvalidScenario& e) {
    throw ConfigError(path, e.what());
  }
}

RadialShape ParseShape(const Node& node) {
  if (!node.json().is_object()) node.Fail("expected an object");
  const std::string type = node.At("type").String();
  if (type == "polygon") {
    node.ExpectObject({"type", "vertices"});
    const Node vertices = node.At("vertices");
    std::vector<Vec2> points;
    for (std::size_t i = 0; i < vertices.ArraySize(); ++i) {
      points.push_back(vertices.At(i).Point());
    }
    if (points.size() < 3) vertices.Fail("need at least 3 vertices");
    return RadialShape::Polygon(std::move(points));
  }
  if (type == "regular_polygon") {
    node.ExpectObject({"type", "sides", "circumradius", "rotation_deg"});
    int sides = 0;
    double radius = 0.0, rotation = 0.0;
    ReadInt(node, "sides", sides);
    ReadDouble(node, "circumradius", radius);
    ReadDouble(node, "rotation_deg", rotation, kDeg);
    if (sides < 3) node.At("sides").Fail("need at least 3 sides");
    if (!(radius > 0.0)) node.At("circumradius").Fail("must be > 0");
    return RadialShape::RegularPolygon(sides, radius, rotation);
  }
  if (type == "fourier") {
    node.ExpectObject({"type", "mean_radius", "cos", "sin"});
    double mean = 0.0;
    ReadDouble(node, "mean_radius", mean);
    if (!(mean > 0.0)) node.At("mean_radius").Fail("must be > 0");
    std::vector<double> cos_terms, sin_terms;
    if (node.Has("cos")) cos_terms = node.At("cos").Numbers();
    if (node.Has("sin")) sin_terms = node.At("sin").Numbers();
    return RadialShape::Fourier(mean, std::move(cos_terms), std::move(sin_terms));
  }
  node.At("type").Fail("unknown shape type '" + type + "'");
}

void ParseWorld(const Node& node, World& world) {
  node.ExpectObject({"objects"});
  const Node objects = node.At("objects");
  std::set<int> ids;
  for (std::size_t i = 0; i < objects.ArraySize(); ++i) {
    const Node item = objects.At(i);
    item.ExpectObject({"id", "center", "shape"});
    WorldObject object;
    object.id = static_cast<int>(i);
    ReadInt(item, "id", object.id);
    if (object.id < 0) item.At("id").Fail("must be >= 0");
    if (!ids.insert(object.id).second) item.At("id").Fail("duplicate id");
    object.center = item.At("center").Point();
    object.shape = ParseShape(item.At("shape"));
    CheckAt(item.At("shape").path(), [&] { object.Validate(); });
    world.objects.push_back(std::move(object));
  }
}

void ParseTrajectory(const Node& node, TrajectorySpec& trajectory) {
  node.ExpectObject({"initial", "segments"});
  if (node.Has("initial")) {
    const Node initial = node.At("initial");
    initial.ExpectObject({"x", "y", "heading_deg"});
    double x = 0.0, y = 0.0, heading = 0.0;
    ReadDouble(initial, "x", x);
    ReadDouble(initial, "y", y);
    ReadDouble(initial, "heading_deg", heading, kDeg);
    trajectory.initial = RobotPose(x, y, heading);
  }
  const Node segments = node.At("segments");
  for (std::size_t i = 0; i < segments.ArraySize(); ++i) {
    const Node item = segments.At(i);
    if (!item.json().is_object()) item.Fail("expected an object");
    TrajectorySegment segment;
    const std::string type = item.At("type").String();
    if (type == "straight") {
      item.ExpectObject({"type", "length", "speed"});
      segment.kind = TrajectorySegment::Kind::kStraight;
      ReadDouble(item, "length", segment.length);
      if (!(segment.length >= 0.0)) item.At("length").Fail("must be >= 0");
    } else if (type == "arc") {
      item.ExpectObject({"type", "radius", "sweep_deg", "speed"});
      segment.kind = TrajectorySegment::Kind::kArc;
      ReadDouble(item, "radius", segment.radius);
      ReadDouble(item, "sweep_deg", segment.sweep, kDeg);
      if (!(segment.radius > 0.0)) item.At("radius").Fail("must be > 0");
    } else {
      item.At("type").Fail("unknown segment type '" + type + "'");
    }
    ReadDouble(item, "speed", segment.speed);
    if (!(segment.speed > 0.0)) item.At("speed").Fail("must be > 0");
    trajectory.segments.push_back(segment);
  }
}

void ParseSensor(const Node& node, SensorSpec& sensor) {
  node.ExpectObject({"angular_resolution_deg", "max_range", "range_noise_std",
                     "odom_noise_std", "odom_noise_cov"});
  ReadDouble(node, "angular_resolution_deg", sensor.angular_resolution, kDeg);
  ReadDouble(node, "max_range", sensor.max_range);
  ReadDouble(node, "range_noise_std", sensor.range_noise_std);
  if (node.Has("odom_noise_std") && node.Has("odom_noise_cov")) {
    node.At("odom_noise_cov").Fail("give either odom_noise_std or odom_noise_cov");
  }
  if (node.Has("odom_noise_std")) {
    const Node std_node = node.At("odom_noise_std");
    if (std_node.ArraySize() != 3) std_node.Fail("expected [x, y, heading_deg]");
    const double sx = std_node.At(0).Number();
    const double sy = std_node.At(1).Number();
    const double sh = std_node.At(2).Number() * kDeg;
    if (sx < 0 || sy < 0 || sh < 0) std_node.Fail("must be >= 0");
    sensor.odom_noise = Eigen::Vector3d(sx * sx, sy * sy, sh * sh).asDiagonal();
  }
  if (node.Has("odom_noise_cov")) {
    sensor.odom_noise = node.At("odom_noise_cov").Square<3>();
  }
}

void ParseGp(const Node& node, GpHyperparams& gp) {
  node.ExpectObject({"sigma_f", "length_scale", "sigma_r", "meas_noise",
                     "forgetting", "kernel"});
  ReadDouble(node, "sigma_f", gp.sigma_f);
  ReadDouble(node, "length_scale", gp.length_scale);
  ReadDouble(node, "sigma_r", gp.sigma_r);
  ReadDouble(node, "meas_noise", gp.meas_noise);
  ReadDouble(node, "forgetting", gp.forgetting);
  if (node.Has("kernel")) {
    const std::string kernel = node.At("kernel").String();
    if (kernel == "half_angle") {
      gp.kernel = PeriodicKernel::kHalfAngle;
    } else if (kernel == "full_angle") {
      gp.kernel = PeriodicKernel::kFullAngle;
    } else {
      node.At("kernel").Fail("expected 'half_angle' or 'full_angle'");
    }
  }
}

void ParseAssociation(const Node& node, AssociationConfig& config) {
  node.ExpectObject({"gate_gamma", "cluster_eps", "cluster_min_pts",
                     "min_cluster_size", "init_center_cov",
                     "radial_variance_inflation", "init_center_push"});
  ReadDouble(node, "gate_gamma", config.gate_gamma);
  ReadDouble(node, "cluster_eps", config.cluster_eps);
  ReadInt(node, "cluster_min_pts", config.cluster_min_pts);
  ReadInt(node, "min_cluster_size", config.min_cluster_size);
  if (node.Has("init_center_cov")) {
    config.init_center_cov = node.At("init_center_cov").Square<2>();
  }
  ReadDouble(node, "radial_variance_inflation", config.radial_variance_inflation);
  ReadDouble(node, "init_center_push", config.init_center_push);
}

void ParseOutput(const Node& node, OutputConfig& output) {
  node.ExpectObject({"dir", "snapshot_every", "iou_every", "iou_resolution",
                     "contour_samples"});
  if (node.Has("dir")) output.dir = node.At("dir").String();
  ReadInt(node, "snapshot_every", output.snapshot_every);
  ReadInt(node, "iou_every", output.iou_every);
  ReadDouble(node, "iou_resolution", output.iou_resolution);
  ReadInt(node, "contour_samples", output.contour_samples);
}

}  // namespace

int ScenarioConfig::StepCount() const {
  const int available =
      static_cast<int>(std::floor(trajectory.Duration() / dt + 1e-9)) + 1;
  return steps > 0 ? std::min(steps, available) : available;
}

void ScenarioConfig::Validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt", "must be > 0");
  if (steps < 0) throw ConfigError("steps", "must be >= 0");
  if (basis_count < 4) throw ConfigError("basis_count", "must be >= 4");
  CheckAt("trajectory", [&] { trajectory.Validate(); });
  CheckAt("sensor", [&] { sensor.Validate(); });
  CheckAt("gp", [&] { gp.Validate(); });
  CheckAt("noise", [&] { noise.Validate(); });
  CheckAt("association", [&] { association.Validate(); });
  if (iekf.max_iter < 1) throw ConfigError("iekf.max_iter", "must be >= 1");
  if (!(iekf.tol > 0.0)) throw ConfigError("iekf.tol", "must be > 0");
  CheckAt("initial_pose_cov", [&] {
    NoiseConfig probe;
    probe.pose_process = initial_pose_cov;
    probe.Validate();
  });
  for (std::size_t i = 0; i < world.objects.size(); ++i) {
    CheckAt("world.objects[" + std::to_string(i) + "]",
            [&] { world.objects[i].Validate(); });
  }
  if (output.snapshot_every < 1) {
    throw ConfigError("output.snapshot_every", "must be >= 1");
  }
  if (output.iou_every < 1) throw ConfigError("output.iou_every", "must be >= 1");
  if (!(output.iou_resolution > 0.0)) {
    throw ConfigError("output.iou_resolution", "must be > 0");
  }
  if (output.contour_samples < 16) {
    throw ConfigError("output.contour_samples", "must be >= 16");
  }
}

ScenarioConfig ParseScenario(const std::string& json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  const Node root(doc, "");
  root.ExpectObject({"schema_version", "name", "seed", "dt", "steps",
                     "basis_count", "world", "trajectory", "sensor", "gp",
                     "noise", "association", "iekf", "initial_pose_cov",
                     "output"});
  if (!root.Has("schema_version")) {
    throw ConfigError("schema_version", "missing");
  }
  if (root.At("schema_version").Integer() != kScenarioSchemaVersion) {
    root.At("schema_version").Fail("unsupported version (expected " +
                                   std::to_string(kScenarioSchemaVersion) + ")");
  }

  ScenarioConfig config;
  if (root.Has("name")) config.name = root.At("name").String();
  if (root.Has("seed")) {
    const std::int64_t seed = root.At("seed").Integer();
    if (seed < 0) root.At("seed").Fail("must be >= 0");
    config.seed = static_cast<std::uint64_t>(seed);
  }
  ReadDouble(root, "dt", config.dt);
  ReadInt(root, "steps", config.steps);
  ReadInt(root, "basis_count", config.basis_count);
  if (!root.Has("world")) throw ConfigError("world", "missing");
  ParseWorld(root.At("world"), config.world);
  if (!root.Has("trajectory")) throw ConfigError("trajectory", "missing");
  ParseTrajectory(root.At("trajectory"), config.trajectory);
  if (root.Has("sensor")) ParseSensor(root.At("sensor"), config.sensor);
  if (root.Has("gp")) ParseGp(root.At("gp"), config.gp);

  config.noise.pose_process = config.sensor.odom_noise;
  config.noise.measurement =
      config.sensor.range_noise_std * config.sensor.range_noise_std *
      Mat2::Identity();
  if (root.Has("noise")) {
    const Node noise = root.At("noise");
    noise.ExpectObject({"pose_process", "center_process", "measurement"});
    if (noise.Has("pose_process")) {
      config.noise.pose_process = noise.At("pose_process").Square<3>();
    }
    if (noise.Has("center_process")) {
      config.noise.center_process = noise.At("center_process").Square<2>();
    }
    if (noise.Has("measurement")) {
      config.noise.measurement = noise.At("measurement").Square<2>();
    }
  }
  if (root.Has("association")) {
    ParseAssociation(root.At("association"), config.association);
  }
  if (root.Has("iekf")) {
    const Node iekf = root.At("iekf");
    iekf.ExpectObject({"max_iter", "tol"});
    ReadInt(iekf, "max_iter", config.iekf.max_iter);
    ReadDouble(iekf, "tol", config.iekf.tol);
  }
  if (root.Has("initial_pose_cov")) {
    config.initial_pose_cov = root.At("initial_pose_cov").Square<3>();
  }
  if (root.Has("output")) ParseOutput(root.At("output"), config.output);
  config.sensor.seed = config.seed;
  config.Validate();
  return config;
}

ScenarioConfig LoadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseScenario(buffer.str());
}

}  // namespace cslam
