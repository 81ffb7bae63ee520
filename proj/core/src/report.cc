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

#include "cslam/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cslam/metrics.h"
#include "cslam/quantiles.h"

namespace cslam {
namespace {

constexpr const char* kCsvHeader = "step,time,err_x,err_y,err_heading_deg,iou";
constexpr const char* kSummaryTag = "summary";

void AppendNumber(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

double ParseNumber(const std::string& cell, int line) {
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw std::runtime_error("line " + std::to_string(line) +
                             ": bad number '" + cell + "'");
  }
  return v;
}

std::optional<double> ParseOptional(const std::string& cell, int line) {
  if (cell.empty()) return std::nullopt;
  return ParseNumber(cell, line);
}

std::vector<std::string> SplitCells(const std::string& line) {
  std::vector<std::string> cells;
  std::string::size_type begin = 0;
  while (true) {
    const auto comma = line.find(',', begin);
    cells.push_back(line.substr(begin, comma - begin));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return cells;
}

std::string PathData(const std::vector<Vec2>& points, bool closed) {
  std::string d;
  for (std::size_t i = 0; i < points.size(); ++i) {
    d += i == 0 ? 'M' : 'L';
    AppendNumber(d, points[i].x());
    d += ' ';
    AppendNumber(d, points[i].y());
  }
  if (closed && !points.empty()) d += 'Z';
  return d;
}

}  // namespace

MetricsTable BuildMetricsTable(const RunLog& log) {
  MetricsTable table;
  for (const StepRecord& s : log.steps) {
    MetricsRow row;
    row.step = s.step;
    row.time = s.time;
    row.err_x = s.estimated_pose.position.x() - s.true_pose.position.x();
    row.err_y = s.estimated_pose.position.y() - s.true_pose.position.y();
    row.err_heading_deg =
        NormalizeAngle(s.estimated_pose.heading - s.true_pose.heading) * 180.0 /
        kPi;
    row.iou = s.iou;
    if (s.iou) table.summary.final_iou = s.iou;
    table.rows.push_back(row);
  }
  const PoseRmse rmse = ComputePoseRmse(log);
  table.summary.rmse_x = rmse.x;
  table.summary.rmse_y = rmse.y;
  table.summary.rmse_heading_deg = rmse.heading_deg;
  return table;
}

std::string SerializeMetricsCsv(const MetricsTable& table) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const MetricsRow& row : table.rows) {
    out += std::to_string(row.step);
    for (double v : {row.time, row.err_x, row.err_y, row.err_heading_deg}) {
      out += ',';
      AppendNumber(out, v);
    }
    out += ',';
    if (row.iou) AppendNumber(out, *row.iou);
    out += '\n';
  }
  out += kSummaryTag;
  out += ',';
  for (double v : {table.summary.rmse_x, table.summary.rmse_y,
                   table.summary.rmse_heading_deg}) {
    out += ',';
    AppendNumber(out, v);
  }
  out += ',';
  if (table.summary.final_iou) AppendNumber(out, *table.summary.final_iou);
  out += '\n';
  return out;
}

MetricsTable ParseMetricsCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("line 1: missing or unexpected CSV header");
  }
  MetricsTable table;
  bool have_summary = false;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (have_summary) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": data after summary row");
    }
    const std::vector<std::string> cells = SplitCells(line);
    if (cells.size() != 6) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected 6 columns");
    }
    if (cells[0] == kSummaryTag) {
      table.summary.rmse_x = ParseNumber(cells[2], line_no);
      table.summary.rmse_y = ParseNumber(cells[3], line_no);
      table.summary.rmse_heading_deg = ParseNumber(cells[4], line_no);
      table.summary.final_iou = ParseOptional(cells[5], line_no);
      have_summary = true;
      continue;
    }
    MetricsRow row;
    int step = 0;
    const auto res =
        std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), step);
    if (res.ec != std::errc() || res.ptr != cells[0].data() + cells[0].size()) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": bad step '" + cells[0] + "'");
    }
    row.step = step;
    row.time = ParseNumber(cells[1], line_no);
    row.err_x = ParseNumber(cells[2], line_no);
    row.err_y = ParseNumber(cells[3], line_no);
    row.err_heading_deg = ParseNumber(cells[4], line_no);
    row.iou = ParseOptional(cells[5], line_no);
    table.rows.push_back(row);
  }
  if (!have_summary) throw std::runtime_error("missing summary row");
  return table;
}

Box MapSnapshot::Bounds(double margin) const {
  Box box;
  box.min = Vec2::Constant(std::numeric_limits<double>::infinity());
  box.max = -box.min;
  auto grow = [&](const std::vector<Vec2>& points) {
    for (const Vec2& p : points) {
      box.min = box.min.cwiseMin(p);
      box.max = box.max.cwiseMax(p);
    }
  };
  for (const ContourDrawing& c : contours) {
    grow(c.mean);
    grow(c.lower);
    grow(c.upper);
    grow({c.center});
  }
  for (const auto& t : truth) grow(t);
  grow(true_path);
  grow(estimated_path);
  if (!std::isfinite(box.min.x())) {
    box.min = Vec2::Zero();
    box.max = Vec2::Zero();
  }
  box.min -= Vec2::Constant(margin);
  box.max += Vec2::Constant(margin);
  return box;
}

MapSnapshot BuildSnapshot(const RunLog& log, std::size_t step_index) {
  if (step_index >= log.steps.size()) {
    throw std::out_of_range("step index out of range");
  }
  const double z = TwoSidedNormalMultiplier(kSnapshotConfidence);
  MapSnapshot snap;
  snap.step = log.steps[step_index].step;
  for (std::size_t k = 0; k <= step_index; ++k) {
    snap.true_path.push_back(log.steps[k].true_pose.position);
    snap.estimated_path.push_back(log.steps[k].estimated_pose.position);
  }
  for (const WorldObject& o : log.header.truth) {
    snap.truth.push_back(ObjectOutline(o));
  }
  for (const LandmarkSnapshot& lm : log.steps[step_index].landmarks) {
    ContourDrawing c;
    c.id = lm.id;
    c.center = lm.center;
    const Eigen::Index n = lm.radii.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vec2 dir = Direction(kTwoPi * static_cast<double>(i) / n);
      const double r = lm.radii[i];
      const double s = i < lm.radius_std.size() ? lm.radius_std[i] : 0.0;
      c.mean.push_back(lm.center + std::max(r, 0.0) * dir);
      c.lower.push_back(lm.center + std::max(r - z * s, 0.0) * dir);
      c.upper.push_back(lm.center + std::max(r + z * s, 0.0) * dir);
    }
    snap.contours.push_back(std::move(c));
  }
  return snap;
}

std::string RenderSvg(const MapSnapshot& snapshot) {
  const Box box = snapshot.Bounds();
  const Vec2 size = box.max - box.min;
  const double scale = 800.0 / std::max({size.x(), size.y(), 1e-6});
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"";
  AppendNumber(out, std::ceil(size.x() * scale));
  out += "\" height=\"";
  AppendNumber(out, std::ceil(size.y() * scale));
  out += "\" viewBox=\"";
  AppendNumber(out, box.min.x());
  out += ' ';
  AppendNumber(out, -box.max.y());
  out += ' ';
  AppendNumber(out, size.x());
  out += ' ';
  AppendNumber(out, size.y());
  out += "\">\n<title>step ";
  out += std::to_string(snapshot.step);
  out += "</title>\n<g transform=\"scale(1,-1)\" fill=\"none\" "
         "stroke-linejoin=\"round\" stroke-width=\"";
  AppendNumber(out, 1.5 / scale);
  out += "\">\n";
  for (const auto& t : snapshot.truth) {
    out += "<path stroke=\"#444\" stroke-dasharray=\"";
    AppendNumber(out, 4.0 / scale);
    out += "\" d=\"" + PathData(t, true) + "\"/>\n";
  }
  for (const ContourDrawing& c : snapshot.contours) {
    out += "<path fill=\"#1f77b4\" fill-opacity=\"0.25\" stroke=\"none\" "
           "fill-rule=\"evenodd\" d=\"" +
           PathData(c.upper, true) + PathData(c.lower, true) + "\"/>\n";
    out += "<path stroke=\"#1f77b4\" d=\"" + PathData(c.mean, true) + "\"/>\n";
    out += "<circle fill=\"#1f77b4\" r=\"";
    AppendNumber(out, 3.0 / scale);
    out += "\" cx=\"";
    AppendNumber(out, c.center.x());
    out += "\" cy=\"";
    AppendNumber(out, c.center.y());
    out += "\"/>\n";
  }
  out += "<path stroke=\"#000\" d=\"" + PathData(snapshot.true_path, false) +
         "\"/>\n";
  out += "<path stroke=\"#d62728\" d=\"" +
         PathData(snapshot.estimated_path, false) + "\"/>\n";
  out += "</g>\n</svg>\n";
  return out;
}

std::vector<std::string> WriteReport(const RunLog& log, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root / "snapshots");
  std::vector<std::string> written;
  auto write = [&](const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    written.push_back(path.string());
  };
  write(root / "metrics.csv", SerializeMetricsCsv(BuildMetricsTable(log)));
  for (std::size_t k = 0; k < log.steps.size(); ++k) {
    if (log.steps[k].landmarks.empty()) continue;
    char name[32];
    std::snprintf(name, sizeof(name), "step_%05d.svg", log.steps[k].step);
    write(root / "snapshots" / name, RenderSvg(BuildSnapshot(log, k)));
  }
  return written;
}

}  // namespace cslam
