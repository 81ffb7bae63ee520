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

#ifndef CSLAM_ERRORS_H_
#define CSLAM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace cslam {

// A linear solve or factorization failed even after jitter.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A measurement coincides with a landmark center (or a cluster collapses to a
// point), so the radial angle is undefined.
class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The simulated world is inconsistent, e.g. the robot sits inside an object.
class InvalidScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario document violates the schema. `path` is a dotted field path such
// as "sensor.max_range" or "world.objects[2].center".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace cslam

#endif  // CSLAM_ERRORS_H_
