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

#include "cslam/quantiles.h"

#include <stdexcept>

#include "boost/math/distributions/chi_squared.hpp"
#include "boost/math/distributions/normal.hpp"

namespace cslam {

double NormalQuantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("probability must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double TwoSidedNormalMultiplier(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence must lie in (0, 1)");
  }
  return NormalQuantile(0.5 * (1.0 + confidence));
}

double ChiSquareQuantile(double p, int dof) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("probability must lie in (0, 1)");
  }
  if (dof < 1) throw std::invalid_argument("dof must be >= 1");
  return boost::math::quantile(
      boost::math::chi_squared_distribution<double>(dof), p);
}

}  // namespace cslam
