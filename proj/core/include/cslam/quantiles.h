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

#ifndef CSLAM_QUANTILES_H_
#define CSLAM_QUANTILES_H_

namespace cslam {

// Inverse CDF of the standard normal distribution, p in (0, 1).
double NormalQuantile(double p);

// Two-sided standard-normal multiplier for confidence level c in (0, 1),
// i.e. NormalQuantile((1 + c) / 2).
double TwoSidedNormalMultiplier(double confidence);

// Inverse CDF of the chi-square distribution, p in (0, 1), dof >= 1.
double ChiSquareQuantile(double p, int dof);

}  // namespace cslam

#endif  // CSLAM_QUANTILES_H_
