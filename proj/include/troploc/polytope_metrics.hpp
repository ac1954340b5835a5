// troploc/polytope_metrics.hpp
//
// Copyright 2026 The troploc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "troploc/viterbi.hpp"

namespace troploc {

// Solution-space metrics computed per frame from a PruneOutcome. The
// residuals r(i) = eta - z(i) measure how loosely each surviving state
// clears the pruning constraint.

struct MetricSample {
  Eigen::Index t = 0;
  double epsilon = 0.0;
  double nu = 0.0;
  Eigen::Index supportSize = 0;
};

// Residuals of exactly-at-threshold states are 0; they are clamped up to
// this floor before taking logs.
inline constexpr double kResidualFloor = 1e-9;

// Normalized volume proxy: nu = -mean over the support of
// log(r_i) / log(max r). Equals -1 whenever all residuals agree.
// Throws std::invalid_argument on an empty support.
double volumeMetric(const PruneOutcome& outcome);

enum class EntropyMode {
  literal,  // epsilon over the raw costs z
  shifted,  // epsilon over z - min z, immune to cost growth across frames
};

// Entropy proxy: epsilon = mean over the support of z_i * exp(-z_i).
// Throws std::invalid_argument on an empty support.
double entropyMetric(const PruneOutcome& outcome,
                     EntropyMode mode = EntropyMode::literal);

}  // namespace troploc
