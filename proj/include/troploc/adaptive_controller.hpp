// troploc/adaptive_controller.hpp
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

#include <cstddef>
#include <vector>

#include "troploc/polytope_metrics.hpp"
#include "troploc/viterbi.hpp"

namespace troploc {

// Knobs of the adaptive pruning loop.
//
// alpha is the relative-deviation threshold on the entropy metric, beta the
// multiplicative step applied to theta, tau the length of the running
// history, and theta0 the leniency used until the history has tau samples.
// theta stays clamped to [thetaMin, thetaMax] so the volume metric's
// normalisation never degenerates.
struct ControllerParams {
  double alpha = 0.25;
  double beta = 0.0005;
  std::size_t tau = 50;
  double theta0 = 2.5;
  double thetaMin = 1.01;
  double thetaMax = 1e6;
  EntropyMode entropyMode = EntropyMode::literal;

  // Throws std::invalid_argument when any invariant fails.
  void validate() const;
};

// Append-only series of per-frame metric samples with a sliding-window
// mean over the most recent `window` entries.
class MetricHistory {
 public:
  explicit MetricHistory(std::size_t window);

  void append(const MetricSample& sample);

  std::size_t size() const { return samples_.size(); }
  std::size_t window() const { return window_; }
  const std::vector<MetricSample>& samples() const { return samples_; }

  double epsilonWindowMean() const;
  double nuWindowMean() const;

 private:
  double windowMean(double MetricSample::* field) const;

  std::vector<MetricSample> samples_;
  std::size_t window_;
};

// True when the entropy metric deviates from its running mean by at least
// alpha, relatively. A zero mean counts as an infinite deviation unless
// epsilon is also zero.
bool shouldAdapt(double epsilon, const MetricHistory& history, double alpha);

enum class AdaptDirection { none, up, down };

struct ThetaUpdate {
  double theta;
  AdaptDirection direction;
};

// Loosens theta by (1 + beta) when nu is at or below its running mean,
// tightens by (1 - beta) otherwise; the result is clamped to
// [params.thetaMin, params.thetaMax].
ThetaUpdate adaptTheta(double theta, double nu, const MetricHistory& history,
                       const ControllerParams& params);

// One row per decoded frame. theta is the value in force while the frame
// was pruned, i.e. before any adaptation that frame triggered.
struct TraceRow {
  Eigen::Index t = 0;
  double theta = 0.0;
  double epsilon = 0.0;
  double nu = 0.0;
  Eigen::Index supportSize = 0;
  bool adapted = false;
  AdaptDirection direction = AdaptDirection::none;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  std::size_t upCount = 0;
  std::size_t downCount = 0;
};

struct DecodeResult {
  std::vector<Eigen::Index> path;
  Lattice lattice;
  RunTrace trace;
};

// The adaptive pruning loop. Per frame: Viterbi update, threshold with the
// current theta, prune, compute the metrics, adapt theta once the history
// holds tau samples, then record the pre-adaptation sample. Backtracks the
// lattice at the end.
//
// model.observationCosts must serve every frame in [0, frameCount).
DecodeResult run(const HmmCosts& model, Eigen::Index frameCount,
                 const ControllerParams& params);

}  // namespace troploc
