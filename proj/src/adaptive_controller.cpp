// troploc/adaptive_controller.cpp
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

#include "troploc/adaptive_controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace troploc {

void ControllerParams::validate() const {
  if (std::isnan(alpha) || alpha < 0.0) {
    throw std::invalid_argument("ControllerParams: alpha must be >= 0");
  }
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw std::invalid_argument("ControllerParams: beta must lie in [0, 1)");
  }
  if (tau < 1) {
    throw std::invalid_argument("ControllerParams: tau must be >= 1");
  }
  if (!(thetaMin > 1.0)) {
    throw std::invalid_argument("ControllerParams: thetaMin must exceed 1");
  }
  if (!(thetaMax >= thetaMin)) {
    throw std::invalid_argument("ControllerParams: thetaMax must be >= thetaMin");
  }
  if (!(theta0 >= thetaMin && theta0 <= thetaMax)) {
    throw std::invalid_argument(
        "ControllerParams: theta0 must lie in [thetaMin, thetaMax]");
  }
}

MetricHistory::MetricHistory(std::size_t window) : window_(window) {
  if (window_ < 1) {
    throw std::invalid_argument("MetricHistory: window must be >= 1");
  }
}

void MetricHistory::append(const MetricSample& sample) {
  samples_.push_back(sample);
}

double MetricHistory::windowMean(double MetricSample::* field) const {
  if (samples_.empty()) {
    throw std::logic_error("MetricHistory: window mean of an empty history");
  }
  const std::size_t count = std::min(window_, samples_.size());
  double sum = 0.0;
  for (std::size_t i = samples_.size() - count; i < samples_.size(); ++i) {
    sum += samples_[i].*field;
  }
  return sum / static_cast<double>(count);
}

double MetricHistory::epsilonWindowMean() const {
  return windowMean(&MetricSample::epsilon);
}

double MetricHistory::nuWindowMean() const {
  return windowMean(&MetricSample::nu);
}

bool shouldAdapt(double epsilon, const MetricHistory& history, double alpha) {
  const double mean = history.epsilonWindowMean();
  if (mean == 0.0) {
    return epsilon != 0.0;
  }
  return std::abs(epsilon - mean) / mean >= alpha;
}

ThetaUpdate adaptTheta(double theta, double nu, const MetricHistory& history,
                       const ControllerParams& params) {
  const double mean = history.nuWindowMean();
  ThetaUpdate update;
  if (nu <= mean) {
    update.theta = (1.0 + params.beta) * theta;
    update.direction = AdaptDirection::up;
  } else {
    update.theta = (1.0 - params.beta) * theta;
    update.direction = AdaptDirection::down;
  }
  update.theta = std::clamp(update.theta, params.thetaMin, params.thetaMax);
  return update;
}

DecodeResult run(const HmmCosts& model, Eigen::Index frameCount,
                 const ControllerParams& params) {
  params.validate();
  model.validate();
  if (frameCount < 1) {
    throw std::invalid_argument("run: frameCount must be >= 1");
  }

  const Eigen::Index n = model.numStates();
  MetricHistory history(params.tau);
  DecodeResult result;
  result.lattice.frames.reserve(static_cast<std::size_t>(frameCount));
  result.trace.rows.reserve(static_cast<std::size_t>(frameCount));

  double theta = params.theta0;
  StateVector front;

  for (Eigen::Index t = 0; t < frameCount; ++t) {
    const StateVector observation = model.observationCosts(t);
    if (observation.size() != n) {
      throw std::invalid_argument(
          "run: observation costs at frame " + std::to_string(t) + " have " +
          std::to_string(observation.size()) + " entries, expected " +
          std::to_string(n));
    }
    if (!allValidCosts(observation) || (observation.array() < 0.0).any()) {
      throw std::invalid_argument("run: observation costs at frame " +
                                  std::to_string(t) +
                                  " must be >= 0 or +inf");
    }

    StateVector costs;
    IndexVector backpointers;
    if (t == 0) {
      costs = model.initial + observation;
    } else {
      auto stepped = step(model, front, observation);
      costs = std::move(stepped.costs);
      backpointers = std::move(stepped.backpointers);
    }

    const double thetaInForce = theta;
    const double eta = pruneThreshold(costs, thetaInForce);
    PruneOutcome outcome = prune(costs, eta);
    if (outcome.support.empty()) {
      throw DeadFrontError("run: every state pruned at frame " +
                           std::to_string(t));
    }

    const double epsilon = entropyMetric(outcome, params.entropyMode);
    const double nu = volumeMetric(outcome);

    TraceRow row;
    row.t = t;
    row.theta = thetaInForce;
    row.epsilon = epsilon;
    row.nu = nu;
    row.supportSize = static_cast<Eigen::Index>(outcome.support.size());

    if (static_cast<std::size_t>(t) >= params.tau &&
        shouldAdapt(epsilon, history, params.alpha)) {
      const ThetaUpdate update = adaptTheta(theta, nu, history, params);
      theta = update.theta;
      row.adapted = true;
      row.direction = update.direction;
      if (update.direction == AdaptDirection::up) {
        ++result.trace.upCount;
      } else {
        ++result.trace.downCount;
      }
    }

    // The stored sample reflects the theta the frame was pruned under.
    history.append({t, epsilon, nu, row.supportSize});
    result.trace.rows.push_back(row);

    front = outcome.pruned;
    result.lattice.frames.push_back(
        {std::move(outcome.pruned), std::move(backpointers), eta});
  }

  result.path = backtrack(result.lattice);
  return result;
}

}  // namespace troploc
