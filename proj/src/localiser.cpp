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

#include "troploc/localiser.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "troploc/viterbi.hpp"

namespace troploc {

void LocaliserConfig::validate(Eigen::Index userCount) const {
  if (userCount < 1) {
    throw std::invalid_argument("localiser needs at least one user");
  }
  if (!(stayProbability > 0.0) || stayProbability > 1.0) {
    throw std::invalid_argument("stay probability must be in (0, 1]");
  }
  if (!(attackerRate > 0.0) || !std::isfinite(attackerRate)) {
    throw std::invalid_argument(
        "hypothesis attacker rate must be positive and finite");
  }
  if (benignRates.size() != userCount) {
    throw std::invalid_argument(
        "hypothesis benign rate count does not match user count");
  }
  for (Eigen::Index j = 0; j < userCount; ++j) {
    if (!(benignRates[j] > 0.0) || !std::isfinite(benignRates[j])) {
      throw std::invalid_argument("hypothesis benign rate for user " +
                                  std::to_string(j) +
                                  " must be positive and finite");
    }
  }
}

StateVector observationCosts(const RequestFrame& frame,
                             const LocaliserConfig& config) {
  const Eigen::Index n = frame.counts.size();
  config.validate(n);

  // Under hypothesis i every user j != i contributes its benign term, so
  // cost(i) = (sum of all benign terms) - benignTerm(i) + attackerTerm(i).
  StateVector benignTerms(n);
  StateVector attackerTerms(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    benignTerms[j] = -logPoissonPmf(frame.counts[j], config.benignRates[j]);
    attackerTerms[j] = -logPoissonPmf(frame.counts[j], config.attackerRate);
  }
  const double benignTotal = benignTerms.sum();
  return (benignTotal - benignTerms.array() + attackerTerms.array()).matrix();
}

CostMatrix buildTransition(Eigen::Index n, double stayProbability) {
  if (n < 1) {
    throw std::invalid_argument("transition matrix needs at least one state");
  }
  if (!(stayProbability > 0.0) || stayProbability > 1.0) {
    throw std::invalid_argument("stay probability must be in (0, 1]");
  }
  if (n == 1 && stayProbability < 1.0) {
    throw std::invalid_argument(
        "a single user cannot move: stay probability must be 1");
  }
  const double stayCost = -std::log(stayProbability);
  const double moveCost =
      (stayProbability == 1.0)
          ? kInfiniteCost
          : -std::log((1.0 - stayProbability) / static_cast<double>(n - 1));
  CostMatrix transition = CostMatrix::Constant(n, n, moveCost);
  transition.diagonal().setConstant(stayCost);
  return transition;
}

LocalisationResult localise(const Scenario& scenario,
                            const LocaliserConfig& config,
                            const ControllerParams& params) {
  const std::vector<RequestFrame> traffic = generate(scenario);
  return localise(scenario, traffic, config, params);
}

LocalisationResult localise(const Scenario& scenario,
                            std::span<const RequestFrame> traffic,
                            const LocaliserConfig& config,
                            const ControllerParams& params) {
  scenario.validate();
  config.validate(scenario.userCount);
  if (std::cmp_less(traffic.size(), scenario.frameCount)) {
    throw std::invalid_argument("traffic tape shorter than the scenario");
  }

  const Eigen::Index n = scenario.userCount;
  HmmCosts model;
  model.initial =
      StateVector::Constant(n, std::log(static_cast<double>(n)));
  model.transition = buildTransition(n, config.stayProbability);
  model.observationCosts = [&traffic, &config](Eigen::Index t) {
    return observationCosts(traffic[static_cast<std::size_t>(t)], config);
  };

  DecodeResult decoded = run(model, scenario.frameCount, params);

  LocalisationResult result;
  result.decodedPositions = std::move(decoded.path);
  result.truePositions.resize(static_cast<std::size_t>(scenario.frameCount));
  Eigen::Index hits = 0;
  double supportTotal = 0.0;
  for (Eigen::Index t = 0; t < scenario.frameCount; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    result.truePositions[ut] = scenario.attackerPositionAt(t);
    if (result.decodedPositions[ut] == result.truePositions[ut]) {
      ++hits;
    }
    supportTotal += static_cast<double>(decoded.trace.rows[ut].supportSize);
  }
  result.frameAccuracy =
      static_cast<double>(hits) / static_cast<double>(scenario.frameCount);
  result.meanSupportSize =
      supportTotal / static_cast<double>(scenario.frameCount);
  result.trace = std::move(decoded.trace);
  return result;
}

}  // namespace troploc
