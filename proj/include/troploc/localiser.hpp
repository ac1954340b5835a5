// troploc/localiser.hpp
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

#include <Eigen/Core>
#include <span>
#include <vector>

#include "troploc/adaptive_controller.hpp"
#include "troploc/traffic_sim.hpp"
#include "troploc/tropical.hpp"

namespace troploc {

// Decoder-side model of the network. State i of the HMM is the hypothesis
// "user i currently holds the attacker role"; the hypothesis rates may be
// set to differ from the generative ones to study model mismatch.
struct LocaliserConfig {
  double stayProbability = 0.99;     // chance the attacker keeps its slot
  double attackerRate = 1.0;         // λ the decoder assumes for the attacker
  Eigen::VectorXd benignRates;       // λ the decoder assumes per benign user

  // Throws std::invalid_argument unless the config is consistent with a
  // scenario of `userCount` users.
  void validate(Eigen::Index userCount) const;
};

struct LocalisationResult {
  std::vector<Eigen::Index> decodedPositions;  // from the Viterbi backtrack
  std::vector<Eigen::Index> truePositions;     // from the scenario schedule
  double frameAccuracy = 0.0;    // fraction of frames decoded == true
  double meanSupportSize = 0.0;  // average survivor count per frame
  RunTrace trace;
};

// Joint negative log-likelihood of one frame's counts under each hypothesis.
// Only the hypothesised attacker's term differs between states, so the costs
// are assembled from one shared benign total in O(n).
StateVector observationCosts(const RequestFrame& frame,
                             const LocaliserConfig& config);

// Movement costs between attacker positions: staying costs -ln pStay, each
// of the n-1 moves costs -ln((1 - pStay)/(n - 1)). For pStay = 1 moving is
// impossible (infinite cost).
CostMatrix buildTransition(Eigen::Index n, double stayProbability);

// Runs the adaptive decoder against freshly generated traffic for the
// scenario, or against a caller-supplied tape (which must cover at least
// scenario.frameCount frames).
LocalisationResult localise(const Scenario& scenario,
                            const LocaliserConfig& config,
                            const ControllerParams& params);
LocalisationResult localise(const Scenario& scenario,
                            std::span<const RequestFrame> traffic,
                            const LocaliserConfig& config,
                            const ControllerParams& params);

}  // namespace troploc
