// troploc/viterbi.hpp
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

#include <functional>
#include <stdexcept>
#include <vector>

#include "troploc/tropical.hpp"

namespace troploc {

// Raised when no state is decodable: an all-+inf cost front.
class DeadFrontError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cost-domain hidden Markov model. All costs are negative log
// probabilities: finite non-negative, or +inf for the impossible.
struct HmmCosts {
  // Per-state start costs.
  StateVector initial;
  // transition(i, j) is the cost of moving from state i to state j.
  CostMatrix transition;
  // Per-state observation costs for frame t.
  std::function<StateVector(Eigen::Index)> observationCosts;

  Eigen::Index numStates() const { return initial.size(); }

  // Throws std::invalid_argument on shape or cost-domain violations.
  void validate() const;
};

struct StepResult {
  StateVector costs;         // x(t)
  IndexVector backpointers;  // best predecessor per state
};

// One Viterbi update: costs(i) = observation(i) + min_k (transition(k, i) +
// previous(k)). States with no reachable predecessor come out +inf.
StepResult step(const HmmCosts& model, const StateVector& previous,
                const StateVector& observation);

// Pruning threshold eta = theta + min(costs). theta must exceed 1; +inf is
// accepted and disables pruning downstream.
double pruneThreshold(const StateVector& costs, double theta);

// Snapshot of the post-pruning solution space for one frame.
struct PruneOutcome {
  StateVector pruned;  // z: +inf outside the support
  double eta = kInfiniteCost;
  std::vector<Eigen::Index> support;  // ascending indices with finite z
  Eigen::VectorXd residuals;          // eta - z(i), aligned with support
};

// Keeps states with costs(i) <= eta (boundary inclusive), exiles the rest
// to +inf. The best state always survives when eta came from
// pruneThreshold.
PruneOutcome prune(const StateVector& costs, double eta);

struct LatticeFrame {
  StateVector pruned;        // z(t)
  IndexVector backpointers;  // empty at frame 0
  double eta = kInfiniteCost;
};

struct Lattice {
  std::vector<LatticeFrame> frames;

  Eigen::Index frameCount() const {
    return static_cast<Eigen::Index>(frames.size());
  }
};

// Follows backpointers from the cheapest surviving final state (ties to
// the smallest index) down to frame 0. Returns one state per frame.
std::vector<Eigen::Index> backtrack(const Lattice& lattice);

}  // namespace troploc
