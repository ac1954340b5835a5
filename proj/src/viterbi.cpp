// troploc/viterbi.cpp
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

#include "troploc/viterbi.hpp"

#include <cmath>
#include <string>

namespace troploc {

namespace {

bool hasFiniteEntry(const StateVector& v) {
  return (v.array() < kInfiniteCost).any();
}

void requireNonNegativeCosts(const Eigen::Ref<const Eigen::ArrayXXd>& values,
                             const char* what) {
  if (values.isNaN().any() || (values < 0.0).any()) {
    throw std::invalid_argument(std::string(what) +
                                " must be >= 0 or +inf, without NaN");
  }
}

}  // namespace

void HmmCosts::validate() const {
  const Eigen::Index n = initial.size();
  if (n < 1) {
    throw std::invalid_argument("HmmCosts: at least one state required");
  }
  if (transition.rows() != n || transition.cols() != n) {
    throw std::invalid_argument("HmmCosts: transition must be " +
                                std::to_string(n) + "x" + std::to_string(n));
  }
  if (!observationCosts) {
    throw std::invalid_argument("HmmCosts: observationCosts is unset");
  }
  requireNonNegativeCosts(initial.array(), "HmmCosts: initial costs");
  requireNonNegativeCosts(transition.array(), "HmmCosts: transition costs");
}

StepResult step(const HmmCosts& model, const StateVector& previous,
                const StateVector& observation) {
  if (previous.size() != model.numStates() ||
      observation.size() != model.numStates()) {
    throw std::invalid_argument("step: vector length does not match state count");
  }
  if (!hasFiniteEntry(previous)) {
    throw DeadFrontError("step: previous front has no finite state");
  }
  auto mv = tropical::matvec(model.transition.transpose(), previous);
  return {observation + mv.values, std::move(mv.argmin)};
}

double pruneThreshold(const StateVector& costs, double theta) {
  if (std::isnan(theta) || theta <= 1.0) {
    throw std::invalid_argument("pruneThreshold: theta must exceed 1");
  }
  const double best = costs.minCoeff();
  if (!std::isfinite(best)) {
    throw DeadFrontError("pruneThreshold: cost front has no finite state");
  }
  return theta + best;
}

PruneOutcome prune(const StateVector& costs, double eta) {
  if (!std::isfinite(eta)) {
    throw std::invalid_argument("prune: eta must be finite");
  }
  if (!hasFiniteEntry(costs)) {
    throw DeadFrontError("prune: cost front has no finite state");
  }
  PruneOutcome out;
  out.eta = eta;
  out.pruned = (costs.array() <= eta).select(costs, kInfiniteCost);
  for (Eigen::Index i = 0; i < out.pruned.size(); ++i) {
    if (out.pruned(i) < kInfiniteCost) {
      out.support.push_back(i);
    }
  }
  out.residuals.resize(static_cast<Eigen::Index>(out.support.size()));
  for (std::size_t s = 0; s < out.support.size(); ++s) {
    out.residuals(static_cast<Eigen::Index>(s)) =
        eta - out.pruned(out.support[s]);
  }
  return out;
}

std::vector<Eigen::Index> backtrack(const Lattice& lattice) {
  if (lattice.frames.empty()) {
    throw std::invalid_argument("backtrack: empty lattice");
  }
  const auto& last = lattice.frames.back().pruned;
  Eigen::Index state = -1;
  double best = kInfiniteCost;
  for (Eigen::Index i = 0; i < last.size(); ++i) {
    if (last(i) < best) {
      best = last(i);
      state = i;
    }
  }
  if (state < 0) {
    throw DeadFrontError("backtrack: final frame has no survivor");
  }
  const Eigen::Index frameCount = lattice.frameCount();
  std::vector<Eigen::Index> path(static_cast<std::size_t>(frameCount));
  for (Eigen::Index t = frameCount - 1; t >= 0; --t) {
    path[static_cast<std::size_t>(t)] = state;
    if (t > 0) {
      const auto& bp = lattice.frames[static_cast<std::size_t>(t)].backpointers;
      if (state >= bp.size() || bp(state) < 0) {
        throw std::logic_error("backtrack: missing backpointer at frame " +
                               std::to_string(t));
      }
      state = bp(state);
    }
  }
  return path;
}

}  // namespace troploc
