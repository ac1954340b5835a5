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

#include <catch2/catch_amalgamated.hpp>
#include <memory>
#include <vector>

#include "oracles.hpp"

namespace troploc {
namespace {

using test::brutePath;
using test::uniformInt;

HmmCosts makeModel(StateVector initial, CostMatrix transition,
                   std::vector<StateVector> observations) {
  HmmCosts model;
  model.initial = std::move(initial);
  model.transition = std::move(transition);
  auto shared =
      std::make_shared<std::vector<StateVector>>(std::move(observations));
  model.observationCosts = [shared](Eigen::Index t) {
    return shared->at(static_cast<std::size_t>(t));
  };
  return model;
}

// Decode with pruning out of the picture: raw steps into a lattice.
std::vector<Eigen::Index> decodeUnpruned(const HmmCosts& model,
                                         Eigen::Index frames) {
  Lattice lattice;
  StateVector front = model.initial + model.observationCosts(0);
  lattice.frames.push_back({front, IndexVector(), kInfiniteCost});
  for (Eigen::Index t = 1; t < frames; ++t) {
    StepResult next = step(model, front, model.observationCosts(t));
    front = next.costs;
    lattice.frames.push_back(
        {std::move(next.costs), std::move(next.backpointers), kInfiniteCost});
  }
  return backtrack(lattice);
}

TEST_CASE("model validation rejects malformed cost sets") {
  HmmCosts model;
  model.initial = StateVector::Zero(2);
  model.transition = CostMatrix::Zero(2, 3);
  model.observationCosts = [](Eigen::Index) { return StateVector::Zero(2); };
  CHECK_THROWS_AS(model.validate(), std::invalid_argument);

  model.transition = CostMatrix::Zero(2, 2);
  CHECK_NOTHROW(model.validate());

  model.initial(0) = -0.25;
  CHECK_THROWS_AS(model.validate(), std::invalid_argument);
  model.initial(0) = 0.0;

  model.observationCosts = nullptr;
  CHECK_THROWS_AS(model.validate(), std::invalid_argument);
}

TEST_CASE("one Viterbi step expands the cheapest predecessor") {
  CostMatrix transition(2, 2);
  transition << 1, 3, 2, 0;
  StateVector observation(2);
  observation << 0.5, 1.5;
  StateVector previous(2);
  previous << 0, kInfiniteCost;

  HmmCosts model = makeModel(StateVector::Zero(2), transition, {});
  const StepResult result = step(model, previous, observation);

  // By hand: state 0 costs 0.5 + min(1 + 0, 2 + inf) = 1.5, state 1 costs
  // 1.5 + min(3 + 0, 0 + inf) = 4.5, both fed from predecessor 0.
  CHECK(result.costs(0) == 1.5);
  CHECK(result.costs(1) == 4.5);
  CHECK(result.backpointers(0) == 0);
  CHECK(result.backpointers(1) == 0);
}

TEST_CASE("zero transition and observation costs collapse to the minimum") {
  HmmCosts model = makeModel(StateVector::Zero(3), CostMatrix::Zero(3, 3), {});
  StateVector previous(3);
  previous << 4, 2, 9;
  const StepResult result = step(model, previous, StateVector::Zero(3));
  CHECK((result.costs.array() == 2.0).all());
  CHECK((result.backpointers.array() == 1).all());
}

TEST_CASE("a constant shift of the front shifts the step result") {
  Xoshiro256StarStar rng(31);
  CostMatrix transition(4, 4);
  StateVector previous(4);
  StateVector observation(4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    previous(i) = static_cast<double>(uniformInt(rng, 0, 9));
    observation(i) = static_cast<double>(uniformInt(rng, 0, 9));
    for (Eigen::Index j = 0; j < 4; ++j) {
      transition(i, j) = static_cast<double>(uniformInt(rng, 0, 9));
    }
  }
  HmmCosts model = makeModel(StateVector::Zero(4), transition, {});

  const StepResult base = step(model, previous, observation);
  const StepResult shifted =
      step(model, (previous.array() + 5.0).matrix(), observation);
  CHECK((shifted.costs.array() == (base.costs.array() + 5.0)).all());
  CHECK((shifted.backpointers.array() == base.backpointers.array()).all());
}

TEST_CASE("stepping from a dead front fails loudly") {
  HmmCosts model = makeModel(StateVector::Zero(2), CostMatrix::Zero(2, 2), {});
  const StateVector dead = StateVector::Constant(2, kInfiniteCost);
  CHECK_THROWS_AS(step(model, dead, StateVector::Zero(2)), DeadFrontError);
}

TEST_CASE("pruneThreshold offsets the running minimum by theta") {
  StateVector x(3);
  x << 3, 5, kInfiniteCost;
  CHECK(pruneThreshold(x, 2.5) == 5.5);

  StateVector zeros(2);
  zeros << 0, 0;
  CHECK(pruneThreshold(zeros, 2.5) == 2.5);

  // Shifting the vector shifts the threshold along (integer shift, exact).
  StateVector shifted = (x.array() + 4.0).matrix();
  CHECK(pruneThreshold(shifted, 2.5) == pruneThreshold(x, 2.5) + 4.0);
}

TEST_CASE("pruneThreshold rejects theta at or below one and NaN") {
  StateVector x(2);
  x << 0, 1;
  CHECK_THROWS_AS(pruneThreshold(x, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(pruneThreshold(x, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(pruneThreshold(x, std::nan("")), std::invalid_argument);
  CHECK(pruneThreshold(x, kInfiniteCost) == kInfiniteCost);
  CHECK_THROWS_AS(pruneThreshold(StateVector::Constant(2, kInfiniteCost), 2.5),
                  DeadFrontError);
}

TEST_CASE("prune keeps states at or below eta and reports residuals") {
  StateVector x(3);
  x << 3, 5, 7;
  const PruneOutcome outcome = prune(x, 5.5);

  REQUIRE(outcome.support == std::vector<Eigen::Index>{0, 1});
  CHECK(outcome.pruned(0) == 3.0);
  CHECK(outcome.pruned(1) == 5.0);
  CHECK(outcome.pruned(2) == kInfiniteCost);
  REQUIRE(outcome.residuals.size() == 2);
  CHECK(outcome.residuals(0) == 2.5);
  CHECK(outcome.residuals(1) == 0.5);
}

TEST_CASE("a state sitting exactly on the boundary survives") {
  StateVector x(2);
  x << 1, 3.5;
  const PruneOutcome outcome = prune(x, 3.5);
  CHECK(outcome.support == std::vector<Eigen::Index>{0, 1});
  CHECK(outcome.residuals(1) == 0.0);
}

TEST_CASE("a huge eta keeps every finite state") {
  StateVector x(3);
  x << 1, 100, kInfiniteCost;
  const PruneOutcome outcome = prune(x, 1e18);
  CHECK(outcome.support == std::vector<Eigen::Index>{0, 1});
}

TEST_CASE("prune needs a finite eta and a live front") {
  StateVector x(2);
  x << 0, 1;
  CHECK_THROWS_AS(prune(x, kInfiniteCost), std::invalid_argument);
  CHECK_THROWS_AS(prune(StateVector::Constant(2, kInfiniteCost), 5.0),
                  DeadFrontError);
}

TEST_CASE("the support never loses the running minimum") {
  Xoshiro256StarStar rng(37);
  for (int round = 0; round < 200; ++round) {
    const Eigen::Index n = uniformInt(rng, 1, 8);
    StateVector x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x(i) = test::uniformReal(rng, 0.0, 50.0);
    }
    const double theta = test::uniformReal(rng, 1.01, 10.0);
    const PruneOutcome outcome = prune(x, pruneThreshold(x, theta));

    Eigen::Index argmin = 0;
    x.minCoeff(&argmin);
    REQUIRE_FALSE(outcome.support.empty());
    CHECK(std::find(outcome.support.begin(), outcome.support.end(), argmin) !=
          outcome.support.end());
  }
}

TEST_CASE("pruning is invariant under a constant shift") {
  StateVector x(4);
  x << 3, 5, 6, 9;
  const double theta = 2.5;
  const PruneOutcome base = prune(x, pruneThreshold(x, theta));
  const StateVector shifted = (x.array() + 7.0).matrix();
  const PruneOutcome moved = prune(shifted, pruneThreshold(shifted, theta));

  CHECK(base.support == moved.support);
  CHECK((base.residuals.array() == moved.residuals.array()).all());
}

TEST_CASE("a single-frame lattice backtracks to the cheapest state") {
  Lattice lattice;
  StateVector z(3);
  z << 2, 1, 3;
  lattice.frames.push_back({z, IndexVector(), 3.5});
  CHECK(backtrack(lattice) == std::vector<Eigen::Index>{1});
}

TEST_CASE("backtrack rejects an empty lattice and a dead final frame") {
  CHECK_THROWS_AS(backtrack(Lattice{}), std::invalid_argument);

  Lattice dead;
  dead.frames.push_back(
      {StateVector::Constant(2, kInfiniteCost), IndexVector(), 1.0});
  CHECK_THROWS_AS(backtrack(dead), DeadFrontError);
}

TEST_CASE("a sole survivor pins the whole backtracked sequence") {
  const Eigen::Index frames = 5;
  Lattice lattice;
  for (Eigen::Index t = 0; t < frames; ++t) {
    StateVector z = StateVector::Constant(3, kInfiniteCost);
    z(2) = static_cast<double>(t);
    IndexVector bp;
    if (t > 0) {
      bp = IndexVector::Constant(3, 2);
    }
    lattice.frames.push_back({std::move(z), std::move(bp), 10.0});
  }
  CHECK(backtrack(lattice) == std::vector<Eigen::Index>(5, 2));
}

TEST_CASE("unpruned decoding matches exhaustive path search") {
  Xoshiro256StarStar rng(41);
  for (int round = 0; round < 60; ++round) {
    const Eigen::Index n = uniformInt(rng, 1, 4);
    const Eigen::Index frames = uniformInt(rng, 1, 6);

    // Small integer costs force frequent exact ties, so this also pins the
    // tie-break agreement between backtrack and the oracle.
    StateVector initial(n);
    CostMatrix transition(n, n);
    std::vector<StateVector> observations;
    for (Eigen::Index i = 0; i < n; ++i) {
      initial(i) = static_cast<double>(uniformInt(rng, 0, 3));
      for (Eigen::Index j = 0; j < n; ++j) {
        transition(i, j) = static_cast<double>(uniformInt(rng, 0, 3));
      }
    }
    for (Eigen::Index t = 0; t < frames; ++t) {
      StateVector obs(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        obs(i) = static_cast<double>(uniformInt(rng, 0, 3));
      }
      observations.push_back(std::move(obs));
    }

    HmmCosts model = makeModel(initial, transition, observations);
    REQUIRE(decodeUnpruned(model, frames) ==
            brutePath(initial, transition, observations).path);
  }
}

TEST_CASE("unreachable states stay infinite but the path routes around them") {
  // State 1 is a trap: everything can enter it, nothing leaves it cheaply,
  // and its observation costs are prohibitive.
  StateVector initial(3);
  initial << 0, 0, 5;
  CostMatrix transition(3, 3);
  transition << 1, kInfiniteCost, 2,
                kInfiniteCost, kInfiniteCost, kInfiniteCost,
                1, kInfiniteCost, 1;
  std::vector<StateVector> observations;
  for (int t = 0; t < 4; ++t) {
    StateVector obs(3);
    obs << 1, 50, 2;
    observations.push_back(obs);
  }
  HmmCosts model = makeModel(initial, transition, observations);
  const auto decoded = decodeUnpruned(model, 4);
  const auto expected = brutePath(initial, transition, observations).path;
  CHECK(decoded == expected);
  for (Eigen::Index state : decoded) {
    CHECK(state != 1);
  }
}

}  // namespace
}  // namespace troploc
