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

#include "troploc/polytope_metrics.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <vector>

#include "oracles.hpp"

namespace troploc {
namespace {

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

PruneOutcome outcomeFor(const std::vector<double>& costs, double theta) {
  StateVector x(static_cast<Eigen::Index>(costs.size()));
  for (std::size_t i = 0; i < costs.size(); ++i) {
    x(static_cast<Eigen::Index>(i)) = costs[i];
  }
  return prune(x, pruneThreshold(x, theta));
}

TEST_CASE("volume metric reproduces the hand-computed example") {
  // costs (3, 5, 7) with theta 2.5 keep {0, 1} and leave residuals
  // (2.5, 0.5).
  const PruneOutcome outcome = outcomeFor({3, 5, 7}, 2.5);
  REQUIRE(outcome.support.size() == 2);
  CHECK_THAT(volumeMetric(outcome),
             WithinAbs(-0.12176460131698499, 1e-4));
}

TEST_CASE("volume metric is -1 for a lone survivor or equal residuals") {
  const PruneOutcome lone = outcomeFor({4, 100}, 2.5);
  REQUIRE(lone.support.size() == 1);
  CHECK(volumeMetric(lone) == -1.0);

  PruneOutcome equalResiduals;
  equalResiduals.pruned = StateVector::Constant(3, 6.0);
  equalResiduals.eta = 8.0;
  equalResiduals.support = {0, 1, 2};
  equalResiduals.residuals = Eigen::VectorXd::Constant(3, 2.0);
  CHECK(volumeMetric(equalResiduals) == -1.0);
}

TEST_CASE("a residual exactly on the threshold is clamped, not -inf") {
  const PruneOutcome outcome = outcomeFor({1.0, 3.5}, 2.5);
  REQUIRE(outcome.support.size() == 2);
  REQUIRE(outcome.residuals(1) == 0.0);
  const double nu = volumeMetric(outcome);
  CHECK(std::isfinite(nu));
  // The clamped term is log(1e-9)/log(2.5), a large negative ratio, so the
  // metric goes strongly positive.
  CHECK(nu > 5.0);
}

TEST_CASE("metrics reject an empty support") {
  PruneOutcome empty;
  empty.pruned = StateVector::Constant(2, kInfiniteCost);
  empty.eta = 1.0;
  CHECK_THROWS_AS(volumeMetric(empty), std::invalid_argument);
  CHECK_THROWS_AS(entropyMetric(empty), std::invalid_argument);
}

TEST_CASE("entropy metric reproduces the hand-computed examples") {
  const PruneOutcome pair = outcomeFor({2, 3}, 4.0);
  REQUIRE(pair.support.size() == 2);
  CHECK_THAT(entropyMetric(pair), WithinAbs(0.21001588578840861, 1e-4));

  const PruneOutcome single = outcomeFor({1, 100}, 2.5);
  REQUIRE(single.support.size() == 1);
  CHECK_THAT(entropyMetric(single), WithinAbs(0.36787944117144232, 1e-4));

  const PruneOutcome zeros = outcomeFor({0, 0}, 2.5);
  CHECK(entropyMetric(zeros) == 0.0);
}

TEST_CASE("both metrics match straight-loop oracles on random outcomes") {
  Xoshiro256StarStar rng(43);
  for (int round = 0; round < 300; ++round) {
    const Eigen::Index n = test::uniformInt(rng, 1, 8);
    std::vector<double> costs(static_cast<std::size_t>(n));
    for (double& c : costs) {
      c = test::uniformReal(rng, 0.0, 20.0);
    }
    const double theta = test::uniformReal(rng, 1.02, 8.0);
    const PruneOutcome outcome = outcomeFor(costs, theta);

    std::vector<double> residuals(outcome.residuals.data(),
                                  outcome.residuals.data() +
                                      outcome.residuals.size());
    std::vector<double> survivors;
    for (Eigen::Index i : outcome.support) {
      survivors.push_back(outcome.pruned(i));
    }

    CHECK_THAT(volumeMetric(outcome),
               WithinRel(test::bruteNu(residuals), 1e-12));
    CHECK_THAT(entropyMetric(outcome, EntropyMode::literal),
               WithinRel(test::bruteEpsilon(survivors, false), 1e-12));
    CHECK_THAT(entropyMetric(outcome, EntropyMode::shifted),
               WithinRel(test::bruteEpsilon(survivors, true), 1e-12));
  }
}

TEST_CASE("entropy stays within [0, 1/e] and decays for costly fronts") {
  Xoshiro256StarStar rng(47);
  for (int round = 0; round < 100; ++round) {
    std::vector<double> costs(4);
    for (double& c : costs) {
      c = test::uniformReal(rng, 0.0, 30.0);
    }
    const double epsilon = entropyMetric(outcomeFor(costs, 50.0));
    CHECK(epsilon >= 0.0);
    CHECK(epsilon <= std::exp(-1.0) + 1e-15);
  }

  // Same spread, growing offset: epsilon falls towards zero.
  const double near = entropyMetric(outcomeFor({1, 2, 3}, 10.0));
  const double far = entropyMetric(outcomeFor({11, 12, 13}, 10.0));
  const double veryFar = entropyMetric(outcomeFor({51, 52, 53}, 10.0));
  CHECK(near > far);
  CHECK(far > veryFar);
}

TEST_CASE("the shifted entropy mode ignores uniform cost growth") {
  const PruneOutcome low = outcomeFor({1, 2, 3}, 10.0);
  const PruneOutcome high = outcomeFor({1001, 1002, 1003}, 10.0);
  CHECK_THAT(entropyMetric(low, EntropyMode::shifted),
             WithinRel(entropyMetric(high, EntropyMode::shifted), 1e-12));
  // While the literal mode underflows to zero out there.
  CHECK(entropyMetric(high, EntropyMode::literal) == 0.0);
}

TEST_CASE("volume metric is shift invariant") {
  const PruneOutcome base = outcomeFor({3, 4, 5, 9}, 3.0);
  const PruneOutcome shifted = outcomeFor({10, 11, 12, 16}, 3.0);
  CHECK_THAT(volumeMetric(base), WithinRel(volumeMetric(shifted), 1e-12));
}

TEST_CASE("a residual moving toward the maximum lowers the volume metric") {
  PruneOutcome outcome;
  outcome.pruned = StateVector::Zero(2);
  outcome.eta = 2.5;
  outcome.support = {0, 1};
  outcome.residuals.resize(2);
  outcome.residuals << 2.5, 0.5;

  const double before = volumeMetric(outcome);
  outcome.residuals(1) = 1.5;
  const double after = volumeMetric(outcome);
  CHECK(after < before);
}

}  // namespace
}  // namespace troploc
