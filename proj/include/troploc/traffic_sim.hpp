// troploc/traffic_sim.hpp
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
#include <cstdint>
#include <vector>

#include "troploc/rng.hpp"

namespace troploc {

using CountVector = Eigen::Vector<std::int64_t, Eigen::Dynamic>;

// Piecewise-constant schedule over frame indices: value(t) is the value of
// the segment whose start is the largest one ≤ t. Segments must start at 0
// and have strictly increasing starts.
template <typename T>
struct StepSchedule {
  struct Segment {
    Eigen::Index start = 0;
    T value{};
  };

  std::vector<Segment> segments;

  static StepSchedule constant(T value) {
    return StepSchedule{{Segment{0, value}}};
  }

  void validate() const;
  T at(Eigen::Index t) const;
};

// One simulated network: n users issuing requests per interval, each count
// Poisson-distributed. One user (the attacker) draws from a separate rate
// schedule and may move between user slots over time.
struct Scenario {
  Eigen::Index userCount = 0;
  Eigen::Index frameCount = 0;
  Eigen::VectorXd benignRates;               // per-user λ
  StepSchedule<double> attackerRates;        // attacker λ over frames
  StepSchedule<Eigen::Index> attackerPositions;
  Eigen::Index changePeriod = 1000;          // informational: spacing used by
                                             // config expansion of rate lists
  std::uint64_t seed = 0;

  double attackerRateAt(Eigen::Index t) const { return attackerRates.at(t); }
  Eigen::Index attackerPositionAt(Eigen::Index t) const {
    return attackerPositions.at(t);
  }

  // Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

struct RequestFrame {
  Eigen::Index t = 0;
  CountVector counts;
};

// P[X = k] for X ~ Poisson(lambda), evaluated in log space so large k does
// not overflow the factorial. Throws std::domain_error for lambda <= 0 or
// k < 0.
double logPoissonPmf(std::int64_t k, double lambda);
double poissonPmf(std::int64_t k, double lambda);

// One Poisson(lambda) variate. Knuth's multiplication method for small
// lambda; larger rates are drawn as a sum of independent sub-variates with
// rate <= 30, which preserves the exact distribution.
std::int64_t samplePoisson(double lambda, Xoshiro256StarStar& rng);

// Draws the full traffic tape for a scenario. Frames are generated in order
// and users within a frame in index order, so the output is a pure function
// of (scenario, seed).
std::vector<RequestFrame> generate(const Scenario& scenario);

}  // namespace troploc
