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

#include "troploc/traffic_sim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace troploc {

template <typename T>
void StepSchedule<T>::validate() const {
  if (segments.empty()) {
    throw std::invalid_argument("schedule has no segments");
  }
  if (segments.front().start != 0) {
    throw std::invalid_argument("schedule must start at frame 0");
  }
  for (std::size_t i = 1; i < segments.size(); ++i) {
    if (segments[i].start <= segments[i - 1].start) {
      throw std::invalid_argument("schedule starts must be strictly increasing");
    }
  }
}

template <typename T>
T StepSchedule<T>::at(Eigen::Index t) const {
  if (segments.empty() || t < segments.front().start) {
    throw std::invalid_argument("frame " + std::to_string(t) +
                                " not covered by schedule");
  }
  // Schedules are short (a handful of rate changes); linear scan suffices.
  std::size_t active = 0;
  for (std::size_t i = 1; i < segments.size(); ++i) {
    if (segments[i].start <= t) {
      active = i;
    } else {
      break;
    }
  }
  return segments[active].value;
}

template struct StepSchedule<double>;
template struct StepSchedule<Eigen::Index>;

void Scenario::validate() const {
  if (userCount < 1) {
    throw std::invalid_argument("scenario needs at least one user");
  }
  if (frameCount < 1) {
    throw std::invalid_argument("scenario needs at least one frame");
  }
  if (benignRates.size() != userCount) {
    throw std::invalid_argument("benign rate count does not match user count");
  }
  for (Eigen::Index j = 0; j < userCount; ++j) {
    if (!(benignRates[j] > 0.0) || !std::isfinite(benignRates[j])) {
      throw std::invalid_argument("benign rate for user " + std::to_string(j) +
                                  " must be positive and finite");
    }
  }
  attackerRates.validate();
  attackerPositions.validate();
  if (changePeriod < 1) {
    throw std::invalid_argument("change period must be at least one frame");
  }
  for (const auto& seg : attackerRates.segments) {
    if (!(seg.value > 0.0) || !std::isfinite(seg.value)) {
      throw std::invalid_argument("attacker rate must be positive and finite");
    }
  }
  for (const auto& seg : attackerPositions.segments) {
    if (seg.value < 0 || seg.value >= userCount) {
      throw std::invalid_argument("attacker position " +
                                  std::to_string(seg.value) +
                                  " outside the user range");
    }
  }
}

double logPoissonPmf(std::int64_t k, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::domain_error("Poisson rate must be positive and finite");
  }
  if (k < 0) {
    throw std::domain_error("Poisson outcome must be non-negative");
  }
  const double kd = static_cast<double>(k);
  return -lambda + kd * std::log(lambda) - std::lgamma(kd + 1.0);
}

double poissonPmf(std::int64_t k, double lambda) {
  return std::exp(logPoissonPmf(k, lambda));
}

namespace {

// Knuth's multiplication method: count uniform draws until their product
// drops below e^(-lambda). Exact, but the expected draw count is lambda + 1,
// so callers cap lambda at a small constant.
std::int64_t samplePoissonKnuth(double lambda, Xoshiro256StarStar& rng) {
  const double limit = std::exp(-lambda);
  std::int64_t k = 0;
  double product = rng.nextDouble();
  while (product > limit) {
    ++k;
    product *= rng.nextDouble();
  }
  return k;
}

}  // namespace

std::int64_t samplePoisson(double lambda, Xoshiro256StarStar& rng) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::domain_error("Poisson rate must be positive and finite");
  }
  constexpr double kChunk = 30.0;
  std::int64_t total = 0;
  // Poisson(a) + Poisson(b) ~ Poisson(a + b) for independent draws, so
  // splitting the rate keeps the distribution exact while bounding the cost
  // of the multiplication method.
  while (lambda > kChunk) {
    total += samplePoissonKnuth(kChunk, rng);
    lambda -= kChunk;
  }
  return total + samplePoissonKnuth(lambda, rng);
}

std::vector<RequestFrame> generate(const Scenario& scenario) {
  scenario.validate();
  Xoshiro256StarStar rng(scenario.seed);
  std::vector<RequestFrame> frames;
  frames.reserve(static_cast<std::size_t>(scenario.frameCount));
  for (Eigen::Index t = 0; t < scenario.frameCount; ++t) {
    const Eigen::Index attacker = scenario.attackerPositionAt(t);
    const double attackerRate = scenario.attackerRateAt(t);
    RequestFrame frame;
    frame.t = t;
    frame.counts.resize(scenario.userCount);
    for (Eigen::Index j = 0; j < scenario.userCount; ++j) {
      const double rate =
          (j == attacker) ? attackerRate : scenario.benignRates[j];
      frame.counts[j] = samplePoisson(rate, rng);
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace troploc
