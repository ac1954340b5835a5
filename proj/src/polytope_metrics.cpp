// troploc/polytope_metrics.cpp
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

#include "troploc/polytope_metrics.hpp"

#include <cmath>

namespace troploc {

namespace {

Eigen::ArrayXd supportValues(const PruneOutcome& outcome) {
  Eigen::ArrayXd z(static_cast<Eigen::Index>(outcome.support.size()));
  for (std::size_t s = 0; s < outcome.support.size(); ++s) {
    z(static_cast<Eigen::Index>(s)) = outcome.pruned(outcome.support[s]);
  }
  return z;
}

}  // namespace

double volumeMetric(const PruneOutcome& outcome) {
  if (outcome.support.empty()) {
    throw std::invalid_argument("volumeMetric: empty support");
  }
  const Eigen::ArrayXd r = outcome.residuals.array().max(kResidualFloor);
  const double maxResidual = r.maxCoeff();
  if (!std::isfinite(maxResidual)) {
    throw std::domain_error("volumeMetric: residuals must be finite");
  }
  const double logMax = std::log(maxResidual);
  if (std::abs(logMax) < 1e-9) {
    return -1.0;  // all residuals equal, degenerate normalisation
  }
  return -(r.log() / logMax).mean();
}

double entropyMetric(const PruneOutcome& outcome, EntropyMode mode) {
  if (outcome.support.empty()) {
    throw std::invalid_argument("entropyMetric: empty support");
  }
  Eigen::ArrayXd z = supportValues(outcome);
  if (mode == EntropyMode::shifted) {
    z -= z.minCoeff();
  }
  // std::exp rather than Eigen's vectorised exp: the latter clamps its
  // argument, leaving denormal residue where huge costs must underflow to
  // an exact zero (the controller tests epsilon against zero).
  return z.unaryExpr([](double v) { return v * std::exp(-v); }).mean();
}

}  // namespace troploc
