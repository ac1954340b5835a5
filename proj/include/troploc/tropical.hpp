// troploc/tropical.hpp
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

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace troploc {

// Costs live in R ∪ {+inf}. A +inf entry means "excluded / unreachable".
// NaN and -inf are never valid costs.
inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

using CostMatrix = Eigen::MatrixXd;
using StateVector = Eigen::VectorXd;
using IndexVector = Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1>;

inline bool isValidCost(double c) {
  return !std::isnan(c) && c != -kInfiniteCost;
}

template <typename Derived>
bool allValidCosts(const Eigen::MatrixBase<Derived>& m) {
  return !m.derived().array().isNaN().any() &&
         (m.derived().array() != -kInfiniteCost).all();
}

// Min-plus (tropical) semiring operations: "addition" is min with identity
// +inf, "multiplication" is + with identity 0. Free functions accept any
// dense Eigen expression and return plain matrices of the same scalar.
namespace tropical {

template <typename Scalar>
inline constexpr Scalar infinity() {
  return std::numeric_limits<Scalar>::infinity();
}

// result(i, j) = min_k a(i, k) + b(k, j)
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>
matmul(const Eigen::MatrixBase<DerivedA>& a,
       const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.cols() != b.rows()) {
    throw std::invalid_argument(
        "tropical::matmul: inner dimensions differ (" +
        std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + ")");
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows(),
                                                            b.cols());
  if (a.cols() == 0) {
    out.setConstant(infinity<Scalar>());  // min over an empty set
    return out;
  }
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    out.col(j) = (a.derived().rowwise() + b.derived().col(j).transpose())
                     .rowwise()
                     .minCoeff();
  }
  return out;
}

template <typename Scalar>
struct MatvecResult {
  Eigen::Vector<Scalar, Eigen::Dynamic> values;
  // argmin(i) is the smallest k attaining values(i); 0 when the whole row
  // is +inf.
  IndexVector argmin;
};

// values(i) = min_k a(i, k) + x(k), with the attaining k kept per row.
// The explicit scan pins the tie-break: the smallest index wins.
template <typename DerivedA, typename DerivedX>
MatvecResult<typename DerivedA::Scalar> matvec(
    const Eigen::MatrixBase<DerivedA>& a,
    const Eigen::MatrixBase<DerivedX>& x) {
  using Scalar = typename DerivedA::Scalar;
  if (a.cols() != x.size()) {
    throw std::invalid_argument(
        "tropical::matvec: matrix has " + std::to_string(a.cols()) +
        " columns but vector has " + std::to_string(x.size()) + " entries");
  }
  MatvecResult<Scalar> out;
  out.values.resize(a.rows());
  out.argmin.resize(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Scalar best = infinity<Scalar>();
    Eigen::Index bestK = 0;
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      const Scalar candidate = a.derived()(i, k) + x.derived()(k);
      if (candidate < best) {
        best = candidate;
        bestK = k;
      }
    }
    out.values(i) = best;
    out.argmin(i) = bestK;
  }
  return out;
}

// Square matrix with v on the diagonal and +inf elsewhere, so that
// matmul(diag(v), x) adds v entrywise onto x.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> diag(
    const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  auto out = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Constant(
                 v.size(), v.size(), infinity<Scalar>())
                 .eval();
  out.diagonal() = v;
  return out;
}

// Min-plus identity: 0 on the diagonal, +inf off it.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> identity(
    Eigen::Index n) {
  auto out = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Constant(
                 n, n, infinity<Scalar>())
                 .eval();
  out.diagonal().setZero();
  return out;
}

}  // namespace tropical
}  // namespace troploc
