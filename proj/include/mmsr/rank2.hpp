// Copyright 2026 The mmsr Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Rank-two M-MSR. Each row solves a 2-D least-squares problem over its
// retained columns, then each column does the same against the new rows.
//
// Row i trims on the normalized residuals (X_ij - u_i^T v_j) / ||v_j||: up
// to F of the most positive and F of the most negative are dropped. With
// one factor column this is exactly the rank-one rule, since
// X_ij / v_j - u_i = (X_ij - u_i v_j) / v_j.

#include <Eigen/Core>
#include <Eigen/LU>
#include <cmath>
#include <vector>

#include "mmsr/errors.hpp"
#include "mmsr/observed_matrix.hpp"
#include "mmsr/solver.hpp"

namespace mmsr {

template <typename Scalar>
using Factor2 = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

template <typename Scalar = double>
struct FactorPair2 {
  Factor2<Scalar> u;
  Factor2<Scalar> v;
};

struct Sweep2Stats {
  std::int64_t under_determined = 0;  // fewer than two retained entries; row left unchanged
  std::int64_t regularized = 0;       // normal equations needed the Tikhonov floor
};

// Sum over observed entries of (u_i^T v_j - X_ij)^2.
template <typename Scalar>
Scalar observed_residual(const ObservedMatrix<Scalar>& X, const FactorPair2<Scalar>& state) {
  Scalar total(0);
  for (const auto& e : X.entries()) {
    const Scalar r = state.u.row(e.row).dot(state.v.row(e.col)) - e.value;
    total += r * r;
  }
  return total;
}

namespace detail {

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> solve_normal_equations(Eigen::Matrix<Scalar, 2, 2> A,
                                                   const Eigen::Matrix<Scalar, 2, 1>& b,
                                                   Sweep2Stats& stats) {
  const Scalar trace = A.trace();
  const Scalar det = A.determinant();
  if (!(std::abs(det) > Scalar(1e-12) * trace * trace)) {
    A.diagonal().array() += Scalar(1e-12) * (trace > Scalar(0) ? trace : Scalar(1));
    ++stats.regularized;
  }
  return A.inverse() * b;
}

template <typename Scalar, typename NeighborsFn, typename ValuesFn>
Factor2<Scalar> half_sweep2(int count, const Factor2<Scalar>& own, const Factor2<Scalar>& other,
                            NeighborsFn neighbors, ValuesFn values, int F, Sweep2Stats& stats) {
  Factor2<Scalar> next = own;
  std::vector<Neighbor<Scalar>> scores;
  std::vector<char> removed;
  std::vector<int> scratch;
  for (int k = 0; k < count; ++k) {
    const auto nb = neighbors(k);
    const auto x = values(k);
    scores.resize(nb.size());
    for (std::size_t e = 0; e < nb.size(); ++e) {
      const auto w = other.row(nb[e]);
      const Scalar norm = w.norm();
      const Scalar residual = x[e] - own.row(k).dot(w);
      scores[e] = {nb[e], norm > Scalar(0) ? residual / norm : Scalar(0)};
    }
    const int dropped = mark_trimmed<Scalar>(scores, Scalar(0), F, removed, scratch);
    if (static_cast<int>(nb.size()) - dropped < 2) {
      ++stats.under_determined;
      continue;
    }
    Eigen::Matrix<Scalar, 2, 2> A = Eigen::Matrix<Scalar, 2, 2>::Zero();
    Eigen::Matrix<Scalar, 2, 1> b = Eigen::Matrix<Scalar, 2, 1>::Zero();
    for (std::size_t e = 0; e < nb.size(); ++e) {
      if (removed[e]) continue;
      const Eigen::Matrix<Scalar, 2, 1> w = other.row(nb[e]).transpose();
      A.noalias() += w * w.transpose();
      b.noalias() += x[e] * w;
    }
    next.row(k) = solve_normal_equations(A, b, stats).transpose();
  }
  return next;
}

}  // namespace detail

namespace detail {

template <typename Scalar>
void check_shapes(const ObservedMatrix<Scalar>& X, const FactorPair2<Scalar>& state, int F) {
  if (F < 0) throw InputError("F must be non-negative");
  if (state.u.rows() != X.rows() || state.v.rows() != X.cols())
    throw InputError("factor dimensions do not match the observed matrix");
}

}  // namespace detail

// Row half-step: refits every u_i against the current v.
template <typename Scalar>
FactorPair2<Scalar> mmsr2_row_step(const ObservedMatrix<Scalar>& X, const FactorPair2<Scalar>& state,
                                   int F, Sweep2Stats* stats = nullptr) {
  detail::check_shapes(X, state, F);
  Sweep2Stats local;
  const auto& g = X.graph();
  return {detail::half_sweep2<Scalar>(
              X.rows(), state.u, state.v, [&](int i) { return g.left_neighbors(i); },
              [&](int i) { return X.row_values(i); }, F, stats ? *stats : local),
          state.v};
}

// Column half-step: refits every v_j against the current u.
template <typename Scalar>
FactorPair2<Scalar> mmsr2_col_step(const ObservedMatrix<Scalar>& X, const FactorPair2<Scalar>& state,
                                   int F, Sweep2Stats* stats = nullptr) {
  detail::check_shapes(X, state, F);
  Sweep2Stats local;
  const auto& g = X.graph();
  return {state.u, detail::half_sweep2<Scalar>(
                       X.cols(), state.v, state.u, [&](int j) { return g.right_neighbors(j); },
                       [&](int j) { return X.col_values(j); }, F, stats ? *stats : local)};
}

template <typename Scalar>
FactorPair2<Scalar> mmsr2_sweep(const ObservedMatrix<Scalar>& X, const FactorPair2<Scalar>& state,
                                int F, Sweep2Stats* stats = nullptr) {
  return mmsr2_col_step(X, mmsr2_row_step(X, state, F, stats), F, stats);
}

}  // namespace mmsr
