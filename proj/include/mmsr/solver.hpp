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

// Rank-one M-MSR: alternating trimmed-mean updates
//
//   u_i <- mean_{j in Omega_i \ R_i} X_ij / v_j
//   v_j <- mean_{i in Omega'_j \ R'_j} X_ij / u_i
//
// where R drops up to F of the ratios strictly above the vertex's current
// value and up to F strictly below it.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "mmsr/errors.hpp"
#include "mmsr/graph.hpp"
#include "mmsr/observed_matrix.hpp"
#include "mmsr/random.hpp"

namespace mmsr {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar = double>
struct Neighbor {
  int id = 0;
  Scalar value{};

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

namespace detail {

// Marks the entries trim_filter removes. Returns the number removed.
template <typename Scalar>
int mark_trimmed(std::span<const Neighbor<Scalar>> values, Scalar own, int F,
                 std::vector<char>& removed, std::vector<int>& scratch) {
  removed.assign(values.size(), 0);
  if (F <= 0) return 0;
  int count = 0;

  auto trim_side = [&](auto above, auto before) {
    scratch.clear();
    for (std::size_t k = 0; k < values.size(); ++k)
      if (above(values[k].value)) scratch.push_back(static_cast<int>(k));
    if (static_cast<int>(scratch.size()) > F) {
      std::nth_element(scratch.begin(), scratch.begin() + (F - 1), scratch.end(),
                       [&](int a, int b) { return before(values[a], values[b]); });
      scratch.resize(F);
    }
    for (int k : scratch) removed[k] = 1;
    count += static_cast<int>(scratch.size());
  };

  // Larger values go first on the high side, smaller first on the low side;
  // equal values fall back to the smaller neighbor id.
  trim_side([own](Scalar x) { return x > own; },
            [](const Neighbor<Scalar>& a, const Neighbor<Scalar>& b) {
              return a.value != b.value ? a.value > b.value : a.id < b.id;
            });
  trim_side([own](Scalar x) { return x < own; },
            [](const Neighbor<Scalar>& a, const Neighbor<Scalar>& b) {
              return a.value != b.value ? a.value < b.value : a.id < b.id;
            });
  return count;
}

}  // namespace detail

// Drops the (up to) F largest values strictly above `own` and the (up to) F
// smallest strictly below it. Survivors keep their input order. An empty
// result means the vertex was over-trimmed; solvers then leave it unchanged
// for the round.
template <typename Scalar>
std::vector<Neighbor<Scalar>> trim_filter(std::span<const Neighbor<Scalar>> values, Scalar own,
                                          int F) {
  if (F < 0) throw InputError("F must be non-negative");
  std::vector<char> removed;
  std::vector<int> scratch;
  detail::mark_trimmed(values, own, F, removed, scratch);
  std::vector<Neighbor<Scalar>> kept;
  kept.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k)
    if (!removed[k]) kept.push_back(values[k]);
  return kept;
}

template <typename Scalar>
std::vector<Neighbor<Scalar>> trim_filter(const std::vector<Neighbor<Scalar>>& values, Scalar own,
                                          int F) {
  return trim_filter(std::span<const Neighbor<Scalar>>(values), own, F);
}

template <typename Scalar = double>
struct FactorPair {
  Vector<Scalar> u;
  Vector<Scalar> v;
};

// Planted factors for diagnostics. Empty normal masks mean "all normal".
template <typename Scalar = double>
struct GroundTruth {
  Vector<Scalar> a;
  Vector<Scalar> b;
  std::vector<bool> normal_left;
  std::vector<bool> normal_right;

  bool is_normal_left(int i) const { return normal_left.empty() || normal_left[i]; }
  bool is_normal_right(int j) const { return normal_right.empty() || normal_right[j]; }
};

// Vertices whose state is held fixed through a run. Models stubborn
// adversarial rows/columns whose broadcast ratios never change.
struct FrozenVertices {
  std::vector<bool> left;
  std::vector<bool> right;

  bool is_left(int i) const { return !left.empty() && left[i]; }
  bool is_right(int j) const { return !right.empty() && right[j]; }
};

struct SweepStats {
  std::int64_t over_trimmed = 0;     // updates skipped because nothing survived the trim
  std::int64_t single_retained = 0;  // updates averaging a single ratio
};

struct SkewBounds {
  double min = 0.0;
  double max = 0.0;
};

struct IterationRecord {
  double max_change = 0.0;
  std::optional<SkewBounds> skew;
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  double final_change = std::numeric_limits<double>::infinity();
  std::optional<SkewBounds> initial_skew;
  std::vector<IterationRecord> history;
  std::vector<std::string> warnings;
  SweepStats stats;
};

struct MmsrOptions {
  int F = 0;
  int max_iter = 10000;
  double tol = 1e-10;
  bool record_history = false;
  FrozenVertices frozen;
};

template <typename Scalar = double>
struct MmsrResult {
  FactorPair<Scalar> factors;
  SolveReport report;
};

// min and max over normal vertices of u_i / a_i and b_j / v_j.
template <typename Scalar>
SkewBounds skew_bounds(const FactorPair<Scalar>& state, const GroundTruth<Scalar>& truth) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < state.u.size(); ++i) {
    if (!truth.is_normal_left(static_cast<int>(i))) continue;
    const double k = static_cast<double>(state.u[i] / truth.a[i]);
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  }
  for (Eigen::Index j = 0; j < state.v.size(); ++j) {
    if (!truth.is_normal_right(static_cast<int>(j))) continue;
    const double k = static_cast<double>(truth.b[j] / state.v[j]);
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  }
  return {lo, hi};
}

// ||u v^T - a b^T||_F / ||a b^T||_F over the whole matrix, or over the
// normal-row x normal-column block.
template <typename Scalar>
double reconstruct_error(const FactorPair<Scalar>& state, const GroundTruth<Scalar>& truth,
                         bool restrict_normal) {
  if (state.u.size() != truth.a.size() || state.v.size() != truth.b.size())
    throw InputError("factor and ground-truth dimensions differ");
  long double diff = 0, norm = 0;
  for (Eigen::Index i = 0; i < state.u.size(); ++i) {
    if (restrict_normal && !truth.is_normal_left(static_cast<int>(i))) continue;
    for (Eigen::Index j = 0; j < state.v.size(); ++j) {
      if (restrict_normal && !truth.is_normal_right(static_cast<int>(j))) continue;
      const long double t = static_cast<long double>(truth.a[i]) * truth.b[j];
      const long double d = static_cast<long double>(state.u[i]) * state.v[j] - t;
      diff += d * d;
      norm += t * t;
    }
  }
  if (norm == 0) throw InputError("ground truth has zero norm");
  return static_cast<double>(std::sqrt(diff / norm));
}

namespace detail {

template <typename Scalar>
void require_positive(const ObservedMatrix<Scalar>& X) {
  for (const auto& e : X.entries()) {
    if (!(e.value > Scalar(0))) {
      std::ostringstream msg;
      msg << "M-MSR needs a positive matrix; entry (" << e.row << ", " << e.col
          << ") = " << e.value;
      throw InputError(msg.str());
    }
  }
}

template <typename Scalar>
void require_positive(const Vector<Scalar>& x, const char* name) {
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (!(x[k] > Scalar(0))) {
      std::ostringstream msg;
      msg << name << "[" << k << "] = " << x[k] << " is not positive";
      throw NumericalError(msg.str());
    }
  }
}

// One half-sweep: target[k] <- trimmed mean of values[k][.] / other[.]
// against the old target[k].
template <typename Scalar, typename NeighborsFn, typename ValuesFn, typename FrozenFn>
Vector<Scalar> half_sweep(int count, const Vector<Scalar>& own, const Vector<Scalar>& other,
                          NeighborsFn neighbors, ValuesFn values, FrozenFn frozen, int F,
                          SweepStats& stats) {
  Vector<Scalar> next = own;
  std::vector<Neighbor<Scalar>> ratios;
  std::vector<char> removed;
  std::vector<int> scratch;
  for (int k = 0; k < count; ++k) {
    if (frozen(k)) continue;
    const auto nb = neighbors(k);
    if (nb.empty()) continue;
    const auto x = values(k);
    ratios.resize(nb.size());
    for (std::size_t e = 0; e < nb.size(); ++e) ratios[e] = {nb[e], x[e] / other[nb[e]]};
    const int dropped = mark_trimmed<Scalar>(ratios, own[k], F, removed, scratch);
    const int kept = static_cast<int>(nb.size()) - dropped;
    if (kept == 0) {
      ++stats.over_trimmed;
      continue;
    }
    if (kept == 1) ++stats.single_retained;
    Scalar sum(0);
    for (std::size_t e = 0; e < nb.size(); ++e)
      if (!removed[e]) sum += ratios[e].value;
    next[k] = sum / Scalar(kept);
  }
  return next;
}

}  // namespace detail

// One M-MSR iteration. The u-phase finishes before the v-phase starts, and
// the v-phase divides by the new u.
template <typename Scalar>
FactorPair<Scalar> mmsr_sweep(const ObservedMatrix<Scalar>& X, const FactorPair<Scalar>& state,
                              int F, SweepStats* stats = nullptr,
                              const FrozenVertices& frozen = {}) {
  if (F < 0) throw InputError("F must be non-negative");
  if (state.u.size() != X.rows() || state.v.size() != X.cols())
    throw InputError("factor dimensions do not match the observed matrix");
  detail::require_positive(state.v, "v");
  SweepStats local;
  SweepStats& s = stats ? *stats : local;
  const auto& g = X.graph();
  FactorPair<Scalar> next;
  next.u = detail::half_sweep<Scalar>(
      X.rows(), state.u, state.v, [&](int i) { return g.left_neighbors(i); },
      [&](int i) { return X.row_values(i); }, [&](int i) { return frozen.is_left(i); }, F, s);
  detail::require_positive(next.u, "u");
  next.v = detail::half_sweep<Scalar>(
      X.cols(), state.v, next.u, [&](int j) { return g.right_neighbors(j); },
      [&](int j) { return X.col_values(j); }, [&](int j) { return frozen.is_right(j); }, F, s);
  return next;
}

// u_i(0): median of X_ij / v_j(0) over Omega_i. The median sits inside the
// normal range whenever fewer than half of a row's ratios are corrupted,
// so the starting envelope is set by v(0). Rows without observations get 1.
template <typename Scalar>
Vector<Scalar> median_ratio_init(const ObservedMatrix<Scalar>& X, const Vector<Scalar>& v0) {
  Vector<Scalar> u = Vector<Scalar>::Ones(X.rows());
  std::vector<Scalar> ratios;
  for (int i = 0; i < X.rows(); ++i) {
    const auto nb = X.graph().left_neighbors(i);
    if (nb.empty()) continue;
    const auto x = X.row_values(i);
    ratios.resize(nb.size());
    for (std::size_t e = 0; e < nb.size(); ++e) ratios[e] = x[e] / v0[nb[e]];
    std::sort(ratios.begin(), ratios.end());
    const std::size_t h = ratios.size() / 2;
    u[i] = ratios.size() % 2 ? ratios[h] : (ratios[h - 1] + ratios[h]) / Scalar(2);
  }
  return u;
}

// v0_j = X_{row, j} where observed, otherwise uniform on (0, fill].
template <typename Scalar>
Vector<Scalar> init_row_completion(const ObservedMatrix<Scalar>& X, int row, Scalar fill,
                                   std::uint64_t seed) {
  if (row < 0 || row >= X.rows()) throw InputError("initialization row out of range");
  if (X.graph().left_degree(row) == 0)
    throw InputError("initialization row " + std::to_string(row) + " has no observed entries");
  if (!(fill > Scalar(0))) throw InputError("fill bound must be positive");
  Rng rng(seed);
  Vector<Scalar> v0(X.cols());
  for (int j = 0; j < X.cols(); ++j) v0[j] = fill * static_cast<Scalar>(rng.uniform_open_closed());
  const auto nb = X.graph().left_neighbors(row);
  const auto x = X.row_values(row);
  for (std::size_t e = 0; e < nb.size(); ++e) v0[nb[e]] = x[e];
  return v0;
}

namespace detail {

template <typename Scalar>
double max_relative_change(const FactorPair<Scalar>& before, const FactorPair<Scalar>& after) {
  double change = 0.0;
  auto scan = [&](const Vector<Scalar>& a, const Vector<Scalar>& b) {
    for (Eigen::Index k = 0; k < a.size(); ++k)
      change = std::max(change, static_cast<double>(std::abs(b[k] - a[k]) / std::abs(a[k])));
  };
  scan(before.u, after.u);
  scan(before.v, after.v);
  return change;
}

}  // namespace detail

// Iterates mmsr_sweep from v(0) = v0 (all ones when absent) until the
// largest relative coordinate change falls to options.tol or
// options.max_iter sweeps have run.
template <typename Scalar>
MmsrResult<Scalar> run_mmsr(const ObservedMatrix<Scalar>& X, const MmsrOptions& options,
                            std::optional<std::type_identity_t<Vector<Scalar>>> v0 = std::nullopt,
                            const std::type_identity_t<GroundTruth<Scalar>>* truth = nullptr) {
  if (options.F < 0) throw InputError("F must be non-negative");
  if (!(options.tol > 0)) throw InputError("tolerance must be positive");
  if (options.max_iter < 0) throw InputError("max_iter must be non-negative");
  detail::require_positive(X);

  MmsrResult<Scalar> result;
  SolveReport& report = result.report;
  FactorPair<Scalar>& state = result.factors;
  state.v = v0 ? *v0 : Vector<Scalar>::Ones(X.cols());
  if (state.v.size() != X.cols()) throw InputError("v0 length does not match column count");
  detail::require_positive(state.v, "v0");
  state.u = median_ratio_init(X, state.v);

  const auto& g = X.graph();
  if (!is_connected(g))
    report.warnings.push_back(
        "observation graph is disconnected; components converge independently");
  if (options.F > 0) {
    int thin = 0;
    for (int i = 0; i < g.left_size(); ++i) thin += g.left_degree(i) <= 2 * options.F;
    for (int j = 0; j < g.right_size(); ++j) thin += g.right_degree(j) <= 2 * options.F;
    if (thin > 0) {
      std::ostringstream msg;
      msg << thin << " vertices have degree <= 2F; trimming may discard all their neighbors";
      report.warnings.push_back(msg.str());
    }
  }

  if (truth) report.initial_skew = skew_bounds(state, *truth);

  for (int t = 0; t < options.max_iter; ++t) {
    FactorPair<Scalar> next = mmsr_sweep(X, state, options.F, &report.stats, options.frozen);
    const double change = detail::max_relative_change(state, next);
    state = std::move(next);
    report.iterations = t + 1;
    report.final_change = change;
    if (options.record_history) {
      IterationRecord rec{change, std::nullopt};
      if (truth) rec.skew = skew_bounds(state, *truth);
      report.history.push_back(rec);
    }
    if (change <= options.tol) {
      report.converged = true;
      break;
    }
  }
  if (report.stats.single_retained > 0) {
    std::ostringstream msg;
    msg << report.stats.single_retained
        << " updates averaged a single ratio (convex weight 1 > 1/2)";
    report.warnings.push_back(msg.str());
  }
  return result;
}

}  // namespace mmsr
